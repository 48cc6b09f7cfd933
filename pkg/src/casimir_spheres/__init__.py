"""Finite-temperature Casimir force gradient between two metallic spheres."""

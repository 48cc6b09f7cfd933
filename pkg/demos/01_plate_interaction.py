"""Two gold plates at room temperature: how the Casimir force splits into
the classical n = 0 mode and the quantum/thermal n > 0 modes."""
import numpy as np

from casimir_spheres.lifshitz import drude_n0_force, plane_interaction
from casimir_spheres.material import DEFAULT_GOLD, IdealMetal, ThermalEnvironment

room = ThermalEnvironment(300.0)
print(f"thermal length at 300 K: {room.thermal_length * 1e6:.3f} um")

# The n = 0 part of the Drude plates has a closed form (TM only).
a = 0.5e-6
split = plane_interaction(DEFAULT_GOLD, room, a)
print(f"n=0 force at 0.5 um: {split.force_n0:.6e} N/m^2, closed form {drude_n0_force(room, a):.6e}")

print()
print(" a [um]   F [N/m^2]      n=0 share   modes")
for a in np.geomspace(0.1e-6, 10e-6, 9):
    s = plane_interaction(DEFAULT_GOLD, room, a)
    print(f"{a * 1e6:7.3f}  {s.force:12.4e}   {s.force_fraction_n0:8.4f}   {s.modes:5d}")

# Far beyond the thermal length only the classical mode survives.
far = plane_interaction(DEFAULT_GOLD, room, 10 * room.thermal_length)
print(f"\nat 10 thermal lengths the n>0 share of the force is {far.force_fraction_npos:.2e}")

# An ideal metal at low temperature reproduces the Casimir pressure.
from casimir_spheres.constants import HBAR, SPEED_OF_LIGHT

a = 0.1e-6
cold = plane_interaction(IdealMetal(), ThermalEnvironment(1.0), a)
casimir = -np.pi ** 2 * HBAR * SPEED_OF_LIGHT / (240 * a ** 4)
print(f"ideal metal, 1 K, 0.1 um: {cold.force:.6f} N/m^2 vs -pi^2 hbar c / (240 a^4) = {casimir:.6f}")

"""Beyond-PFA deviation of the sphere-sphere force gradient.

Reproduces the two kinds of curves: the deviation metric against the
separation for several radii, and against u at fixed separation.
"""
import math
import warnings

import numpy as np

from casimir_spheres.classical import SphereGeometry
from casimir_spheres.curvature import deviation_report, u_sweep
from casimir_spheres.errors import TableDataWarning
from casimir_spheres.material import DEFAULT_GOLD, ThermalEnvironment

warnings.simplefilter("ignore", TableDataWarning)
room = ThermalEnvironment(300.0)
separations = np.linspace(0.1e-6, 2e-6, 8)

print("deviation metric (R/a)(F'/F'_PFA - 1) against a")
print(" a [um]   plate R=30um   plate R=100um   spheres 60+60um   spheres 200+200um")
for a in separations:
    row = [
        deviation_report(DEFAULT_GOLD, room, SphereGeometry(r1, r2, a)).deviation_metric
        for r1, r2 in ((30e-6, math.inf), (100e-6, math.inf), (60e-6, 60e-6), (200e-6, 200e-6))
    ]
    print(f"{a * 1e6:6.3f}   " + "   ".join(f"{v:12.5f}" for v in row))

print("\ndeviation metric against u, R_eff = 30 um")
for a in (0.1e-6, 0.4e-6, 1.0e-6):
    reports = u_sweep(a, 30e-6)
    us = [r.geometry.u for r in reports]
    metric = [r.deviation_metric for r in reports]
    slope, intercept = np.polyfit(us, metric, 1)
    print(f"a = {a * 1e6:.1f} um: metric = {intercept:.4f} {slope:+.4f} u")

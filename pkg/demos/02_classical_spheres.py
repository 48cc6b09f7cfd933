"""Exact classical interaction of two grounded spheres.

The n = 0 free energy is a single series in Z.  At small gaps the
force gradient approaches the PFA value with a u-independent correction.
"""
import math

import numpy as np

from casimir_spheres.classical import (
    SphereGeometry,
    classical_force_gradient,
    classical_leading_gradient,
    classical_small_x_expansion,
    classical_terms,
)
from casimir_spheres.constants import ZETA3
from casimir_spheres.material import ThermalEnvironment

room = ThermalEnvironment(300.0)
R = 30e-6

print("    x       terms   F'/F'_PFA (u=0)   F'/F'_PFA (u=1/4)")
for x in np.logspace(-4, 1, 11):
    plate = SphereGeometry.from_effective(R, 0.0, x * R)
    pair = SphereGeometry.from_effective(R, 0.25, x * R)
    print(f"{x:9.2e}  {classical_terms(plate):6d}   "
          f"{classical_force_gradient(plate, room) / classical_leading_gradient(plate, room):14.6f}   "
          f"{classical_force_gradient(pair, room) / classical_leading_gradient(pair, room):14.6f}")

# The first correction is 1/(12 zeta(3)) a/R for every u.
x = 1e-4
for u in (0.0, 0.125, 0.25):
    g = SphereGeometry.from_effective(R, u, x * R)
    c = (classical_force_gradient(g, room) / classical_leading_gradient(g, room) - 1) * 12 * ZETA3 / x
    print(f"u = {u:5.3f}: normalized first correction = {c:.5f}")

# Just above the switch to the expansion the series and the expansion agree.
g = SphereGeometry(R, math.inf, 1.5e-6 * R)
series, expansion = classical_force_gradient(g, room), classical_small_x_expansion(g, room)
print(f"\nx = 1.5e-6: series {series:.10e}, expansion {expansion:.10e}, rel diff {series / expansion - 1:.1e}")

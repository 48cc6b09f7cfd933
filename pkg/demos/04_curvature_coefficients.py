"""Curvature coefficients: what can be computed and what is tabulated.

kappa follows from the plate interaction alone; theta_tilde needs the
second-order kernel and comes from the packaged gold table.  The hat
coefficients fold in the classical mode.
"""
from casimir_spheres.classical import SphereGeometry
from casimir_spheres.curvature import (
    default_table,
    derjaguin_expansion,
    derjaguin_numeric_gradient,
    hat_coefficients,
    kappa_from_lifshitz,
    pfa_force_gradient,
)
from casimir_spheres.errors import RangeError
from casimir_spheres.material import DEFAULT_GOLD, IdealMetal, ThermalEnvironment

room = ThermalEnvironment(300.0)
table = default_table()

print(" a [um]  kappa(table)  kappa(Drude)  theta_hat(conv)  theta_hat(table)")
for a, k in zip(table.tilde_grid[:12], table.kappa_values[:12]):
    th, _ = hat_coefficients(DEFAULT_GOLD, room, a, table.theta_tilde(a), k)
    try:
        ref = f"{table.theta_hat(a):.3f}"
    except RangeError:
        ref = "  -"
    print(f"{a * 1e6:6.2f}   {k:9.4f}   {kappa_from_lifshitz(DEFAULT_GOLD, room, a):10.4f}   "
          f"{th:12.4f}   {ref:>12}")

k0 = kappa_from_lifshitz(IdealMetal(), ThermalEnvironment(1.0), 0.1e-6, modes="all")
print(f"\nperfect conductor near T = 0: kappa = {k0:.8f}")

# The Derjaguin integral over the exact gap profile checks the small-distance expansion.
g = SphereGeometry(100e-6, 100e-6, 0.05e-6)
lead = pfa_force_gradient(DEFAULT_GOLD, room, g)
numeric = derjaguin_numeric_gradient(DEFAULT_GOLD, room, g)
print(f"Derjaguin correction: numeric {numeric - lead:.4e}, expansion {derjaguin_expansion(DEFAULT_GOLD, room, g) - lead:.4e}")

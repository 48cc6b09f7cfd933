"""Plane-plane Casimir interaction at finite temperature (Lifshitz formula).

Free energy per unit area::

    F_pp(a, T) = (k_B T / 2 pi) sum'_n  int k dk  sum_alpha ln(1 - r_alpha^2 exp(-2 a q_n))

with ``q_n = sqrt(xi_n^2/c^2 + k^2)`` and the ``n = 0`` term at half weight.
Every quantity is returned split into the classical ``n = 0`` part and the
sum over ``n > 0``.

The momentum integral is done in ``y = 2 a q_n``.  Derivatives with respect
to the separation are taken under the integral sign at fixed ``k``, where
only the exponential depends on ``a``; with ``g = r^2 exp(-y)`` this gives
the three kernels::

    energy     y   ln(1 - g)          / (4 a^2)
    force     -y^2 g / (1 - g)        / (4 a^3)
    gradient   y^3 g / (1 - g)^2      / (4 a^4)

For the ideal metal ``r^2 = 1`` and both the momentum integral and the sum
over ``n > 0`` are done in closed form.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import BOLTZMANN, SPEED_OF_LIGHT, ZETA3
from .errors import ConvergenceError, DomainError
from .material import DEFAULT_GOLD, ThermalEnvironment, _reflection_squared_from_q, is_ideal
from .quadrature import gauss_kronrod

# integrand ~ y^3 exp(-y): a window of 50 past the lower limit loses < 1e-16
_Y_WINDOW = 50.0


@dataclass(frozen=True)
class MatsubaraPolicy:
    """Truncation and accuracy settings for the Matsubara sum.

    The sum over ``n > 0`` stops once three consecutive modes each change
    energy, force and gradient by less than ``relative_term_tolerance``
    of the running total.
    """

    relative_term_tolerance: float = 1e-10
    max_modes: int = 100_000
    quadrature_relative_tolerance: float = 1e-10

    def __post_init__(self):
        for name in ("relative_term_tolerance", "quadrature_relative_tolerance"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise DomainError(f"{name} must lie in (0, 1), got {v!r}")
        if int(self.max_modes) < 1:
            raise DomainError("max_modes must be >= 1")


DEFAULT_POLICY = MatsubaraPolicy()


@dataclass(frozen=True)
class PlaneInteractionSplit:
    """Unit-area free energy, force and force gradient of two plates.

    Units: J/m^2, N/m^2 and N/m^3.  The force is ``-dF/da`` (negative for
    attraction) and the gradient is ``d(force)/da`` (positive).
    """

    separation: float
    free_energy_n0: float
    free_energy_npos: float
    force_n0: float
    force_npos: float
    force_gradient_n0: float
    force_gradient_npos: float
    modes: int = 0

    @property
    def free_energy(self):
        return self.free_energy_n0 + self.free_energy_npos

    @property
    def force(self):
        return self.force_n0 + self.force_npos

    @property
    def force_gradient(self):
        return self.force_gradient_n0 + self.force_gradient_npos

    @property
    def force_fraction_n0(self):
        """Share of the classical mode in the total force."""
        return self.force_n0 / self.force

    @property
    def force_fraction_npos(self):
        return self.force_npos / self.force

    def as_dict(self):
        return {
            "separation_m": self.separation,
            "free_energy_n0_J_per_m2": self.free_energy_n0,
            "free_energy_npos_J_per_m2": self.free_energy_npos,
            "free_energy_J_per_m2": self.free_energy,
            "force_n0_N_per_m2": self.force_n0,
            "force_npos_N_per_m2": self.force_npos,
            "force_N_per_m2": self.force,
            "force_gradient_n0_N_per_m3": self.force_gradient_n0,
            "force_gradient_npos_N_per_m3": self.force_gradient_npos,
            "force_gradient_N_per_m3": self.force_gradient,
            "matsubara_modes": self.modes,
        }


def _kernels(r2_pairs, y):
    out = np.zeros((3,) + y.shape)
    ey = np.exp(-y)
    for r2 in r2_pairs:
        g = r2 * ey
        one_minus = 1.0 - g
        out[0] += y * np.log1p(-g)
        out[1] += y * y * g / one_minus
        out[2] += y ** 3 * g / (one_minus * one_minus)
    return out


def mode_integrals(material, xi, a, rtol=1e-10):
    """Dimensionless momentum integrals of one Matsubara mode.

    Returns ``[J_E, J_F, J_G]``: the integrals over ``y`` from ``2 a xi / c``
    of the energy, force and gradient kernels (see module docstring), summed
    over polarizations.
    """
    y0 = 2.0 * a * xi / SPEED_OF_LIGHT
    if xi == 0:
        # conducting n = 0 limit: r_TE = 0, r_TM = 1
        def f(y):
            return _kernels((1.0,), y)
    else:
        def f(y):
            r2_te, r2_tm = _reflection_squared_from_q(material, xi, y / (2.0 * a))
            return _kernels((r2_te, r2_tm), y)
    try:
        value, _ = gauss_kronrod(f, y0, y0 + _Y_WINDOW, rtol=rtol, initial_panels=8)
    except ConvergenceError as exc:
        raise ConvergenceError(f"momentum integral failed at a={a:.4g} m: {exc}") from None
    return value


def _ideal_metal_sums(delta, max_terms=10_000_000):
    """Closed-form n>0 Matsubara sums for r^2 = 1 (both polarizations).

    ``delta = 2 a xi_1 / c``.  Returns ``[sum J_E, sum J_F, sum J_G]`` over
    ``n >= 1``, using ``sum_n n^p exp(-m n delta)`` in closed form and
    summing over the reflection order ``m`` until the tail is negligible.
    """
    total = np.zeros(3)
    start = 1
    chunk = 4096
    while True:
        m = np.arange(start, start + chunk, dtype=float)
        e = np.exp(-m * delta)
        d = -np.expm1(-m * delta)
        s0 = e / d
        s1 = e / d ** 2
        s2 = e * (1 + e) / d ** 3
        s3 = e * (1 + 4 * e + e * e) / d ** 4
        terms = np.array([
            -2.0 * (delta * s1 / m ** 2 + s0 / m ** 3),
            2.0 * (delta ** 2 * s2 / m + 2 * delta * s1 / m ** 2 + 2 * s0 / m ** 3),
            2.0 * (delta ** 3 * s3 + 3 * delta ** 2 * s2 / m + 6 * delta * s1 / m ** 2 + 6 * s0 / m ** 3),
        ])
        total += terms.sum(axis=1)
        last = np.abs(terms[:, -1]) * m[-1]
        if np.all(last <= 1e-17 * np.abs(total)):
            return total
        start += chunk
        chunk = min(2 * chunk, 1 << 20)
        if start > max_terms:
            raise ConvergenceError("ideal-metal reflection sum did not converge")


def _prefactors(thermal, a):
    kt = BOLTZMANN * thermal.temperature / (2.0 * math.pi)
    return np.array([kt / (4 * a * a), -kt / (4 * a ** 3), kt / (4 * a ** 4)])


@lru_cache(maxsize=4096)
def _split(material, thermal, a, policy):
    pref = _prefactors(thermal, a)
    if is_ideal(material):
        n0 = 0.5 * pref * np.array([-2 * ZETA3, 4 * ZETA3, 12 * ZETA3])
        delta = 2.0 * a * thermal.matsubara_spacing / SPEED_OF_LIGHT
        npos = pref * _ideal_metal_sums(delta)
        modes = 0
    else:
        n0 = 0.5 * pref * mode_integrals(material, 0.0, a, policy.quadrature_relative_tolerance)
        npos = np.zeros(3)
        quiet = 0
        n = 0
        while quiet < 3:
            n += 1
            if n > policy.max_modes:
                raise ConvergenceError(
                    f"Matsubara sum not converged within max_modes={policy.max_modes}", mode=n
                )
            xi = thermal.matsubara_frequency(n)
            term = pref * mode_integrals(material, xi, a, policy.quadrature_relative_tolerance)
            npos += term
            small = np.abs(term) <= policy.relative_term_tolerance * np.abs(npos)
            quiet = quiet + 1 if small.all() else 0
        modes = n
    return PlaneInteractionSplit(
        separation=a,
        free_energy_n0=float(n0[0]),
        free_energy_npos=float(npos[0]),
        force_n0=float(n0[1]),
        force_npos=float(npos[1]),
        force_gradient_n0=float(n0[2]),
        force_gradient_npos=float(npos[2]),
        modes=modes,
    )


def plane_interaction(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), a=1e-7, policy=DEFAULT_POLICY):
    """Free energy, force and force gradient of two identical thick plates.

    Parameters
    ----------
    material : IdealMetal, DrudeMetal or TabulatedPermittivity
    thermal : ThermalEnvironment
    a : float
        Separation in metres.
    policy : MatsubaraPolicy

    Returns
    -------
    PlaneInteractionSplit
    """
    a = float(a)
    if not a > 0:
        raise DomainError(f"separation must be > 0, got {a!r}")
    return _split(material, thermal, a, policy)


def plane_free_energy(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), a=1e-7, policy=DEFAULT_POLICY):
    """Unit-area free energy split; see :func:`plane_interaction`."""
    return plane_interaction(material, thermal, a, policy)


def plane_force(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), a=1e-7, policy=DEFAULT_POLICY):
    """Unit-area force split (derivative taken under the integral)."""
    return plane_interaction(material, thermal, a, policy)


def plane_force_gradient(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), a=1e-7, policy=DEFAULT_POLICY):
    """Unit-area force-gradient split (second derivative under the integral)."""
    return plane_interaction(material, thermal, a, policy)


def drude_n0_free_energy(thermal, a):
    """Closed form ``-k_B T zeta(3) / (16 pi a^2)`` of the TM-only classical term."""
    return -BOLTZMANN * thermal.temperature * ZETA3 / (16 * math.pi * a * a)


def drude_n0_force(thermal, a):
    """Closed form ``-k_B T zeta(3) / (8 pi a^3)``."""
    return -BOLTZMANN * thermal.temperature * ZETA3 / (8 * math.pi * a ** 3)


def drude_n0_force_gradient(thermal, a):
    """Closed form ``3 k_B T zeta(3) / (8 pi a^4)``."""
    return 3 * BOLTZMANN * thermal.temperature * ZETA3 / (8 * math.pi * a ** 4)

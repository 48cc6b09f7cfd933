"""Exact classical (n = 0) Casimir interaction of two Dirichlet spheres.

The free energy is the series::

    E = (k_B T / 2) sum_{l>=0} (2l+1) ln(1 - Z^(2l+1))

with ``Z = 1 / [1 + x + x^2 u/2 + sqrt((x + x^2 u/2)(2 + x + x^2 u/2))]``,
``x = a / R_eff`` and ``u = R_eff^2 / (R1 R2)``.  Writing ``Z = exp(-mu)``
gives ``mu = arccosh(1 + x + x^2 u / 2)``, which is the form used here:
derivatives with respect to the gap follow from the closed-form ``mu'(x)``
and ``mu''(x)``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN, ZETA3
from .errors import ConvergenceError, DomainError

DEFAULT_L_TOLERANCE = 1e-12
MAX_TERMS = 1_000_000
# below this x the gradient is returned from its two-term small-x expansion
EXPANSION_THRESHOLD = 1e-6


@dataclass(frozen=True)
class SphereGeometry:
    """Two spheres of radii ``radius_1``, ``radius_2`` at surface gap ``gap``.

    ``radius_2 = math.inf`` describes a sphere in front of a plate.  All
    lengths are in metres.
    """

    radius_1: float
    radius_2: float
    gap: float

    def __post_init__(self):
        if not (self.radius_1 > 0 and self.radius_2 > 0):
            raise DomainError("radii must be > 0")
        if math.isinf(self.radius_1):
            raise DomainError("use radius_2 = inf for the sphere-plate limit")
        if not (self.gap > 0 and math.isfinite(self.gap)):
            raise DomainError(f"gap must be finite and > 0, got {self.gap!r}")

    @classmethod
    def from_effective(cls, effective_radius, u, gap):
        """Build the geometry with a given effective radius and ratio parameter ``u``.

        ``u = 0`` gives the sphere-plate system, ``u = 1/4`` two equal spheres.
        """
        if not 0 <= u <= 0.25:
            raise DomainError(f"u must lie in [0, 1/4], got {u!r}")
        if u == 0:
            return cls(effective_radius, math.inf, gap)
        # R1, R2 are the roots of t^2 - (R/u) t + R^2/u = 0
        disc = math.sqrt(max(0.0, 1.0 - 4.0 * u))
        big = effective_radius * (1.0 + disc) / (2.0 * u)
        small = effective_radius * effective_radius / (u * big)
        return cls(big, small, gap)

    @property
    def is_sphere_plate(self):
        return math.isinf(self.radius_2)

    @property
    def effective_radius(self):
        if self.is_sphere_plate:
            return self.radius_1
        return self.radius_1 * self.radius_2 / (self.radius_1 + self.radius_2)

    @property
    def u(self):
        if self.is_sphere_plate:
            return 0.0
        r1, r2 = self.radius_1, self.radius_2
        return r1 * r2 / (r1 + r2) ** 2

    @property
    def x(self):
        return self.gap / self.effective_radius

    @property
    def inverse_radius_sum(self):
        """``1 / (R1 + R2)``, equal to ``u / R_eff``."""
        if self.is_sphere_plate:
            return 0.0
        return 1.0 / (self.radius_1 + self.radius_2)

    @property
    def z(self):
        return z_parameter(self)

    def with_gap(self, gap):
        return SphereGeometry(self.radius_1, self.radius_2, gap)


def _mu_and_derivatives(x, u):
    """``mu(x) = -ln Z`` and its first two derivatives with respect to ``x``."""
    s = x + 0.5 * u * x * x
    root = math.sqrt(s * (2.0 + s))
    mu = math.log1p(s + root)
    ds = 1.0 + u * x
    mu_x = ds / root
    mu_xx = (u * s * (2.0 + s) - ds * ds * (1.0 + s)) / root ** 3
    return mu, mu_x, mu_xx


def z_parameter(geom):
    """The dimensionless variable ``Z`` in (0, 1) of the exact classical series."""
    x, u = geom.x, geom.u
    s = x + 0.5 * u * x * x
    return 1.0 / (1.0 + s + math.sqrt(s * (2.0 + s)))


_PARTS = {"energy": (0,), "force": (1,), "gradient": (1, 2)}


def _series(mu, tol, quantity="energy", max_terms=MAX_TERMS):
    """Sum the mu-series of the classical energy and its derivatives.

    Returns ``(S0, S1, S2, terms)`` with::

        S0 = sum nu ln(1 - e^{-nu mu})
        S1 = sum nu^2 / (e^{nu mu} - 1)                    = dS0/dmu
        S2 = -sum nu^3 e^{nu mu} / (e^{nu mu} - 1)^2        = d^2 S0/dmu^2

    over ``nu = 2l + 1``.  Only the sums needed for ``quantity`` are
    accumulated (the others are returned as nan).  Summation stops at the
    first term past the peak of the summands where a geometric bound on the
    remaining tail is below ``tol`` relative to the partial sums.
    """
    parts = _PARTS[quantity]
    sums = np.zeros(3)
    start = 0
    chunk = 256
    while start < max_terms:
        l = np.arange(start, min(start + chunk, max_terms), dtype=float)
        nu = 2.0 * l + 1.0
        t = nu * mu
        with np.errstate(over="ignore"):
            em1 = np.expm1(t)
        one_minus = -np.expm1(-t)
        terms = np.zeros((3, l.size))
        if 0 in parts:
            terms[0] = nu * np.log(one_minus)
        if 1 in parts:
            terms[1] = nu * nu / em1
        if 2 in parts:
            terms[2] = -nu ** 3 / (em1 * one_minus)
        partial = sums[:, None] + np.cumsum(terms, axis=1)
        idx = list(parts)
        # past the peak successive terms shrink at least by r < 1, so the
        # neglected tail is bounded by term * r / (1 - r)
        r = ((nu + 2.0) / nu) ** 3 * np.exp(-2.0 * mu)
        with np.errstate(divide="ignore"):
            tail = np.where(r < 1.0, r / (1.0 - r), np.inf)
        small = np.all(np.abs(terms[idx]) * tail < tol * np.abs(partial[idx]), axis=0) & (t > 1.0)
        hit = np.flatnonzero(small)
        if hit.size:
            k = hit[0]
            out = np.full(3, np.nan)
            out[idx] = partial[idx, k]
            return (*out, start + k + 1)
        sums = partial[:, -1]
        start += chunk
        chunk = min(chunk * 2, 65536)
    raise ConvergenceError(
        f"classical series needs more than {max_terms} terms; "
        "x << 1 is the asymptotic regime, use the small-x expansion",
        mode=max_terms,
    )


def _check_tolerance(l_tolerance):
    if not 0 < l_tolerance < 1:
        raise DomainError(f"l_tolerance must lie in (0, 1), got {l_tolerance!r}")


def classical_terms(geom, l_tolerance=DEFAULT_L_TOLERANCE, quantity="energy"):
    """Number of series terms retained for ``quantity`` ('energy', 'force' or 'gradient')."""
    _check_tolerance(l_tolerance)
    mu, _, _ = _mu_and_derivatives(geom.x, geom.u)
    return int(_series(mu, l_tolerance, quantity)[3])


def classical_free_energy(geom, thermal, l_tolerance=DEFAULT_L_TOLERANCE):
    """Exact classical free energy in joules (negative)."""
    _check_tolerance(l_tolerance)
    mu, _, _ = _mu_and_derivatives(geom.x, geom.u)
    s0, _, _, _ = _series(mu, l_tolerance)
    return float(0.5 * BOLTZMANN * thermal.temperature * s0)


def classical_force(geom, thermal, l_tolerance=DEFAULT_L_TOLERANCE):
    """Exact classical force ``-dE/da`` in newtons (negative: attraction)."""
    _check_tolerance(l_tolerance)
    mu, mu_x, _ = _mu_and_derivatives(geom.x, geom.u)
    _, s1, _, _ = _series(mu, l_tolerance, "force")
    return float(-0.5 * BOLTZMANN * thermal.temperature * s1 * mu_x / geom.effective_radius)


def classical_force_gradient(geom, thermal, l_tolerance=DEFAULT_L_TOLERANCE):
    """Exact classical force gradient ``-d^2E/da^2`` in N/m (positive).

    For ``x < 1e-6`` the two-term small-x expansion is returned instead of
    the series; the two agree there to better than 1e-6 relative.
    """
    _check_tolerance(l_tolerance)
    if geom.x < EXPANSION_THRESHOLD:
        return classical_small_x_expansion(geom, thermal)
    return _series_force_gradient(geom, thermal, l_tolerance)


def _series_force_gradient(geom, thermal, l_tolerance):
    mu, mu_x, mu_xx = _mu_and_derivatives(geom.x, geom.u)
    _, s1, s2, _ = _series(mu, l_tolerance, "gradient")
    d2e_dx2 = s2 * mu_x * mu_x + s1 * mu_xx
    return float(-0.5 * BOLTZMANN * thermal.temperature * d2e_dx2 / geom.effective_radius ** 2)


def classical_small_x_expansion(geom, thermal):
    """``k_B T zeta(3) R / (4 a^3) * (1 + a / (12 zeta(3) R))``; independent of ``u``."""
    r, a = geom.effective_radius, geom.gap
    leading = BOLTZMANN * thermal.temperature * ZETA3 * r / (4.0 * a ** 3)
    return leading * (1.0 + a / (12.0 * ZETA3 * r))


def classical_leading_gradient(geom, thermal):
    """PFA (leading) term ``k_B T zeta(3) R / (4 a^3)`` of the classical gradient."""
    return BOLTZMANN * thermal.temperature * ZETA3 * geom.effective_radius / (4.0 * geom.gap ** 3)

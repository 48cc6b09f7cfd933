"""Beyond-PFA force gradient between two spheres.

The combined force gradient is the exact classical term plus the n > 0
Lifshitz force corrected to first order in ``a / R_eff`` by the derivative
expansion::

    F' = F'_cl - 2 pi R F_pp,n>0(a) [1 - (theta_tilde(a) + u kappa(a)) a / R]

``theta_tilde`` needs the second-order perturbative kernel of the plates and
is read from tabulated gold data; ``kappa`` follows from the plate
interaction alone and can be computed.  The module also holds the PFA
baseline, the deviation metric ``(R/a)(F'/F'_PFA - 1)``, the coefficient
``beta' = -(theta_hat + u kappa_hat)`` and a direct numerical Derjaguin
integral used to cross-check the small-distance expansion.
"""
import csv
import hashlib
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources

import numpy as np
from scipy.interpolate import PchipInterpolator

from .classical import SphereGeometry, classical_force_gradient
from .constants import ZETA3
from .errors import DomainError, RangeError, TableDataWarning
from .lifshitz import DEFAULT_POLICY, plane_interaction
from .material import DEFAULT_GOLD, ThermalEnvironment
from .quadrature import gauss_kronrod

# perfect conductor, T = 0
PC_THETA_TILDE_T0 = 20.0 / (3.0 * math.pi ** 2) - 1.0 / 9.0
PC_KAPPA_T0 = 1.0 / 3.0

TILDE_TABLE_FILE = "theta_tilde_kappa.csv"
HAT_TABLE_FILE = "theta_hat_kappa_hat.csv"
TABLE_SHA256 = {
    TILDE_TABLE_FILE: "59d94f022f402b607360bb6e10a8009e060b93def60ce5b2ad7a157b52893362",
    HAT_TABLE_FILE: "0b7a20a35b9d468afa36c36d417aab173bb13ee54084201125cfca7206588a74",
}
_UM = 1e-6


def _sha256(text):
    return hashlib.sha256(text.replace("\r\n", "\n").encode()).hexdigest()


def _parse_table(text, columns):
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames != list(columns):
        raise DomainError(f"expected columns {columns}, got {reader.fieldnames}")
    rows = [[float(r[c]) for c in columns] for r in reader]
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise DomainError("coefficient table needs at least two rows")
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise DomainError("coefficient table separations must be strictly increasing")
    if np.any(arr[:, 1:] <= 0):
        raise DomainError("coefficient table values must be positive")
    return arr


@dataclass(frozen=True)
class CoefficientTable:
    """Separation-gridded curvature coefficients for gold at room temperature.

    ``tilde_*`` arrays belong to the (theta_tilde, kappa) table, ``hat_*``
    arrays to the (theta_hat, kappa_hat) table.  Grids are in metres.
    Lookups use monotone piecewise-cubic (PCHIP) interpolation and never
    extrapolate.
    """

    tilde_grid: tuple
    theta_tilde_values: tuple
    kappa_values: tuple
    hat_grid: tuple
    theta_hat_values: tuple
    kappa_hat_values: tuple
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    @cached_property
    def _interp(self):
        tg, hg = np.array(self.tilde_grid), np.array(self.hat_grid)
        return {
            "theta_tilde": PchipInterpolator(tg, self.theta_tilde_values, extrapolate=False),
            "kappa": PchipInterpolator(tg, self.kappa_values, extrapolate=False),
            "theta_hat": PchipInterpolator(hg, self.theta_hat_values, extrapolate=False),
            "kappa_hat": PchipInterpolator(hg, self.kappa_hat_values, extrapolate=False),
        }

    def tilde_range(self):
        return self.tilde_grid[0], self.tilde_grid[-1]

    def hat_range(self):
        return self.hat_grid[0], self.hat_grid[-1]

    def _lookup(self, name, a, bounds):
        lo, hi = bounds
        # tolerate grid values that went through a unit conversion
        if a < lo * (1 - 1e-12) or a > hi * (1 + 1e-12):
            raise RangeError(
                f"{name} tabulated only for {lo / _UM:g}-{hi / _UM:g} um, got a={a / _UM:g} um"
            )
        return float(self._interp[name](min(max(a, lo), hi)))

    def theta_tilde(self, a):
        return self._lookup("theta_tilde", a, self.tilde_range())

    def kappa(self, a):
        return self._lookup("kappa", a, self.tilde_range())

    def theta_hat(self, a):
        return self._lookup("theta_hat", a, self.hat_range())

    def kappa_hat(self, a):
        return self._lookup("kappa_hat", a, self.hat_range())

    def __hash__(self):
        return hash((self.tilde_grid, self.theta_tilde_values, self.kappa_values,
                     self.hat_grid, self.theta_hat_values, self.kappa_hat_values))


def load_coefficient_table(tilde_csv=None, hat_csv=None, verify=True):
    """Load the coefficient tables.

    With no arguments the gold tables shipped with the package are read and
    their SHA-256 checksums verified.  Paths to user CSV files with headers
    ``a_um,theta_tilde,kappa`` and ``a_um,theta_hat,kappa_hat`` may be given
    instead; those are not checksummed.
    """
    texts = {}
    provenance = {}
    for key, path in ((TILDE_TABLE_FILE, tilde_csv), (HAT_TABLE_FILE, hat_csv)):
        if path is None:
            text = resources.files("casimir_spheres").joinpath("data", key).read_text()
            digest = _sha256(text)
            if verify and digest != TABLE_SHA256[key]:
                raise DomainError(f"checksum mismatch for packaged table {key}")
            provenance[key] = {"source": "packaged", "sha256": digest}
        else:
            with open(path) as fh:
                text = fh.read()
            provenance[key] = {"source": str(path), "sha256": _sha256(text)}
        texts[key] = text
    tilde = _parse_table(texts[TILDE_TABLE_FILE], ("a_um", "theta_tilde", "kappa"))
    hat = _parse_table(texts[HAT_TABLE_FILE], ("a_um", "theta_hat", "kappa_hat"))
    return CoefficientTable(
        tilde_grid=tuple(tilde[:, 0] * _UM),
        theta_tilde_values=tuple(tilde[:, 1]),
        kappa_values=tuple(tilde[:, 2]),
        hat_grid=tuple(hat[:, 0] * _UM),
        theta_hat_values=tuple(hat[:, 1]),
        kappa_hat_values=tuple(hat[:, 2]),
        provenance=provenance,
    )


@lru_cache(maxsize=1)
def default_table():
    """The packaged gold coefficient tables (loaded once, checksummed)."""
    return load_coefficient_table()


def kappa_from_lifshitz(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), a=1e-7, policy=DEFAULT_POLICY,
                        modes="npos"):
    """``kappa = 1 - 2 F_pp,n>0 / (a F_pp,n>0)`` from the plate free energy and force.

    ``modes='all'`` uses the full sum including the half-weighted ``n = 0``
    term.  At low temperature that sum is the trapezoidal rule for the
    zero-temperature frequency integral, so ``modes='all'`` is the way to
    obtain the ``T -> 0`` value; the ``n > 0`` part alone misses it by
    ``O(a / lambda_T)``.
    """
    split = plane_interaction(material, thermal, a, policy)
    if modes == "all":
        return 1.0 - 2.0 * split.free_energy / (a * split.force)
    if modes != "npos":
        raise DomainError(f"modes must be 'npos' or 'all', got {modes!r}")
    return 1.0 - 2.0 * split.free_energy_npos / (a * split.force_npos)


def theta_tilde(table, a):
    """Tabulated ``theta_tilde(a)``; raises :class:`RangeError` off the grid."""
    return table.theta_tilde(a)


def kappa(table, a, material=None, thermal=None, policy=DEFAULT_POLICY):
    """Tabulated ``kappa(a)``.

    Off the grid, falls back to :func:`kappa_from_lifshitz` when a material
    and temperature are given (with a :class:`TableDataWarning`), otherwise
    raises :class:`RangeError`.
    """
    try:
        return table.kappa(a)
    except RangeError:
        if material is None or thermal is None:
            raise
    warnings.warn(
        f"kappa at a={a / _UM:g} um computed from the Lifshitz split (outside table)",
        TableDataWarning,
        stacklevel=2,
    )
    return kappa_from_lifshitz(material, thermal, a, policy)


def implied_alpha(material, thermal, a, theta_tilde_value, policy=DEFAULT_POLICY):
    """Curvature coefficient ``alpha_{n>0}(a)`` (J/m^2) implied by a ``theta_tilde`` value.

    Inverts ``theta_tilde = (F_pp,n>0 - 2 alpha) / (a F_pp,n>0)``.
    """
    split = plane_interaction(material, thermal, a, policy)
    return 0.5 * (split.free_energy_npos - theta_tilde_value * a * split.force_npos)


def hat_coefficients(material, thermal, a, theta_tilde_value, kappa_value, policy=DEFAULT_POLICY):
    """Convert (theta_tilde, kappa) into the small-distance (theta_hat, kappa_hat).

    The classical mode adds its own ``1 / (12 zeta(3))`` correction, weighted
    by its share of the plate force.
    """
    split = plane_interaction(material, thermal, a, policy)
    f_pos = split.force_fraction_npos
    f_zero = split.force_fraction_n0
    theta_hat = f_pos * theta_tilde_value - f_zero / (12.0 * ZETA3)
    kappa_hat = f_pos * kappa_value
    return theta_hat, kappa_hat


def _coefficients_for_gradient(table, material, thermal, a, policy, extrapolation):
    lo, hi = table.tilde_range()
    if lo <= a <= hi:
        return table.theta_tilde(a), table.kappa(a)
    if extrapolation != "hold":
        raise RangeError(
            f"theta_tilde tabulated only for {lo / _UM:g}-{hi / _UM:g} um, got a={a / _UM:g} um"
        )
    edge = lo if a < lo else hi
    warnings.warn(
        f"a={a / _UM:g} um outside the theta_tilde table; holding the value at {edge / _UM:g} um "
        "and computing kappa from the Lifshitz split",
        TableDataWarning,
        stacklevel=3,
    )
    return table.theta_tilde(edge), kappa_from_lifshitz(material, thermal, a, policy)


@dataclass(frozen=True)
class ForceGradient:
    """Force gradient (N/m) of two spheres, split into its two contributions."""

    classical: float
    thermal_modes: float

    @property
    def total(self):
        return self.classical + self.thermal_modes


def force_gradient_parts(
    material=DEFAULT_GOLD,
    thermal=ThermalEnvironment(),
    geom=None,
    table=None,
    policy=DEFAULT_POLICY,
    l_tolerance=1e-12,
    extrapolation="hold",
):
    """Classical and DE-corrected n > 0 parts of the sphere-sphere force gradient.

    ``extrapolation='hold'`` keeps ``theta_tilde`` at the nearest tabulated
    value outside the table (and computes ``kappa`` from the plates), with a
    :class:`TableDataWarning`; ``'raise'`` raises :class:`RangeError`.
    """
    if geom is None:
        raise DomainError("a SphereGeometry is required")
    table = default_table() if table is None else table
    small_radius = min(geom.radius_1, geom.radius_2)
    if small_radius < 10 * thermal.thermal_length:
        warnings.warn(
            f"smallest radius {small_radius / _UM:g} um is not much larger than the thermal "
            f"length {thermal.thermal_length / _UM:.3g} um; the n>0 expansion may be inaccurate",
            RuntimeWarning,
            stacklevel=2,
        )
    a = geom.gap
    r = geom.effective_radius
    classical = classical_force_gradient(geom, thermal, l_tolerance)
    split = plane_interaction(material, thermal, a, policy)
    th, ka = _coefficients_for_gradient(table, material, thermal, a, policy, extrapolation)
    modes = -2.0 * math.pi * r * split.force_npos * (1.0 - (th + geom.u * ka) * a / r)
    return ForceGradient(classical=classical, thermal_modes=modes)


def force_gradient_total(
    material=DEFAULT_GOLD,
    thermal=ThermalEnvironment(),
    geom=None,
    table=None,
    policy=DEFAULT_POLICY,
    l_tolerance=1e-12,
    extrapolation="hold",
):
    """Force gradient (N/m) between two gold spheres, valid at all separations."""
    return force_gradient_parts(
        material, thermal, geom, table, policy, l_tolerance, extrapolation
    ).total


def pfa_force_gradient(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), geom=None,
                       policy=DEFAULT_POLICY, modes="all"):
    """PFA force gradient ``-2 pi R_eff F_pp(a)`` in N/m.

    ``modes`` selects the plate force used: ``'all'``, ``'n0'`` or ``'npos'``.
    """
    split = plane_interaction(material, thermal, geom.gap, policy)
    force = {"all": split.force, "n0": split.force_n0, "npos": split.force_npos}[modes]
    return -2.0 * math.pi * geom.effective_radius * force


def effective_pressure(force_gradient, effective_radius):
    """``P_eff = -F' / (2 pi R)``; equals the plate force per area within PFA."""
    return -force_gradient / (2.0 * math.pi * effective_radius)


def beta_prime(table, a, u, material=None, thermal=None, policy=DEFAULT_POLICY):
    """Leading beyond-PFA coefficient ``beta' = -(theta_hat + u kappa_hat)``.

    Returns ``(value, source)``.  Inside the hat table the tabulated values
    are used.  Otherwise, when a material is given and ``a`` is inside the
    tilde table, the hat coefficients are converted from (theta_tilde,
    kappa) with the computed plate force split.
    """
    try:
        return -(table.theta_hat(a) + u * table.kappa_hat(a)), "table"
    except RangeError:
        if material is None or thermal is None:
            raise
    th, kh = hat_coefficients(material, thermal, a, table.theta_tilde(a), table.kappa(a), policy)
    return -(th + u * kh), "converted"


@dataclass(frozen=True)
class DeviationReport:
    """Beyond-PFA summary for one geometry."""

    geometry: SphereGeometry
    force_gradient: float
    pfa_force_gradient: float
    deviation_metric: float
    beta_prime: float
    beta_prime_source: str = "table"

    @property
    def effective_pressure(self):
        return effective_pressure(self.force_gradient, self.geometry.effective_radius)

    def as_dict(self):
        g = self.geometry
        return {
            "R1_m": g.radius_1,
            "R2_m": g.radius_2,
            "a_m": g.gap,
            "R_eff_m": g.effective_radius,
            "u": g.u,
            "force_gradient_N_per_m": self.force_gradient,
            "pfa_force_gradient_N_per_m": self.pfa_force_gradient,
            "effective_pressure_Pa": self.effective_pressure,
            "deviation_metric": self.deviation_metric,
            "beta_prime": self.beta_prime,
            "beta_prime_source": self.beta_prime_source,
        }


def deviation_metric(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), geom=None, table=None,
                     policy=DEFAULT_POLICY, extrapolation="hold"):
    """``(R_eff / a) (F' / F'_PFA - 1)`` for the combined force gradient."""
    total = force_gradient_total(material, thermal, geom, table, policy, extrapolation=extrapolation)
    pfa = pfa_force_gradient(material, thermal, geom, policy)
    return (total / pfa - 1.0) / geom.x


def deviation_report(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), geom=None, table=None,
                     policy=DEFAULT_POLICY, extrapolation="hold"):
    table = default_table() if table is None else table
    total = force_gradient_total(material, thermal, geom, table, policy, extrapolation=extrapolation)
    pfa = pfa_force_gradient(material, thermal, geom, policy)
    try:
        beta, source = beta_prime(table, geom.gap, geom.u, material, thermal, policy)
    except RangeError:
        beta, source = math.nan, "unavailable"
    return DeviationReport(
        geometry=geom,
        force_gradient=total,
        pfa_force_gradient=pfa,
        deviation_metric=(total / pfa - 1.0) / geom.x,
        beta_prime=beta,
        beta_prime_source=source,
    )


def separation_sweep(radii, separations, material=DEFAULT_GOLD, thermal=ThermalEnvironment(),
                     table=None, policy=DEFAULT_POLICY):
    """Deviation metric versus separation for each ``(R1, R2)`` pair.

    Returns a list of :class:`DeviationReport`, ordered by radii then
    separation.
    """
    out = []
    for r1, r2 in radii:
        for a in separations:
            out.append(deviation_report(material, thermal, SphereGeometry(r1, r2, a), table, policy))
    return out


def u_sweep(a, effective_radius, us=None, material=DEFAULT_GOLD, thermal=ThermalEnvironment(),
            table=None, policy=DEFAULT_POLICY):
    """Deviation metric versus ``u`` at fixed ``a`` and ``R_eff`` (11 points by default)."""
    if us is None:
        us = np.linspace(0.0, 0.25, 11)
    return [
        deviation_report(material, thermal, SphereGeometry.from_effective(effective_radius, float(u), a),
                         table, policy)
        for u in us
    ]


def derjaguin_expansion(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), geom=None, policy=DEFAULT_POLICY):
    """Two-term small-distance expansion of the Derjaguin gradient::

        -2 pi R F_pp(a) + 2 pi (R^3/R1^3 + R^3/R2^3) F_pp,energy(a)
    """
    split = plane_interaction(material, thermal, geom.gap, policy)
    r = geom.effective_radius
    cubes = sum((r / rad) ** 3 for rad in (geom.radius_1, geom.radius_2) if math.isfinite(rad))
    return -2.0 * math.pi * r * split.force + 2.0 * math.pi * cubes * split.free_energy


def derjaguin_numeric_gradient(material=DEFAULT_GOLD, thermal=ThermalEnvironment(), geom=None,
                               policy=DEFAULT_POLICY, rtol=1e-9, quartic=True):
    """Derjaguin force gradient by direct quadrature over the gap profile.

    Integrates ``F'_pp(H(r)) 2 pi r dr`` with the height difference
    ``H = a + r^2/(2R) + (r^4/8)(1/R1^3 + 1/R2^3)``.  With ``quartic=False``
    the profile is a pure paraboloid.  The integral is taken over ``t = a/H``
    in (0, 1].
    """
    if geom.x > 0.05:
        raise DomainError(f"Derjaguin oracle is meant for x <= 0.05, got x={geom.x:g}")
    a = geom.gap
    r = geom.effective_radius
    c = 0.0
    if quartic:
        c = sum(1.0 / rad ** 3 for rad in (geom.radius_1, geom.radius_2) if math.isfinite(rad))

    def gradient(h):
        return plane_interaction(material, thermal, float(h), policy).force_gradient

    def integrand(t):
        h = a / t
        # with s = r^2:  dH/ds = sqrt(1/(4R^2) + c (H - a)/2)
        dh_ds = np.sqrt(0.25 / r ** 2 + 0.5 * c * (h - a))
        fp = np.vectorize(gradient, otypes=[float])(h)
        return math.pi * fp * a / (t * t * dh_ds)

    value, _ = gauss_kronrod(integrand, 0.0, 1.0, rtol=rtol, initial_panels=4)
    return value

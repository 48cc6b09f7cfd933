"""Dielectric response at imaginary frequency and thick-slab Fresnel coefficients.

Three material kinds are supported: the ideal (perfect) metal, the Drude
metal, and a user supplied table of ``eps(i xi)`` values.  Frequencies are
angular frequencies in rad/s on the imaginary axis.
"""
import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import BOLTZMANN, HBAR, SPEED_OF_LIGHT, ev_to_rad_per_s
from .errors import DomainError, RangeError

TE = "TE"
TM = "TM"
POLARIZATIONS = (TE, TM)


@dataclass(frozen=True)
class ThermalEnvironment:
    """Temperature of the system and the Matsubara ladder it implies.

    Parameters
    ----------
    temperature : float
        Absolute temperature in kelvin, strictly positive.
    """

    temperature: float = 300.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f"temperature must be > 0 K, got {self.temperature!r}")

    @property
    def matsubara_spacing(self):
        """xi_1 = 2 pi k_B T / hbar in rad/s."""
        return 2.0 * math.pi * BOLTZMANN * self.temperature / HBAR

    def matsubara_frequency(self, n):
        """Return xi_n in rad/s; accepts an integer or an integer array."""
        return n * self.matsubara_spacing

    @property
    def thermal_length(self):
        """lambda_T = hbar c / (2 pi k_B T) in metres."""
        return SPEED_OF_LIGHT / self.matsubara_spacing


@dataclass(frozen=True)
class IdealMetal:
    """Perfect conductor: infinite permittivity at every frequency."""

    name = "ideal-metal"

    def permittivity(self, xi):
        _check_frequency(xi)
        return np.full_like(np.asarray(xi, dtype=float), np.inf)[()]


@dataclass(frozen=True)
class DrudeMetal:
    """Drude metal, ``eps(i xi) = 1 + wp^2 / (xi (xi + gamma))``.

    Parameters are photon energies in eV.  The defaults are the usual gold
    values.
    """

    plasma_energy_ev: float = 9.0
    relaxation_energy_ev: float = 0.035
    name = "drude"

    def __post_init__(self):
        if not self.plasma_energy_ev > 0 or self.relaxation_energy_ev < 0:
            raise DomainError("Drude parameters need wp > 0 and gamma >= 0")

    @property
    def plasma_frequency(self):
        return ev_to_rad_per_s(self.plasma_energy_ev)

    @property
    def relaxation_rate(self):
        return ev_to_rad_per_s(self.relaxation_energy_ev)

    def permittivity(self, xi):
        _check_frequency(xi)
        xi = np.asarray(xi, dtype=float)
        wp = self.plasma_frequency
        return (1.0 + wp * wp / (xi * (xi + self.relaxation_rate)))[()]


@dataclass(frozen=True)
class TabulatedPermittivity:
    """Permittivity interpolated from a table of ``(xi, eps)`` pairs.

    Interpolation is monotone piecewise-cubic (PCHIP) in ``log(xi)``.
    Evaluation outside the tabulated frequency range raises
    :class:`RangeError`; there is no extrapolation.
    """

    xi: tuple
    eps: tuple
    source: str = "user table"
    name = "tabulated"

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        if xi.ndim != 1 or xi.shape != eps.shape or xi.size < 2:
            raise DomainError("tabulated permittivity needs two equal-length columns of >= 2 rows")
        if np.any(xi <= 0) or np.any(np.diff(xi) <= 0):
            raise DomainError("tabulated frequencies must be positive and strictly increasing")
        if np.any(eps < 1):
            raise DomainError("eps(i xi) must be >= 1 on the imaginary axis")
        object.__setattr__(self, "xi", tuple(map(float, xi)))
        object.__setattr__(self, "eps", tuple(map(float, eps)))

    @cached_property
    def _log_pchip(self):
        return PchipInterpolator(np.log(self.xi), np.asarray(self.eps), extrapolate=False)

    def permittivity(self, xi):
        _check_frequency(xi)
        xi = np.asarray(xi, dtype=float)
        lo, hi = self.xi[0], self.xi[-1]
        if np.any(xi < lo) or np.any(xi > hi):
            raise RangeError(
                f"xi outside tabulated range [{lo:.4g}, {hi:.4g}] rad/s"
            )
        return self._log_pchip(np.log(xi))[()]

    @classmethod
    def from_csv(cls, path):
        """Read a table with header ``xi_rad_per_s,eps``."""
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["xi_rad_per_s", "eps"]:
                raise DomainError(
                    f"{path}: expected header 'xi_rad_per_s,eps', got {reader.fieldnames}"
                )
            rows = [(float(r["xi_rad_per_s"]), float(r["eps"])) for r in reader]
        xi, eps = zip(*rows) if rows else ((), ())
        return cls(xi=xi, eps=eps, source=str(path))


DEFAULT_GOLD = DrudeMetal()


def _check_frequency(xi):
    if np.any(np.asarray(xi) <= 0):
        raise DomainError("permittivity is only evaluated at xi > 0; n=0 is handled separately")


def permittivity(material, xi):
    """Dielectric permittivity ``eps(i xi)`` of ``material``.

    Returns ``inf`` for the ideal metal.
    """
    return material.permittivity(xi)


def is_ideal(material):
    return isinstance(material, IdealMetal)


def fresnel(material, xi, k_perp, polarization):
    """Thick-slab reflection coefficient at imaginary frequency.

    Parameters
    ----------
    material : IdealMetal, DrudeMetal or TabulatedPermittivity
    xi : float or ndarray
        Imaginary frequency in rad/s, ``>= 0``.
    k_perp : float or ndarray
        In-plane wave vector in 1/m, ``>= 0``.
    polarization : {"TE", "TM"}

    Returns
    -------
    float or ndarray
        ``r_TE`` or ``r_TM``.  At ``xi = 0`` a conducting material gives
        ``r_TE = 0`` and ``r_TM = 1`` (ideal metal: ``-1`` and ``1``).
    """
    if polarization not in POLARIZATIONS:
        raise DomainError(f"polarization must be 'TE' or 'TM', got {polarization!r}")
    xi = np.asarray(xi, dtype=float)
    k_perp = np.asarray(k_perp, dtype=float)
    if np.any(xi < 0) or np.any(k_perp < 0):
        raise DomainError("xi and k_perp must be non-negative")
    if np.any((xi == 0) & (k_perp == 0)):
        raise DomainError("xi and k_perp cannot both vanish")
    xi, k_perp = np.broadcast_arrays(xi, k_perp)
    if is_ideal(material):
        return np.full(xi.shape, -1.0 if polarization == TE else 1.0)[()]
    out = np.empty(xi.shape)
    zero = xi == 0
    out[zero] = 0.0 if polarization == TE else 1.0
    pos = ~zero
    if np.any(pos):
        out[pos] = _fresnel_positive(material, xi[pos], k_perp[pos], polarization)
    return out[()]


def _fresnel_positive(material, xi, k_perp, polarization):
    eps = material.permittivity(xi)
    w2 = (xi / SPEED_OF_LIGHT) ** 2
    q = np.sqrt(w2 + k_perp * k_perp)
    kz = np.sqrt(eps * w2 + k_perp * k_perp)
    if polarization == TE:
        # (q - kz)/(q + kz) without cancellation
        return -(eps - 1.0) * w2 / (q + kz) ** 2
    return (eps * q - kz) / (eps * q + kz)


def reflection_squared(material, xi, k_perp):
    """Return ``(r_TE**2, r_TM**2)`` for arrays of ``xi > 0`` and ``k_perp``."""
    xi = np.asarray(xi, dtype=float)
    if is_ideal(material):
        one = np.ones(np.broadcast(xi, k_perp).shape)
        return one, one
    if np.all(xi == 0):
        shape = np.broadcast(xi, k_perp).shape
        return np.zeros(shape), np.ones(shape)
    return _reflection_squared_from_q(material, xi, np.sqrt((xi / SPEED_OF_LIGHT) ** 2 + k_perp ** 2))


def _reflection_squared_from_q(material, xi, q):
    # q = sqrt(xi^2/c^2 + k^2); kz^2 = q^2 + (eps - 1) xi^2/c^2
    eps = material.permittivity(xi)
    w2 = (xi / SPEED_OF_LIGHT) ** 2
    kz = np.sqrt(q * q + (eps - 1.0) * w2)
    r_te = (eps - 1.0) * w2 / (q + kz) ** 2
    r_tm = (eps * q - kz) / (eps * q + kz)
    return r_te * r_te, r_tm * r_tm

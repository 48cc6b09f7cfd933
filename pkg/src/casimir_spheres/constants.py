"""Physical constants (exact SI 2019 / CODATA 2018 values).

Values are literals rather than lookups so that golden numbers do not move
when a dependency updates its constant tables.
"""
import math
from typing import Final

PLANCK: Final = 6.62607015e-34  # J s
HBAR: Final = PLANCK / (2.0 * math.pi)  # J s
SPEED_OF_LIGHT: Final = 299792458.0  # m/s
BOLTZMANN: Final = 1.380649e-23  # J/K
ELEMENTARY_CHARGE: Final = 1.602176634e-19  # C

# Riemann zeta(3), Apery's constant.
ZETA3: Final = 1.2020569031595942

EV_TO_RAD_PER_S: Final = ELEMENTARY_CHARGE / HBAR


def ev_to_rad_per_s(energy_ev):
    """Convert a photon energy in eV to an angular frequency in rad/s."""
    return energy_ev * EV_TO_RAD_PER_S

import math

import pytest
from scipy import integrate

from casimir_spheres.constants import BOLTZMANN, HBAR, SPEED_OF_LIGHT, ZETA3
from casimir_spheres.errors import ConvergenceError, DomainError
from casimir_spheres.lifshitz import (
    MatsubaraPolicy,
    drude_n0_force,
    drude_n0_force_gradient,
    drude_n0_free_energy,
    mode_integrals,
    plane_interaction,
)
from casimir_spheres.material import DEFAULT_GOLD, IdealMetal, ThermalEnvironment, reflection_squared

ROOM = ThermalEnvironment(300.0)
UM = 1e-6


@pytest.mark.parametrize("a", [0.1 * UM, 0.5 * UM, 1.0 * UM])
def test_drude_n0_closed_forms(a):
    split = plane_interaction(DEFAULT_GOLD, ROOM, a)
    assert split.free_energy_n0 == pytest.approx(drude_n0_free_energy(ROOM, a), rel=1e-8)
    assert split.force_n0 == pytest.approx(drude_n0_force(ROOM, a), rel=1e-8)
    assert split.force_gradient_n0 == pytest.approx(drude_n0_force_gradient(ROOM, a), rel=1e-8)
    assert split.force_n0 == pytest.approx(-BOLTZMANN * 300 * ZETA3 / (8 * math.pi * a ** 3), rel=1e-8)


def test_golden_split_at_100nm():
    split = plane_interaction(DEFAULT_GOLD, ROOM, 0.1 * UM)
    assert split.free_energy_npos == pytest.approx(-2.107783422164299e-07, rel=1e-9)
    assert split.force_npos == pytest.approx(-5.4340746093395325, rel=1e-9)
    assert split.force_gradient_npos == pytest.approx(188567841.350329, rel=1e-9)


def test_split_additivity_is_exact():
    split = plane_interaction(DEFAULT_GOLD, ROOM, 0.3 * UM)
    assert split.free_energy == split.free_energy_n0 + split.free_energy_npos
    assert split.force == split.force_n0 + split.force_npos
    assert split.force_gradient == split.force_gradient_n0 + split.force_gradient_npos
    assert split.force_fraction_n0 + split.force_fraction_npos == pytest.approx(1.0)


@pytest.mark.parametrize("material", [DEFAULT_GOLD, IdealMetal()])
@pytest.mark.parametrize("a", [0.1 * UM, 0.2 * UM, 0.5 * UM, 1.0 * UM, 2.0 * UM])
def test_derivative_chain_by_finite_differences(material, a):
    h = 1e-4 * a
    lo = plane_interaction(material, ROOM, a - h)
    hi = plane_interaction(material, ROOM, a + h)
    mid = plane_interaction(material, ROOM, a)
    force_fd = -(hi.free_energy - lo.free_energy) / (2 * h)
    gradient_fd = (hi.force - lo.force) / (2 * h)
    assert force_fd == pytest.approx(mid.force, rel=1e-6)
    assert gradient_fd == pytest.approx(mid.force_gradient, rel=1e-6)
    assert mid.force < 0 < mid.force_gradient


@pytest.mark.parametrize("xi_index", [1, 10])
def test_substitution_matches_raw_momentum_integral(xi_index):
    a = 0.3 * UM
    xi = ROOM.matsubara_frequency(xi_index)
    w = xi / SPEED_OF_LIGHT

    def raw(kind):
        def f(k):
            q = math.sqrt(w * w + k * k)
            total = 0.0
            for r2 in reflection_squared(DEFAULT_GOLD, xi, k):
                g = float(r2) * math.exp(-2 * a * q)
                if kind == 0:
                    total += math.log1p(-g)
                elif kind == 1:
                    total += 2 * q * g / (1 - g)
                else:
                    total += 4 * q * q * g / (1 - g) ** 2
            return k * total
        # e^(-2 a q) < e^(-80) beyond k = 40 / a
        return integrate.quad(f, 0, 40 / a, epsrel=1e-12, epsabs=0, limit=400)[0]

    j = mode_integrals(DEFAULT_GOLD, xi, a)
    # k dk = y dy / (4 a^2) and each a-derivative brings y / a
    assert j[0] / (4 * a * a) == pytest.approx(raw(0), rel=1e-9)
    assert j[1] / (4 * a ** 3) == pytest.approx(raw(1), rel=1e-9)
    assert j[2] / (4 * a ** 4) == pytest.approx(raw(2), rel=1e-9)


def test_ideal_metal_zero_temperature_limit():
    a = 0.1 * UM
    split = plane_interaction(IdealMetal(), ThermalEnvironment(1.0), a)
    casimir = math.pi ** 2 * HBAR * SPEED_OF_LIGHT
    assert split.free_energy == pytest.approx(-casimir / (720 * a ** 3), rel=1e-3)
    assert split.force == pytest.approx(-casimir / (240 * a ** 4), rel=1e-3)
    assert split.force_gradient == pytest.approx(casimir / (60 * a ** 5), rel=1e-3)


def test_ideal_metal_closed_form_matches_mode_sum():
    # r^2 = 1 from a nearly perfect Drude metal, summed mode by mode
    from casimir_spheres.material import DrudeMetal

    a = 1.0 * UM
    near_ideal = DrudeMetal(plasma_energy_ev=1e4, relaxation_energy_ev=0.0)
    # only n > 0: at n = 0 the Drude TE mode does not reflect at all
    assert plane_interaction(near_ideal, ROOM, a).force_npos == pytest.approx(
        plane_interaction(IdealMetal(), ROOM, a).force_npos, rel=1e-3
    )


@pytest.mark.parametrize("material", [DEFAULT_GOLD, IdealMetal()])
def test_thermal_modes_negligible_far_beyond_thermal_length(material):
    a = 10 * ROOM.thermal_length
    split = plane_interaction(material, ROOM, a)
    assert abs(split.free_energy_npos / split.free_energy) < 1e-4
    assert abs(split.force_npos / split.force) < 1e-4


def test_truncation_robustness():
    a = 0.5 * UM
    policy = MatsubaraPolicy()
    split = plane_interaction(DEFAULT_GOLD, ROOM, a, policy)
    n = 2 * split.modes
    pref_f = -BOLTZMANN * ROOM.temperature / (2 * math.pi) / (4 * a ** 3)
    doubled = sum(pref_f * mode_integrals(DEFAULT_GOLD, ROOM.matsubara_frequency(k), a)[1] for k in range(1, n + 1))
    rel = abs(doubled - split.force_npos) / abs(split.force)
    assert rel < 10 * policy.relative_term_tolerance


def test_tighter_policy_changes_little():
    a = 0.2 * UM
    loose = plane_interaction(DEFAULT_GOLD, ROOM, a, MatsubaraPolicy(relative_term_tolerance=1e-8))
    tight = plane_interaction(DEFAULT_GOLD, ROOM, a, MatsubaraPolicy(relative_term_tolerance=1e-12))
    assert tight.modes > loose.modes
    assert tight.force == pytest.approx(loose.force, rel=1e-7)


def test_mode_cap_raises_with_mode_index():
    with pytest.raises(ConvergenceError) as info:
        plane_interaction(DEFAULT_GOLD, ROOM, 0.1 * UM, MatsubaraPolicy(max_modes=5))
    assert info.value.mode == 6


def test_invalid_inputs():
    with pytest.raises(DomainError):
        plane_interaction(DEFAULT_GOLD, ROOM, 0.0)
    with pytest.raises(DomainError):
        MatsubaraPolicy(relative_term_tolerance=0.0)
    with pytest.raises(DomainError):
        MatsubaraPolicy(max_modes=0)


def test_as_dict_has_units():
    d = plane_interaction(DEFAULT_GOLD, ROOM, 0.1 * UM).as_dict()
    assert d["force_N_per_m2"] < 0
    assert set(d) >= {"separation_m", "free_energy_J_per_m2", "force_gradient_N_per_m3", "matsubara_modes"}

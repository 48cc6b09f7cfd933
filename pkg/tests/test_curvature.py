import math
import warnings

import numpy as np
import pytest

from casimir_spheres.classical import SphereGeometry, classical_force_gradient
from casimir_spheres.constants import BOLTZMANN, ZETA3
from casimir_spheres.curvature import (
    PC_KAPPA_T0,
    PC_THETA_TILDE_T0,
    TABLE_SHA256,
    beta_prime,
    default_table,
    derjaguin_expansion,
    derjaguin_numeric_gradient,
    deviation_metric,
    deviation_report,
    force_gradient_parts,
    force_gradient_total,
    hat_coefficients,
    implied_alpha,
    kappa,
    kappa_from_lifshitz,
    load_coefficient_table,
    pfa_force_gradient,
    separation_sweep,
    theta_tilde,
    u_sweep,
)
from casimir_spheres.errors import DomainError, RangeError, TableDataWarning
from casimir_spheres.lifshitz import plane_interaction
from casimir_spheres.material import DEFAULT_GOLD, IdealMetal, ThermalEnvironment

ROOM = ThermalEnvironment(300.0)
UM = 1e-6
TABLE = default_table()


@pytest.fixture(autouse=True)
def _quiet_table_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TableDataWarning)
        yield


def test_perfect_conductor_constants():
    assert PC_THETA_TILDE_T0 == pytest.approx(0.5643, abs=1e-4)
    assert PC_THETA_TILDE_T0 == 20 / (3 * math.pi ** 2) - 1 / 9
    assert kappa_from_lifshitz(IdealMetal(), ThermalEnvironment(1.0), 0.1 * UM, modes="all") == pytest.approx(
        PC_KAPPA_T0, abs=1e-6
    )


def test_kappa_modes_argument():
    with pytest.raises(DomainError):
        kappa_from_lifshitz(DEFAULT_GOLD, ROOM, 0.1 * UM, modes="n0")


@pytest.mark.parametrize("a_um, expected, tol", [(0.2, 0.289, 0.01), (2.0, 0.578, 0.015)])
def test_computed_kappa_close_to_table(a_um, expected, tol):
    assert kappa_from_lifshitz(DEFAULT_GOLD, ROOM, a_um * UM) == pytest.approx(expected, abs=tol)


def test_table_lookups():
    assert theta_tilde(TABLE, 0.15 * UM) == pytest.approx(0.4715, abs=1e-12)
    assert kappa(TABLE, 0.15 * UM) == pytest.approx(0.270, abs=1e-12)
    assert TABLE.theta_hat(0.2 * UM) == pytest.approx(0.443, abs=1e-12)
    assert TABLE.kappa_hat(0.2 * UM) == pytest.approx(0.275, abs=1e-12)
    assert 0.456 < theta_tilde(TABLE, 0.125 * UM) < 0.4715


def test_table_range_errors_and_fallback():
    with pytest.raises(RangeError):
        theta_tilde(TABLE, 0.05 * UM)
    with pytest.raises(RangeError):
        kappa(TABLE, 3.0 * UM)
    with pytest.warns(TableDataWarning):
        value = kappa(TABLE, 3.0 * UM, DEFAULT_GOLD, ROOM)
    assert value == kappa_from_lifshitz(DEFAULT_GOLD, ROOM, 3.0 * UM)


def test_interpolation_is_monotone_between_nodes():
    grid = np.array(TABLE.tilde_grid)
    values = np.array(TABLE.kappa_values)
    for lo, hi, vlo, vhi in zip(grid, grid[1:], values, values[1:]):
        mid = kappa(TABLE, 0.5 * (lo + hi))
        assert min(vlo, vhi) <= mid <= max(vlo, vhi)


def test_packaged_table_checksums():
    assert {k: v["sha256"] for k, v in TABLE.provenance.items()} == TABLE_SHA256
    assert len(TABLE.tilde_grid) == 24 and len(TABLE.hat_grid) == 12


def test_user_table(tmp_path):
    tilde = tmp_path / "tilde.csv"
    tilde.write_text("a_um,theta_tilde,kappa\n0.1,0.5,0.3\n1.0,0.4,0.4\n")
    table = load_coefficient_table(tilde_csv=tilde)
    assert table.theta_tilde(0.1 * UM) == 0.5
    assert table.provenance["theta_tilde_kappa.csv"]["source"] == str(tilde)
    bad = tmp_path / "bad.csv"
    bad.write_text("a_um,theta_tilde,kappa\n1.0,0.5,0.3\n0.1,0.4,0.4\n")
    with pytest.raises(DomainError):
        load_coefficient_table(tilde_csv=bad)


def test_hat_conversion_at_100nm():
    th, kh = hat_coefficients(DEFAULT_GOLD, ROOM, 0.1 * UM, 0.456, 0.245)
    assert th == pytest.approx(0.439, abs=0.005)
    assert kh == pytest.approx(0.237, abs=0.005)


def test_tables_imply_consistent_n0_fraction():
    a = 0.1 * UM
    tt, k = TABLE.theta_tilde(a), TABLE.kappa(a)
    th, kh = TABLE.theta_hat(a), TABLE.kappa_hat(a)
    from_theta = (tt - th) / (tt + 1 / (12 * ZETA3))
    from_kappa = 1 - kh / k
    assert from_theta == pytest.approx(0.032, abs=0.001)
    assert abs(from_theta - from_kappa) < 0.002


def test_hat_equals_tilde_when_n0_vanishes():
    # at very low temperature the classical share of the plate force is negligible
    th, kh = hat_coefficients(IdealMetal(), ThermalEnvironment(1e-2), 0.1 * UM, 0.5, 0.3)
    assert th == pytest.approx(0.5, abs=1e-5)
    assert kh == pytest.approx(0.3, abs=1e-5)


def test_implied_alpha_inverts_theta_tilde():
    a = 0.3 * UM
    alpha = implied_alpha(DEFAULT_GOLD, ROOM, a, 0.454)
    split = plane_interaction(DEFAULT_GOLD, ROOM, a)
    assert (split.free_energy_npos - 2 * alpha) / (a * split.force_npos) == pytest.approx(0.454, rel=1e-12)


def test_golden_force_gradient():
    g = SphereGeometry(30 * UM, 30 * UM, 0.2 * UM)
    assert force_gradient_total(DEFAULT_GOLD, ROOM, g) == pytest.approx(4.522005895418043e-05, rel=1e-9)


def test_total_reduces_to_pfa_at_small_x():
    g = SphereGeometry(1.0, math.inf, 0.2 * UM)
    assert force_gradient_total(DEFAULT_GOLD, ROOM, g) / pfa_force_gradient(DEFAULT_GOLD, ROOM, g) == pytest.approx(
        1.0, abs=1e-6
    )


def test_equal_spheres_and_sphere_plate_differ_through_u_only():
    a, r = 0.3 * UM, 15 * UM
    plate = SphereGeometry(r, math.inf, a)
    pair = SphereGeometry(30 * UM, 30 * UM, a)
    pp = force_gradient_parts(DEFAULT_GOLD, ROOM, plate)
    sp = force_gradient_parts(DEFAULT_GOLD, ROOM, pair)
    split = plane_interaction(DEFAULT_GOLD, ROOM, a)
    expected = 2 * math.pi * split.force_npos * 0.25 * TABLE.kappa(a) * a
    assert sp.thermal_modes - pp.thermal_modes == pytest.approx(expected, rel=1e-10)
    assert sp.classical != pp.classical


def test_bracket_stays_in_unit_interval():
    for a in TABLE.tilde_grid:
        for u in (0.0, 0.125, 0.25):
            bracket = 1 - (TABLE.theta_tilde(a) + u * TABLE.kappa(a)) * 0.02
            assert 0 < bracket < 1


def test_small_radius_warning():
    with pytest.warns(RuntimeWarning):
        force_gradient_parts(DEFAULT_GOLD, ROOM, SphereGeometry(8 * UM, math.inf, 0.5 * UM))


def test_extrapolation_policy():
    g = SphereGeometry(30 * UM, math.inf, 3 * UM)
    with pytest.raises(RangeError):
        force_gradient_total(DEFAULT_GOLD, ROOM, g, extrapolation="raise")
    with pytest.warns(TableDataWarning):
        force_gradient_total(DEFAULT_GOLD, ROOM, g)


def test_pfa_properties():
    a = 0.2 * UM
    one = pfa_force_gradient(DEFAULT_GOLD, ROOM, SphereGeometry(30 * UM, math.inf, a))
    two = pfa_force_gradient(DEFAULT_GOLD, ROOM, SphereGeometry(60 * UM, math.inf, a))
    assert two == pytest.approx(2 * one, rel=1e-14)
    equal = pfa_force_gradient(DEFAULT_GOLD, ROOM, SphereGeometry(30 * UM, 30 * UM, a))
    unequal = pfa_force_gradient(DEFAULT_GOLD, ROOM, SphereGeometry(20 * UM, 60 * UM, a))
    assert equal == pytest.approx(unequal, rel=1e-14)
    g = SphereGeometry(15 * UM, math.inf, a)
    n0 = pfa_force_gradient(DEFAULT_GOLD, ROOM, g, modes="n0")
    assert n0 == pytest.approx(2 * math.pi * 15 * UM * BOLTZMANN * 300 * ZETA3 / (8 * math.pi * a ** 3), rel=1e-8)


@pytest.mark.parametrize("u, expected", [(0.0, -0.443), (0.25, -0.51175)])
def test_beta_prime_from_table(u, expected):
    value, source = beta_prime(TABLE, 0.2 * UM, u)
    assert value == pytest.approx(expected, abs=1e-12)
    assert source == "table"


def test_beta_prime_converted_beyond_hat_table():
    value, source = beta_prime(TABLE, 1.0 * UM, 0.0, DEFAULT_GOLD, ROOM)
    assert source == "converted"
    assert value < 0
    with pytest.raises(RangeError):
        beta_prime(TABLE, 1.0 * UM, 0.0)


@pytest.mark.parametrize("u", [0.0, 0.25])
def test_deviation_metric_approaches_beta_prime(u):
    a = 0.2 * UM
    g = SphereGeometry.from_effective(a / 1e-3, u, a)
    report = deviation_report(DEFAULT_GOLD, ROOM, g)
    assert report.deviation_metric == pytest.approx(report.beta_prime, rel=0.02)
    assert report.deviation_metric == deviation_metric(DEFAULT_GOLD, ROOM, g)
    assert report.effective_pressure == pytest.approx(-report.force_gradient / (2 * math.pi * g.effective_radius))


def test_deviation_metric_nearly_independent_of_radius():
    for a in (0.2 * UM, 0.5 * UM, 1.0 * UM):
        small = deviation_metric(DEFAULT_GOLD, ROOM, SphereGeometry.from_effective(30 * UM, 0.25, a))
        large = deviation_metric(DEFAULT_GOLD, ROOM, SphereGeometry.from_effective(100 * UM, 0.25, a))
        assert abs(small / large - 1) < 0.02


def test_u_sweep_is_linear():
    reports = u_sweep(0.4 * UM, 30 * UM)
    assert len(reports) == 11
    us = np.array([r.geometry.u for r in reports])
    metric = np.array([r.deviation_metric for r in reports])
    fit = np.polyval(np.polyfit(us, metric, 1), us)
    r2 = 1 - np.sum((metric - fit) ** 2) / np.sum((metric - metric.mean()) ** 2)
    assert r2 > 0.999


def test_separation_sweep_order():
    reports = separation_sweep([(30 * UM, math.inf), (30 * UM, 30 * UM)], [0.2 * UM, 0.4 * UM])
    assert [(r.geometry.radius_2, r.geometry.gap) for r in reports] == [
        (math.inf, 0.2 * UM), (math.inf, 0.4 * UM), (30 * UM, 0.2 * UM), (30 * UM, 0.4 * UM)
    ]


def test_derjaguin_paraboloid_is_pfa():
    g = SphereGeometry(100 * UM, math.inf, 0.1 * UM)
    numeric = derjaguin_numeric_gradient(DEFAULT_GOLD, ROOM, g, quartic=False)
    assert numeric == pytest.approx(pfa_force_gradient(DEFAULT_GOLD, ROOM, g), rel=1e-8)


@pytest.mark.parametrize("r1, r2", [(100 * UM, math.inf), (200 * UM, 200 * UM)])
def test_derjaguin_expansion_correction(r1, r2):
    g = SphereGeometry(r1, r2, 0.1 * UM)
    lead = pfa_force_gradient(DEFAULT_GOLD, ROOM, g)
    numeric = derjaguin_numeric_gradient(DEFAULT_GOLD, ROOM, g)
    expansion = derjaguin_expansion(DEFAULT_GOLD, ROOM, g)
    assert numeric == pytest.approx(lead, rel=1e-2)
    assert (numeric - lead) / (expansion - lead) == pytest.approx(1.0, abs=0.05)


def test_derjaguin_rejects_large_x():
    with pytest.raises(DomainError):
        derjaguin_numeric_gradient(DEFAULT_GOLD, ROOM, SphereGeometry(1 * UM, math.inf, 0.1 * UM))


def test_classical_part_is_exact_series():
    g = SphereGeometry(30 * UM, 40 * UM, 0.5 * UM)
    assert force_gradient_parts(DEFAULT_GOLD, ROOM, g).classical == classical_force_gradient(g, ROOM)

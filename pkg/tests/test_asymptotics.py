import json
import math

import mpmath
import numpy as np
import pytest

from carleman import asymptotics as asy
from carleman import checks
from carleman import geometry as geo
from carleman import ortho, special
from carleman.errors import DegenerateInput, DomainError, RangeError

LEM = geo.lemniscate(3, 1.4)
DISK = geo.disk(1.0)


@pytest.fixture(scope="module")
def disk_set():
    return ortho.closed_form_set(geo.disk(1.5), 12)


# -- rate reports ------------------------------------------------------------


def test_regression_exact_geometric():
    ns = list(range(10, 31))
    rep = asy.rate_regression(ns, [LEM.rho**n for n in ns], math.log(LEM.rho), 1e-6)
    assert rep.passed and rep.fitted_slope == pytest.approx(math.log(LEM.rho), abs=1e-12)


def test_regression_polynomial_factor():
    ns = list(range(20, 61, 10))
    rep = asy.rate_regression(ns, [math.sqrt(n) * LEM.rho**n for n in ns], math.log(LEM.rho), 0.05)
    assert rep.passed


def test_regression_outlier_is_not_special_cased():
    ns = list(range(10, 20))
    vals = [0.5**n for n in ns]
    vals[4] *= 10
    rep = asy.rate_regression(ns, vals, math.log(0.5), 0.05)
    expect = np.polyfit(ns, np.log(vals), 1)[0]
    assert rep.fitted_slope == pytest.approx(expect) and rep.passed == (abs(expect - math.log(0.5)) <= 0.05)


@pytest.mark.parametrize("ns,vals", [([1, 2, 3], [1, 1, 1]), ([1, 2, 3, 4], [1, 0, 1, 1]), ([1, 3, 2, 4], [1, 1, 1, 1])])
def test_regression_degenerate(ns, vals):
    with pytest.raises(DegenerateInput):
        asy.rate_regression(ns, vals, 0.0, 0.1)


def test_report_json_round_trip():
    rep = asy.rate_regression([1, 2, 3, 4], [0.5, 0.25, 0.125, 0.0625], math.log(0.5), 0.01)
    data = json.loads(rep.to_json())
    assert set(data) == {"schema_version", "kind", "ns", "values", "fitted_slope", "predicted_slope", "tol", "pass"}
    assert asy.RateReport.from_dict(data) == rep


def test_trend_and_stabilization_reports():
    assert asy.trend_report([1, 2, 3], [3, 2, 1]).passed
    assert not asy.trend_report([1, 2, 3], [3, 4, 1]).passed
    assert asy.stabilization_report([1, 2], [1.1, 1.0], 0.2).passed
    assert not asy.stabilization_report([1, 2], [2.0, 1.0], 0.2).passed


# -- contour machinery ----------------------------------------------------------


def test_contour_orthogonality_seed():
    for k in range(11):
        for n in range(11):
            val, _ = asy.circle_integral(lambda t: t ** (k - n - 1), 64)
            assert abs(val - (k == n)) <= 1e-14


# -- Carleman region --------------------------------------------------------------


def test_carleman_disk_exact(disk_set):
    d = disk_set.domain
    for n in range(13):
        assert asy.h_n_deviation(d, disk_set, n, 1.3, 32) <= 1e-10


def test_carleman_coarse_bound_on_L1():
    p5 = ortho.closed_form_lemniscate(LEM, 5)
    oset = ortho.gram_cholesky_orthonormalize(LEM, 5, 192)
    for z in geo.level_curve(LEM, 1.0, 32):
        assert abs(oset[5](z) / asy.carleman_approx(LEM, 5, z) - 1) <= 1
        assert abs(p5(z) / asy.carleman_approx(LEM, 5, z) - 1) <= 1


def test_carleman_ratio_at_infinity(chol30):
    n = 7
    target = chol30.kappas[n] / (math.sqrt(n + 1) * LEM.cap ** (n + 1))
    devs = [abs(asy.eval_poly(chol30[n], x) / asy.carleman_approx(LEM, n, x) - target) for x in (1e2, 1e4)]
    assert devs[1] < devs[0] and devs[1] < 1e-6


def test_carleman_rejects_interior():
    with pytest.raises(DomainError):
        asy.carleman_approx(LEM, 5, 0.3)


def test_h_n_geometric_envelope(chol30):
    # same-lane values drop by at least rho**3 ~ 0.36 per step of 3, up to a tolerance factor
    for lane in (range(6, 31, 3), range(7, 31, 3)):
        vals = [asy.h_n_deviation(LEM, chol30, n, 1.0, 64) for n in lane]
        assert all(b < a for a, b in zip(vals, vals[1:]))
    exact = [asy.h_n_deviation(LEM, chol30, n, 1.0, 64) for n in range(8, 31, 3)]
    assert max(exact) <= 1e-12


def test_h_n_rate(chol30):
    rep = checks.carleman_rate(LEM, chol30, range(10, 31))
    assert rep.passed, rep


def test_kappa_model():
    assert asy.kappa_model(geo.disk(2.0), 4) == pytest.approx(math.sqrt(5) / 32, rel=1e-15)
    assert asy.kappa_model(LEM, 2) == pytest.approx(math.sqrt(3) * 1.4**-3, rel=1e-15)


def test_kappa_envelope(chol30):
    assert abs(chol30.kappas[10] / asy.kappa_model(LEM, 10) - 1) <= 10 * LEM.rho**20
    assert abs(chol30.kappas[2] / asy.kappa_model(LEM, 2) - 1) <= 1e-15


# -- integral representation --------------------------------------------------------


def test_integral_representation_disk():
    assert abs(asy.integral_representation(DISK, 2, 0.0)) <= 1e-15
    assert asy.integral_representation(DISK, 0, 0.5) == pytest.approx(1.0, abs=1e-14)


def test_integral_representation_exact_polynomial():
    p5 = ortho.closed_form_lemniscate(LEM, 5)
    val = asy.integral_representation(LEM, 5, 0.3)
    assert abs(val - p5(0.3)) <= math.sqrt(6) * (0.85 * LEM.rho) ** 5


def test_integral_representation_domain():
    with pytest.raises(DomainError):
        asy.integral_representation(LEM, 5, geo.level_curve(LEM, 1.0, 8)[0])
    with pytest.raises(ValueError):
        asy.integral_representation(LEM, 5, 0.3, m_nodes=64)


def test_epsilon_disk(disk_set):
    for n in (0, 3, 8):
        assert abs(asy.epsilon_n(disk_set.domain, disk_set, n, 0.4 + 0.2j)) <= 1e-12


def test_epsilon_rate(chol30):
    # the n = 2 (mod 3) lane is identically zero and carries no rate information
    rep = checks.thm3_rate(LEM, chol30, range(8, 25))
    assert rep.fitted_slope < math.log(0.85 * LEM.rho)


def test_epsilon_fixed_point_envelope(chol30):
    vals = {n: abs(asy.epsilon_n(LEM, chol30, n, 0.3)) for n in (10, 15, 20, 25)}
    assert vals[10] > vals[15] > max(vals[20], vals[25])
    assert vals[20] <= 1e-13  # exact lane


# -- corner expansions ------------------------------------------------------------------


def test_corner_phase_lattice_vanishing():
    pts = checks.sample_G_rho(LEM, 20)
    for n in range(5, 40):
        if n % 3 != 1:
            assert np.max(np.abs(asy.corner_leading_term(LEM, n, pts))) <= 1e-12
        else:
            assert np.min(np.abs(asy.corner_leading_term(LEM, n, pts))) > 0


def test_corner_leading_term_errors():
    with pytest.raises(DomainError):
        asy.corner_leading_term(DISK, 4, 0.1)
    with pytest.raises(DomainError):
        asy.corner_leading_term(LEM, 4, 2.0)
    with pytest.raises(DomainError):
        asy.corner_leading_term(LEM, 4, 1e-5)


def test_corner_model_converges_inside_petal(chol30):
    # at z = 1 (centre of a petal) the relative error of the corner model decreases
    vals = [abs(asy.eval_poly(chol30[n], 1.0) / asy.corner_leading_term(LEM, n, 1.0) - 1) for n in (10, 13, 16, 19, 22)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_prefactor_log_form_stability():
    lam = 1 / 3
    for n in range(0, 101, 5):
        with mpmath.workdps(40):
            direct = mpmath.sqrt(n + 1) * mpmath.binomial(n, -mpmath.mpf(lam) - 1) * mpmath.mpf(LEM.rho) ** (n + 1 + lam)
        assert asy.corner_prefactor(n, lam, LEM.rho) == pytest.approx(float(direct), rel=1e-12)


def test_near_boundary_improves_on_carleman(chol30):
    z = geo.exterior_map(LEM, 0.9 * np.exp(0.3j))
    for n in (19, 22):  # the n = 1 (mod 3) lane carries the corner correction
        p = asy.eval_poly(chol30[n], z)
        assert abs(p - asy.near_boundary_approx(LEM, n, z)) < abs(p - asy.carleman_approx(LEM, n, z))


def test_near_boundary_reduces_to_carleman():
    z = geo.exterior_map(LEM, 0.9 * np.exp(0.3j))
    for n in (20, 21):
        assert asy.near_boundary_approx(LEM, n, z) == pytest.approx(asy.carleman_approx(LEM, n, z), rel=1e-12)
    assert asy.near_boundary_approx(geo.disk(2.0), 5, 1.5) == pytest.approx(ortho.closed_form_disk(geo.disk(2.0), 5)(1.5))


def test_near_boundary_region():
    with pytest.raises(DomainError):
        asy.near_boundary_approx(LEM, 5, 0.05 * np.exp(0.3j) + 0.0)
    with pytest.raises(DomainError):
        asy.near_boundary_approx(LEM, 5, 3.0)


def test_corner_value_model_structure():
    n = 10
    expect = 0j
    for c in LEM.corners:
        expect += np.exp(1j * (n + 2 / 3) * c.theta) / c.A
    pref = math.sqrt(11) * float(special.gen_binomial(10, 1 / 3 - 1)) * LEM.rho ** (11 - 1 / 3)
    assert asy.corner_value_model(LEM, n, 0) == pytest.approx(pref * expect, rel=1e-12, abs=1e-30)
    with pytest.raises(DomainError):
        asy.corner_value_model(DISK, 4, 0)


def test_corner_value_ratio_decreasing(chol30):
    # P_n(0) vanishes unless n = 0 (mod 3); the ratio is taken on that lane
    vals = [abs(asy.eval_poly(chol30[n], 0.0) / asy.corner_value_model(LEM, n, 0) - 1) for n in range(9, 31, 3)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    for n in (10, 20):
        assert asy.eval_poly(chol30[n], 0.0) == 0
        assert abs(asy.corner_value_model(LEM, n, 0)) <= 1e-12 * abs(asy.corner_value_model(LEM, n - n % 3, 0))


# -- lemniscate interior expansion ------------------------------------------------------


def test_interior_model_uses_corner_derivative_constant():
    first, _ = asy.lemniscate_interior_constants(LEM, 1, 0.3)
    c1 = 3 ** (4 / 3) / (1 * math.gamma(-1 / 3))
    assert first == pytest.approx(c1 * complex(geo.kernel_L_zeta_deriv_at_zero(LEM, 0, 0.3)), rel=1e-14)


def test_interior_model_matches_corner_model():
    for z in (0.3, 0.25 + 0.1j, 1.0):
        model, _ = asy.lemniscate_interior_model(LEM, 16, z)
        assert model == pytest.approx(asy.corner_leading_term(LEM, 16, z), rel=1e-10)


@pytest.mark.parametrize("l", [0, 1])
def test_interior_second_order_constant(chol30, l):
    # n * |LHS - first| approaches |n R_n| at the petal centre z = 1
    n = {0: 27, 1: 25}[l]
    _, second = asy.lemniscate_interior_model(LEM, n, 1.0)
    dev = checks.thm4b_deviation(LEM, chol30, n, 1.0)
    assert dev == pytest.approx(abs(second), rel=0.2)


def test_interior_model_errors():
    with pytest.raises(RangeError):
        asy.lemniscate_interior_model(LEM, 5, 0.3)
    with pytest.raises(DomainError):
        asy.lemniscate_interior_model(DISK, 4, 0.3)
    with pytest.raises(DomainError):
        asy.lemniscate_interior_model(LEM, 4, 2.0)


def test_gamma_pole_in_second_constant_surfaces():
    # Gamma((1 + l - 2s)/s) is finite for every 0 <= l <= s-2; no silent limit is taken
    for s in (2, 3, 4, 5):
        for l in range(s - 1):
            x = (1 + l - 2 * s) / s
            assert abs(x - round(x)) > 1e-9
            assert math.isfinite(float(special.gamma(x)))


def test_disk_degeneracy(disk_set):
    d = disk_set.domain
    for n in range(1, 13):
        assert abs(asy.eval_poly(disk_set[n], 1.2) / asy.near_boundary_approx(d, n, 1.2) - 1) <= 1e-10
        assert abs(asy.eval_poly(disk_set[n], 0.7) / asy.carleman_approx(d, n, 0.7) - 1) <= 1e-10

"""Acceptance criteria 1-10, each checked at its stated tolerance.

Every test records one ``CRITERION k: PASS|FAIL ...`` line (printed in the
terminal summary) and then asserts the criterion.
"""
import cmath
import math
import time

import numpy as np
import pytest

from carleman import asymptotics as asy
from carleman import checks, ortho, special, zeros
from carleman import geometry as geo

from .conftest import ACCEPTANCE_LINES

LEM = geo.lemniscate(3, 1.4)


def report(k, ok, detail):
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def rel_coeff_err(p, q):
    a, b = p.as_complex(), q.as_complex()
    n = max(a.size, b.size)
    a, b = np.pad(a, (0, n - a.size)), np.pad(b, (0, n - b.size))
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def test_criterion_01_exact_closed_forms():
    start = time.perf_counter()
    worst = 0.0
    for s in (2, 3):
        for R in (1.2, 1.4):
            d = geo.lemniscate(s, R)
            oset = ortho.gram_cholesky_orthonormalize(d, 29, 256)
            for n in range(s - 1, 30, s):
                worst = max(worst, rel_coeff_err(oset[n], ortho.closed_form_lemniscate(d, n)))
    elapsed = time.perf_counter() - start
    report(1, worst <= 1e-8 and elapsed <= 60, f"max rel coeff err {worst:.2e} (<= 1e-8), {elapsed:.1f} s (<= 60 s)")


def test_criterion_02_disk_exactness():
    start = time.perf_counter()
    d = geo.disk(2.0)
    engines = {"cholesky": ortho.gram_cholesky_orthonormalize(d, 20, 128), "arnoldi": ortho.arnoldi_orthonormalize(d, 20)}
    errs = {}
    for name, oset in engines.items():
        errs[name] = 0.0
        for n in range(21):
            c = oset[n].as_complex()
            exact = np.zeros(n + 1, complex)
            exact[n] = math.sqrt(n + 1) / 2 ** (n + 1)
            errs[name] = max(errs[name], float(np.max(np.abs(c - exact)) / exact[n].real))
    elapsed = time.perf_counter() - start
    ok = max(errs.values()) <= 1e-10 and elapsed <= 5
    report(2, ok, f"cholesky {errs['cholesky']:.1e}, arnoldi {errs['arnoldi']:.1e} (<= 1e-10), {elapsed:.2f} s (<= 5 s)")


def test_criterion_03_orthonormality():
    start = time.perf_counter()
    oset = ortho.gram_cholesky_orthonormalize(LEM, 25, 256)
    rule = ortho.make_area_rule(LEM, 120, 320)  # pulled-back tensor rule, not the boundary moments
    resid = ortho.gram_residual(oset, rule)
    elapsed = time.perf_counter() - start
    report(3, resid <= 1e-8 and elapsed <= 120, f"Gram residual {resid:.2e} (<= 1e-8), {elapsed:.1f} s (<= 120 s)")


def test_criterion_04_carleman_rate(chol30):
    rep = checks.carleman_rate(LEM, chol30, range(10, 31), r=1.0, m=64, tol=0.15)
    report(4, rep.passed, f"slope {rep.fitted_slope:.4f} vs log(1/1.4) = {rep.predicted_slope:.4f} +- 0.15 "
                          f"(n = 2 mod 3 excluded: h_n = 0 exactly)")


def test_criterion_05_representation_error_rate(chol30):
    rep = checks.thm3_rate(LEM, chol30, range(8, 25), r=0.85, m=64, tol=0.2)
    report(5, rep.passed, f"slope {rep.fitted_slope:.4f} vs log(0.85/1.4) = {rep.predicted_slope:.4f} +- 0.2 "
                          f"(n = 2 mod 3 excluded: eps_n = 0 exactly)")


def test_criterion_06_corner_dichotomy(chol30):
    pts = checks.sample_G_rho(LEM, 20)
    vanish = checks.thm1_vanishing(LEM, range(5, 40), pts, tol=1e-12)
    trend = checks.thm1_trend(LEM, chol30, [13, 16, 19, 22], z=0.3)
    ratios = ", ".join(f"{v:.3f}" for v in trend.values)
    report(6, vanish.passed and trend.passed,
           f"vanishing max {max(vanish.values):.1e} (<= 1e-12) {'ok' if vanish.passed else 'FAIL'}; "
           f"|P_n(0.3)/model - 1| at n=13,16,19,22: {ratios} ({'decreasing' if trend.passed else 'not decreasing'})")


def test_criterion_07_interior_expansion(chol30):
    results = []
    ok = True
    for z in (0.3, 0.5 * cmath.exp(1j * math.pi / 5)):
        for l, ns in ((0, [12, 24]), (1, [13, 25])):
            rep = checks.thm4b_stabilization(LEM, chol30, ns, z, tol=0.2, check_domain=False)
            ok &= rep.passed
            results.append(f"z={z:.3f} l={l}: {rep.values[0]:.3g}->{rep.values[1]:.3g}")
    h = 1e-5
    fd_errs = []
    for j in (0, 1):
        if j == 0:
            fd = geo.kernel_L(LEM, 0.0, 0.3)
        else:
            fd = (geo.kernel_L(LEM, h, 0.3) - geo.kernel_L(LEM, -h, 0.3)) / (2 * h)
        exact = geo.kernel_L_zeta_deriv_at_zero(LEM, j, 0.3)
        fd_errs.append(abs(exact - fd) / abs(fd))
    ok &= max(fd_errs) <= 1e-6
    report(7, ok, f"n*|dev| {'; '.join(results)} (within 20%); closed-form kernel derivatives vs finite difference {max(fd_errs):.1e} (<= 1e-6)")


def test_criterion_08_zeros(chol61, tmp_path):
    p59 = ortho.closed_form_lemniscate(LEM, 59, 1024)
    z59 = zeros.find_roots(p59, 1024)
    unity = [cmath.exp(2j * math.pi * k / 3) for k in range(3)]
    exact_ok = z59.count_within(0, 1e-9) == 2 and all(z59.count_within(a, 1e-9) == 19 for a in unity)

    z60 = zeros.find_roots(chol61[60], 384)
    band = np.abs(np.abs(z60.roots**3 - 1) - 1)
    outside = int(np.sum(band > 0.25))
    z60.to_csv(tmp_path / "zeros_n60.csv")  # scatter data for plotting; qualitative only

    mu = geo.equilibrium_measure(LEM, 2048)
    lane = list(range(15, 31, 3))
    disc = [zeros.moment_discrepancy(zeros.counting_measure(zeros.find_roots(chol61[n], 384)), mu, 6) for n in lane]
    trend_ok = all(b < a for a, b in zip(disc, disc[1:]))
    report(8, exact_ok and outside == 0 and trend_ok,
           f"P_59 fixed zeros {'ok' if exact_ok else 'FAIL'}; P_60 roots outside band: {outside}/60 "
           f"(max ||z^3-1|-1| = {band.max():.3f}); discrepancy n=15..30: {disc[0]:.4f}->{disc[-1]:.4f} "
           f"({'decreasing' if trend_ok else 'not decreasing'})")


def test_criterion_09_potential_identity():
    mu = geo.equilibrium_measure(LEM, 2048)
    pts = geo.level_curve(LEM, 1.3, 20)
    dist = min(float(np.min(np.abs(mu.points - z))) for z in pts)
    err = max(abs(mu.log_potential(z) - geo.equilibrium_potential(LEM, z)) for z in pts)
    report(9, err <= 1e-6 and dist >= 0.3, f"max |U_quad - U| = {err:.2e} (<= 1e-6), min dist to L_rho {dist:.2f}")


def test_criterion_10_special_functions():
    rng = np.random.default_rng(2024)
    xs = []
    while len(xs) < 200:
        x = rng.uniform(-5, 5)
        if abs(x - round(x)) >= 1e-3:
            xs.append(x)
    refl = max(abs(float(special.gamma(1 - x)) * float(special.gamma(x)) * math.sin(math.pi * x) / math.pi - 1) for x in xs)
    rec = max(abs(float(special.gamma(x + 1, prec=80) / (x * special.gamma(x, prec=80))) - 1) for x in xs)
    ints = all(int(special.gen_binomial(n, k)) == math.comb(n, k) for n in range(31) for k in range(n + 1))
    logcons = 0.0
    for a, b in [(200, -1.5), (50, -4 / 3), (10, 2.5), (7.5, -0.25)]:
        lv, sign = special.log_abs_gen_binomial(a, b, prec=96)
        logcons = max(logcons, abs(sign * math.exp(float(lv)) / float(special.gen_binomial(a, b, prec=96)) - 1))
    scaling = True
    for lam in (1 / 3, 1 / 2, 2 / 3):
        r3, r4 = (float(special.gen_binomial(n, -lam - 1, prec=80)) * float(special.gamma(-lam)) * n ** (lam + 1)
                  for n in (10**3, 10**4))
        scaling &= abs(r3 - 1) <= 0.02 and abs(r4 - 1) <= 0.02 and abs(r4 - 1) < abs(r3 - 1)
    worst = max(refl, rec, logcons)
    report(10, worst <= 1e-12 and ints and scaling,
           f"reflection {refl:.1e}, recurrence {rec:.1e}, log-binomial {logcons:.1e} (<= 1e-12); "
           f"integer binomials {'exact' if ints else 'FAIL'}; scaling {'ok' if scaling else 'FAIL'}")

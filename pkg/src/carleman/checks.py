"""Measured versions of the asymptotic claims, shared by the CLI and the acceptance suite.

Each check returns a :class:`~carleman.asymptotics.RateReport`.  On the
lemniscate the degrees ``n = s - 1 (mod s)`` are exact closed forms for which
the Carleman deviation and the integral-representation error vanish
identically; their logarithm is undefined and only round-off would be fitted,
so slope checks skip that residue class.
"""
import math

import gmpy2
import numpy as np

from . import asymptotics as asy
from . import geometry as geo
from ._prec import mpf, workprec

EXACT_TOL = 1e-10


def exact_lane(d, n):
    return d.kind == "lemniscate" and n % d.s == d.s - 1


def _fit_lanes(d, ns):
    return [n for n in ns if not exact_lane(d, n)]


def carleman_rate(d, oset, ns, r=1.0, m=64, tol=0.15):
    """``sup_{L_r} |h_n|`` against the predicted rate ``(rho / r)**n``."""
    if d.rho == 0:
        return asy.exact_report(ns, [asy.h_n_deviation(d, oset, n, r, m) for n in ns], EXACT_TOL)
    fit = _fit_lanes(d, ns)
    values = [asy.h_n_deviation(d, oset, n, r, m) for n in fit]
    return asy.rate_regression(fit, values, math.log(d.rho / r), tol)


def epsilon_sup(d, oset, n, r=0.85, m=64):
    pts = geo.level_curve(d, r, m)
    return max(abs(asy.epsilon_n(d, oset, n, z)) for z in pts)


def thm3_rate(d, oset, ns, r=0.85, m=64, tol=0.2):
    """``sup_{L_r} |eps_n|`` against the predicted rate ``(r rho)**n``."""
    if d.rho == 0:
        return asy.exact_report(ns, [epsilon_sup(d, oset, n, r, m) for n in ns], EXACT_TOL)
    fit = _fit_lanes(d, ns)
    values = [epsilon_sup(d, oset, n, r, m) for n in fit]
    return asy.rate_regression(fit, values, math.log(r * d.rho), tol)


def sample_G_rho(d, count=20):
    """Deterministic points of ``G_rho`` away from the corners (lemniscate petals)."""
    s = d.s
    pts = []
    radii = np.linspace(0.35, 1.15, 5)
    offsets = np.linspace(-0.25, 0.25, count // 5 if count >= 5 else 1) * (math.pi / s)
    k = 0
    while len(pts) < count:
        for rad in radii:
            for off in offsets:
                z = rad * np.exp(1j * (2 * math.pi * (k % s) / s + off))
                if asy._in_G_rho(d, z) and abs(z) > 0.1:
                    pts.append(complex(z))
                if len(pts) == count:
                    return np.array(pts)
        k += 1
        if k > 10 * s:
            break
    return np.array(pts)


def thm1_vanishing(d, ns, points, tol=1e-12):
    """``max |corner_leading_term|`` over ``points`` for degrees whose phase sum cancels."""
    lane = [n for n in ns if n % d.s != d.s - 2]
    values = [float(np.max(np.abs(asy.corner_leading_term(d, n, points)))) for n in lane]
    return asy.exact_report(lane, values, tol)


def thm1_trend(d, oset, ns, z=0.3):
    """``|P_n(z) / model - 1|`` on the non-vanishing lane must decrease."""
    lane = [n for n in ns if n % d.s == d.s - 2]
    values = [abs(asy.eval_poly(oset[n], z) / asy.corner_leading_term(d, n, z) - 1) for n in lane]
    return asy.trend_report(lane, values)


def thm4b_deviation(d, oset, n, z, check_domain=True):
    """``n * |LHS(n) - first-order constant|`` for the lemniscate interior expansion."""
    model, _ = asy.lemniscate_interior_model(d, n, z, check_domain)
    lhs = asy.lemniscate_lhs_factor(d, n) * asy.eval_poly(oset[n], z)
    first = model * asy.lemniscate_lhs_factor(d, n)
    return n * abs(lhs - first)


def thm4b_stabilization(d, oset, ns, z, tol=0.2, check_domain=True):
    values = [thm4b_deviation(d, oset, n, z, check_domain) for n in ns]
    return asy.stabilization_report(ns, values, tol)


def kappa_rate(d, oset, ns, tol=0.3):
    """``|kappa_n / (sqrt(n+1) cap**(n+1)) - 1|`` against the rate ``rho**(2n)``."""

    def dev(n):
        with workprec(oset.precision_bits + 16):
            model = gmpy2.sqrt(mpf(n + 1)) / mpf(d.R) ** (n + 1)  # cap = 1/R for both families
            return float(abs(gmpy2.mpfr(oset.kappas[n]) / model - 1))

    if d.rho == 0:
        return asy.exact_report(ns, [dev(n) for n in ns], EXACT_TOL)
    fit = _fit_lanes(d, ns)
    return asy.rate_regression(fit, [dev(n) for n in fit], 2 * math.log(d.rho), tol)

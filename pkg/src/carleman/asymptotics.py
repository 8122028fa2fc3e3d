"""Asymptotic models for P_n and measured deviations from them.

Every model returns the predicted value of ``P_n(z)`` (or of a normalized
quantity) so that callers can compare with polynomials from :mod:`ortho`.
Large/small prefactors such as ``binom(n, -lam-1) * rho**(n+1+lam)`` are
assembled in log space and exponentiated once.
"""
import json
import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from . import special
from .errors import ConvergenceError, DegenerateInput, DomainError, RangeError

REGION_MARGIN = 1e-3
CORNER_CLEARANCE = 1e-3
NEAR_BOUNDARY_CLEARANCE = 0.1


@dataclass(frozen=True)
class RateReport:
    """Outcome of one measured asymptotic claim.

    ``kind`` selects the pass rule:

    * ``"slope"``: ``|fitted_slope - predicted_slope| <= slope_tolerance``;
    * ``"exact"``: every value ``<= slope_tolerance`` (slopes are ``None``);
    * ``"trend"``: values strictly decreasing in ``n``;
    * ``"stabilization"``: ``|v_last - v_first| <= slope_tolerance * |v_last|``.
    """

    ns: list
    values: list
    fitted_slope: float
    predicted_slope: float
    slope_tolerance: float
    passed: bool
    kind: str = "slope"

    def to_dict(self):
        return {
            "schema_version": 1,
            "kind": self.kind,
            "ns": list(self.ns),
            "values": [float(v) for v in self.values],
            "fitted_slope": self.fitted_slope,
            "predicted_slope": self.predicted_slope,
            "tol": self.slope_tolerance,
            "pass": self.passed,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        return cls(list(data["ns"]), list(data["values"]), data["fitted_slope"],
                   data["predicted_slope"], data["tol"], data["pass"], data.get("kind", "slope"))


def _check_series(ns, values, minimum):
    ns = [int(n) for n in ns]
    values = [float(v) for v in values]
    if len(ns) != len(values):
        raise DegenerateInput("ns and values differ in length")
    if len(ns) < minimum:
        raise DegenerateInput(f"need at least {minimum} samples")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DegenerateInput("ns must be strictly increasing")
    return ns, values


def rate_regression(ns, values, predicted_slope, tol):
    """Least-squares slope of ``log(values)`` against ``ns``."""
    ns, values = _check_series(ns, values, 4)
    if any(not v > 0 for v in values):
        raise DegenerateInput("rate_regression needs strictly positive values")
    slope = float(np.polyfit(np.array(ns, float), np.log(values), 1)[0])
    passed = abs(slope - predicted_slope) <= tol
    return RateReport(ns, values, slope, float(predicted_slope), float(tol), bool(passed))


def exact_report(ns, values, tol):
    ns, values = _check_series(ns, values, 1)
    return RateReport(ns, values, None, None, float(tol), bool(max(values) <= tol), "exact")


def trend_report(ns, values):
    ns, values = _check_series(ns, values, 2)
    passed = all(b < a for a, b in zip(values, values[1:]))
    slope = None
    if all(v > 0 for v in values):
        slope = float(np.polyfit(np.array(ns, float), np.log(values), 1)[0])
    return RateReport(ns, values, slope, None, 0.0, bool(passed), "trend")


def stabilization_report(ns, values, tol):
    ns, values = _check_series(ns, values, 2)
    first, last = values[0], values[-1]
    passed = abs(last - first) <= tol * abs(last)
    return RateReport(ns, values, None, None, float(tol), bool(passed), "stabilization")


# -- helpers -----------------------------------------------------------------


def eval_poly(p, z):
    """Evaluate at the polynomial's own precision, returning complex / complex array."""
    if p.prec <= 53:
        return p(z)
    arr = np.asarray(z, dtype=complex)
    flat = np.array([complex(p.eval_mp(complex(v))) for v in arr.ravel()])
    return complex(flat[0]) if arr.ndim == 0 else flat.reshape(arr.shape)


def _in_G_rho(d, z):
    return np.all(geo.level(d, z) <= d.rho * (1 - REGION_MARGIN))


def _corner_data(d):
    if not d.corners:
        raise DomainError(f"{d} has no corners")
    return geo.minimal_corners(d)


def corner_prefactor(n, lam, rho):
    """``sqrt(n+1) * binom(n, -lam-1) * rho**(n+1+lam)`` evaluated in log form."""
    logb, sign = special.log_abs_gen_binomial(n, -lam - 1)
    if sign == 0:
        return 0.0
    return sign * math.exp(0.5 * math.log(n + 1) + float(logb) + (n + 1 + lam) * math.log(rho))


def _corner_sum(d, corners, n, z):
    """``sum_k L(z_k, z) A_k exp(i (n+1+lam) Theta_k)``."""
    lam = corners[0].lam
    z = np.asarray(z, dtype=complex)
    total = np.zeros_like(z)
    for c in corners:
        total = total + geo.kernel_L(d, c.z, z) * c.A * np.exp(1j * (n + 1 + lam) * c.theta)
    return total


def _scalar(v):
    return complex(v) if np.ndim(v) == 0 else v


# -- Carleman region ---------------------------------------------------------


def carleman_approx(d, n, z):
    """``sqrt(n+1) * phi'(z) * phi(z)**n`` on ``Omega_rho``."""
    z = np.asarray(z, dtype=complex)
    if d.kind == "lemniscate":
        if not np.all(geo.level(d, z) > d.rho):
            raise DomainError("carleman_approx needs z in Omega_rho")
    elif np.any(z == 0):
        raise DomainError("carleman_approx needs z != 0 for the disk")
    phi = geo._phi(d, z, False)
    return _scalar(math.sqrt(n + 1) * geo._dphi(d, z, False) * phi**n)


def h_n_deviation(d, oset, n, r, m):
    """Sampled ``sup |P_n / carleman_approx - 1|`` on the level curve ``L_r``."""
    if not r > d.rho:
        raise DomainError("h_n_deviation needs r > rho")
    pts = geo.level_curve(d, r, m)
    ratio = eval_poly(oset[n], pts) / carleman_approx(d, n, pts)
    return float(np.max(np.abs(ratio - 1)))


def kappa_model(d, n):
    return math.sqrt(n + 1) * d.cap ** (n + 1)


# -- integral representation ------------------------------------------------


def circle_integral(f, m):
    """``(1 / 2 pi i)`` times the contour integral of ``f`` over ``|t| = 1`` (``m``-point trapezoid)."""
    t = np.exp(2j * np.pi * np.arange(m) / m)
    values = f(t) * t
    return complex(np.mean(values)), float(np.mean(np.abs(values)))


def integral_representation(d, n, z, m_nodes=256, tol=1e-11, max_doublings=5):
    """Main term of the interior integral representation of ``P_n(z)``.

    ``sqrt(n+1) phi_int'(z) / (2 pi i) * contour integral over |t| = 1 of
    t**n dt / (phi_int(psi(t)) - phi_int(z))``, by the trapezoid rule with
    node doubling.  Convergence is judged relative to the mean modulus of
    the integrand, which stays meaningful when the integral itself vanishes.
    """
    if m_nodes < 256:
        raise ValueError("integral_representation needs m_nodes >= 256")
    z = complex(z)
    if geo.level(d, z) > 1 - REGION_MARGIN:
        raise DomainError("integral_representation needs z in G_1, at least 1e-3 inside L_1")
    fz = complex(geo._phi_int(d, np.asarray(z), False))
    scale = math.sqrt(n + 1) * complex(geo._dphi_int(d, np.asarray(z), False))

    def trapezoid(m):
        return circle_integral(lambda t: t**n / (geo._phi_int(d, geo._psi(d, t, False), False) - fz), m)

    m = m_nodes
    value, size = trapezoid(m)
    for _ in range(max_doublings):
        m *= 2
        new, size = trapezoid(m)
        if abs(new - value) <= tol * max(abs(new), size):
            return scale * new
        value = new
    raise ConvergenceError(f"integral_representation did not converge with {m} nodes")


def epsilon_n(d, oset, n, z):
    """``P_n(z)`` minus its integral representation."""
    return complex(eval_poly(oset[n], complex(z))) - integral_representation(d, n, z)


# -- corner asymptotics ------------------------------------------------------


def corner_leading_term(d, n, z):
    """Model value of ``P_n(z)`` inside ``G_rho`` from the corner expansion."""
    corners = _corner_data(d)
    z = np.asarray(z, dtype=complex)
    if not _in_G_rho(d, z):
        raise DomainError("corner_leading_term needs z in G_rho")
    for c in corners:
        if np.any(np.abs(z - c.z) < CORNER_CLEARANCE):
            raise DomainError("corner_leading_term needs z away from the corners")
    pref = corner_prefactor(n, corners[0].lam, d.rho)
    return _scalar(-pref * _corner_sum(d, corners, n, z))


def near_boundary_approx(d, n, z):
    """Carleman term plus corner correction in the annulus ``rho < |phi(z)| < 1``."""
    z = np.asarray(z, dtype=complex)
    carleman = math.sqrt(n + 1) * geo._dphi(d, z, False) * geo._phi(d, z, False) ** n
    if d.kind == "disk":
        return _scalar(carleman)
    corners = _corner_data(d)
    lv = geo.level(d, z)
    if not (np.all(lv > d.rho) and np.all(lv < 1)):
        raise DomainError("near_boundary_approx needs rho < |phi(z)| < 1")
    for c in corners:
        if np.any(np.abs(z - c.z) < NEAR_BOUNDARY_CLEARANCE):
            raise DomainError("near_boundary_approx needs z at least 0.1 from every corner")
    pref = corner_prefactor(n, corners[0].lam, d.rho)
    return _scalar(carleman - pref * _corner_sum(d, corners, n, z))


def corner_value_model(d, n, j):
    """Model value of ``P_n`` at the corner ``z_j`` (``j`` indexes ``d.corners`` from 0)."""
    if not d.corners:
        raise DomainError(f"{d} has no corners")
    target = d.corners[j]
    group = [c for c in d.corners if abs(c.z - target.z) < 1e-12]
    lam_star = max(c.lam for c in group)
    top = [c for c in group if abs(c.lam - lam_star) <= 1e-12]
    total = sum(np.exp(1j * (n + 1 - lam_star) * c.theta) / c.A for c in top)
    logb, sign = special.log_abs_gen_binomial(n, lam_star - 1)
    if sign == 0:
        return 0j
    pref = sign * math.exp(0.5 * math.log(n + 1) + float(logb) + (n + 1 - lam_star) * math.log(d.rho))
    return complex(pref * total)


# -- lemniscate interior expansion ------------------------------------------


def lemniscate_lhs_factor(d, n):
    """Factor ``F`` with ``F * P_n(z)`` the normalized left-hand side of the interior expansion."""
    s = d.s
    m, l = divmod(n, s)
    logv = (
        (n + 1) * math.log(d.R)
        + float(special.log_abs_gamma(n + (3 * s - l - 1) / s)[0])
        - float(special.log_abs_gamma(n + 1)[0])
        - 0.5 * math.log(n + 1)
    )
    return (-1) ** m * math.exp(logv)


def lemniscate_interior_constants(d, l, z):
    """First-order constant and ``n R_n`` limit of the normalized expansion at ``z``."""
    s = d.s
    j1, j2 = s - l - 2, 2 * s - l - 2
    D1 = complex(geo.kernel_L_zeta_deriv_at_zero(d, j1, z))
    D2 = geo.kernel_L_taylor(d, j2, z)
    c1 = s ** ((2 * s - l - 1) / s) / (math.factorial(s - l - 1) * float(special.gamma((1 + l - s) / s)))
    c2 = s ** ((s - l - 1) / s) / float(special.gamma((1 + l - 2 * s) / s))
    first = c1 * D1
    # (2s-l-1)! here: with (2s-l-2)! the limit misses the measured n*R_n by a factor ~4
    second = c2 * ((s - 1) / (2 * math.factorial(s - l - 2)) * D1 - s**2 / math.factorial(j2 + 1) * D2)
    return first, second


def lemniscate_interior_model(d, n, z, check_domain=True):
    """Interior expansion of ``P_n(z)`` for the lemniscate.

    Returns ``(model, remainder_scale)``: ``model`` is the first-order
    prediction of ``P_n(z)`` and ``remainder_scale`` the limit of ``n R_n(z)``
    in the normalized (left-hand-side) units.
    """
    if d.kind != "lemniscate":
        raise DomainError("lemniscate_interior_model needs a lemniscate")
    s = d.s
    if n < 0 or n % s == s - 1:
        raise RangeError(f"interior expansion excludes n = {s - 1} mod {s}")
    z = complex(z)
    if check_domain and not _in_G_rho(d, z):
        raise DomainError("lemniscate_interior_model needs z in G_rho")
    first, second = lemniscate_interior_constants(d, n % s, z)
    return first / lemniscate_lhs_factor(d, n), second

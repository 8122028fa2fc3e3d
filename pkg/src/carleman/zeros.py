"""Zeros of P_n and the measures built from them."""
import csv
import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from . import asymptotics as asy
from . import geometry as geo
from ._prec import mpc, workprec
from .errors import DomainError, NoConvergence
from .measures import DiscreteMeasure
from .poly import Poly

STEP_TOL = 1e-14
MAX_SWEEPS = 500
POLISH_STEPS = 3


@dataclass(frozen=True)
class ZeroSet:
    """Roots of a polynomial (with multiplicity) and their backward errors.

    ``residuals[i] = |p(r_i)| / sum_k |c_k| |r_i|**k``: the relative size of
    the perturbation of the coefficients that makes ``r_i`` an exact root.
    """

    roots: np.ndarray
    residuals: np.ndarray
    lead: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "roots", np.asarray(self.roots, dtype=complex))
        object.__setattr__(self, "residuals", np.asarray(self.residuals, dtype=float))

    @property
    def degree(self):
        return self.roots.size

    def reconstruct(self, prec=53):
        return Poly.from_roots(list(self.roots), self.lead, prec)

    def count_within(self, center, radius):
        return int(np.sum(np.abs(self.roots - center) <= radius))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im", "residual"])
            for r, res in zip(self.roots, self.residuals):
                writer.writerow([repr(float(r.real)), repr(float(r.imag)), repr(float(res))])

    @classmethod
    def from_csv(cls, path, lead=1.0):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        roots = [complex(float(r["re"]), float(r["im"])) for r in rows]
        return cls(np.array(roots), np.array([float(r["residual"]) for r in rows]), lead)


# -- Aberth-Ehrlich ----------------------------------------------------------


def _horner_with_derivative(coeffs, z):
    p = coeffs[-1]
    dp = gmpy2.mpc(0)
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _backward_error(coeffs, z):
    az = abs(z)
    den = gmpy2.mpfr(0)
    for c in reversed(coeffs):
        den = den * az + abs(c)
    p, _ = _horner_with_derivative(coeffs, z)
    return float(abs(p) / den) if den else 0.0


def find_roots(p, precision_bits=None):
    """All roots of ``p`` by simultaneous Aberth-Ehrlich iteration.

    Runs at ``precision_bits`` (default: the polynomial's precision, at least
    256) with Gauss-Seidel updates from a circle of radius
    ``1 + max |c_i / c_n|``; stops once every correction satisfies
    ``|dz| <= 1e-14 (1 + |z|)`` and finishes with up to three guarded Newton
    steps per root.  Exactly vanishing low-order coefficients are deflated as exact
    roots at the origin.  Multiple roots converge linearly and are resolved
    only to about ``eps**(1/multiplicity)``, so clusters need generous
    precision.  The stopping rule is absolute near the origin: roots much
    smaller than ``1e-14`` in modulus are located to that absolute accuracy,
    not relative to their size.
    """
    n = p.degree
    if n < 1:
        raise ValueError("find_roots needs degree >= 1")
    bits = max(256, p.prec) if precision_bits is None else int(precision_bits)
    with workprec(bits):
        coeffs = [mpc(c) for c in p.coeffs]
        lead = coeffs[-1]
        zero_roots = 0
        while coeffs[zero_roots] == 0:
            zero_roots += 1
        work = [c / lead for c in coeffs[zero_roots:]]
        roots = [gmpy2.mpc(0)] * zero_roots
        m = len(work) - 1
        if m > 0:
            roots += _aberth(work, m)
        residuals = [_backward_error(coeffs, z) for z in roots]
        out = np.array([complex(z) for z in roots])
    return ZeroSet(out, np.array(residuals), complex(lead))


def _aberth(a, m):
    radius = 1 + max(abs(c) for c in a[:-1])
    two_pi = 2 * gmpy2.const_pi()
    z = [radius * gmpy2.mpc(gmpy2.cos(two_pi * k / m + 0.4), gmpy2.sin(two_pi * k / m + 0.4)) for k in range(m)]
    done = [False] * m
    for _ in range(MAX_SWEEPS):
        for i in range(m):
            if done[i]:
                continue
            pv, dpv = _horner_with_derivative(a, z[i])
            if pv == 0:
                done[i] = True
                continue
            ratio = pv / dpv if dpv != 0 else gmpy2.mpc(1e-3)
            acc = gmpy2.mpc(0)
            zi = z[i]
            for j in range(m):
                if j != i:
                    diff = zi - z[j]
                    if diff != 0:
                        acc += 1 / diff
            step = ratio / (1 - ratio * acc)
            z[i] = zi - step
            if abs(step) <= STEP_TOL * (1 + abs(z[i])):
                done[i] = True
        if all(done):
            break
    else:
        worst = max(_backward_error(a, zi) for zi in z)
        raise NoConvergence(f"Aberth iteration did not converge in {MAX_SWEEPS} sweeps", worst)
    return [_newton_polish(a, zi) for zi in z]


def _newton_polish(a, z, steps=POLISH_STEPS):
    # each step is kept only if it lowers |p|; a second step matters for roots far below 1e-14
    pv, dpv = _horner_with_derivative(a, z)
    for _ in range(steps):
        if pv == 0 or dpv == 0:
            break
        cand = z - pv / dpv
        pc, dpc = _horner_with_derivative(a, cand)
        if not abs(pc) < abs(pv):
            break
        z, pv, dpv = cand, pc, dpc
    return z


# -- measures ----------------------------------------------------------------


def counting_measure(zs):
    if zs.degree < 1:
        raise ValueError("counting measure needs at least one root")
    return DiscreteMeasure.uniform(zs.roots)


def moment_discrepancy(a, b, K):
    """``max_{1<=k<=K} |int z**k da - int z**k db|``."""
    if K < 1:
        raise ValueError("K must be positive")
    return max(abs(a.moment(k) - b.moment(k)) for k in range(1, K + 1))


@dataclass(frozen=True)
class ZeroFreeReport:
    violations: list
    supported: bool = True


def zero_free_check(d, zs, region, param):
    """Roots contradicting a zero-free region.

    ``region`` is ``"omega_rho_minus_corner_disks"`` (``param`` = corner disk
    radius) or ``"compact_in_G_rho"`` (``param`` = margin; lemniscate only:
    roots with ``|z**s - 1| <= 1 - margin``).  Regions that degenerate for
    ``d`` are reported with ``supported=False`` and no violations.
    """
    if not param > 0:
        raise ValueError("region parameter must be positive")
    if d.rho == 0:
        return ZeroFreeReport([], False)
    roots = zs.roots
    if region == "omega_rho_minus_corner_disks":
        in_closure = geo.level(d, roots) >= d.rho * (1 - 1e-12)
        far = np.ones(roots.size, bool)
        for c in d.corners:
            far &= np.abs(roots - c.z) > param
        bad = roots[in_closure & far]
    elif region == "compact_in_G_rho":
        if d.kind != "lemniscate":
            return ZeroFreeReport([], False)
        bad = roots[np.abs(roots**d.s - 1) <= 1 - param]
    else:
        raise ValueError(f"unknown region {region!r}")
    return ZeroFreeReport([complex(r) for r in bad], True)


# -- limit functions ---------------------------------------------------------


def _theta_fractions(corners):
    theta1 = corners[0].theta
    out = []
    for c in corners:
        frac = ((c.theta - theta1) / (2 * math.pi)) % 1.0
        out.append(1.0 if frac == 0 else frac)
    return out


def _check_corner_point(d, z):
    corners = asy._corner_data(d)
    if not asy._in_G_rho(d, z):
        raise DomainError("z must lie in G_rho")
    for c in corners:
        if np.any(np.abs(np.asarray(z) - c.z) < asy.CORNER_CLEARANCE):
            raise DomainError("z must stay away from the corners")
    return corners


def limit_function_eval(d, phases, z):
    """``sum_k L(z_k, z) A_hat_k exp(2 pi i gamma_k)`` with caller-supplied phases ``gamma_k``."""
    z = np.asarray(z, dtype=complex)
    corners = _check_corner_point(d, z)
    if len(phases) != len(corners):
        raise ValueError(f"expected {len(corners)} phases, got {len(phases)}")
    total = np.zeros_like(z)
    for c, g in zip(corners, phases):
        total = total + geo.kernel_L(d, c.z, z) * c.A_hat * np.exp(2j * math.pi * g)
    return asy._scalar(total)


def h_n_eval(d, n, z):
    """``H_n(z)``: the limit function with phases ``n * theta_k``."""
    corners = geo.minimal_corners(d) if d.corners else asy._corner_data(d)
    return limit_function_eval(d, [n * t for t in _theta_fractions(corners)], z)


def p_star(d, p, n, z):
    """``-P_n(z) / (sqrt(n+1) binom(n, -lam-1) omega_1**(n+1+lam))``."""
    corners = asy._corner_data(d)
    c1 = corners[0]
    pref = asy.corner_prefactor(n, c1.lam, d.rho) * np.exp(1j * (n + 1 + c1.lam) * c1.theta)
    return asy._scalar(-asy.eval_poly(p, z) / pref)

"""Area-orthonormal (Carleman) polynomials of a domain.

Two independent engines are provided:

* :func:`gram_cholesky_orthonormalize` builds the Gram matrix of the monomials
  from boundary-reduced area moments in extended precision and inverts its
  Cholesky factor.
* :func:`arnoldi_orthonormalize` runs Arnoldi with full re-orthogonalization
  on the nodes of a double-precision area quadrature rule.

The inner product is ``<p, q> = (1/pi) * integral over G_1 of p conj(q) dA``.
"""
import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from . import geometry as geo
from ._prec import mpc, mpf, workprec
from .errors import ConvergenceError, DomainError, NotPositiveDefinite, RangeError, RankDeficiency
from .poly import Poly

MOMENT_START_NODES = 256
MOMENT_MAX_NODES = 4096


def default_precision(N):
    if N <= 40:
        return 256
    if N <= 70:
        return 384
    return 384 + 8 * (N - 70)


@dataclass(frozen=True)
class OrthonormalSet:
    domain: geo.DomainSpec
    polys: tuple
    kappas: tuple
    precision_bits: int
    engine: str

    @property
    def N(self):
        return len(self.polys) - 1

    def __getitem__(self, n):
        return self.polys[n]

    def to_dict(self):
        return {
            "schema_version": 1,
            "domain": self.domain.to_dict(),
            "precision_bits": self.precision_bits,
            "engine": self.engine,
            "polys": [p.to_pairs() for p in self.polys],
            "kappas": [float(k) for k in self.kappas],
        }

    @classmethod
    def from_dict(cls, data):
        bits = int(data["precision_bits"])
        polys = tuple(Poly.from_pairs(pairs, bits) for pairs in data["polys"])
        kappas = tuple(float(p.leading.real) for p in polys)
        return cls(geo.DomainSpec.from_dict(data["domain"]), polys, kappas, bits, data["engine"])


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    target: str = "area_G1"

    @property
    def total(self):
        return float(np.sum(self.weights))

    def inner(self, f, g):
        return complex(np.sum(self.weights * f * np.conj(g)))


# -- moments -----------------------------------------------------------------


def _node_count_schedule(d):
    step = d.symmetry if d.symmetry else 1
    m = step
    while m < MOMENT_START_NODES:
        m *= 2
    out = [m]
    while out[-1] < MOMENT_MAX_NODES:
        out.append(out[-1] * 2)
    return out


def _sector_sums(d, pairs, m_total, node_ids, bits):
    """Unnormalised trapezoid sums of z^j conj(z)^(k+1) psi'(t) t over the given nodes."""
    kmax = max(k for _, k in pairs) + 1
    jmax = max(j for j, _ in pairs)
    with workprec(bits):
        two_pi = 2 * gmpy2.const_pi()
        acc = {pair: gmpy2.mpc(0) for pair in pairs}
        for q in node_ids:
            ang = two_pi * q / m_total
            t = gmpy2.mpc(gmpy2.cos(ang), gmpy2.sin(ang))
            z = geo._psi(d, t, True)
            weight = _dpsi_mp(d, t, z) * t
            zc = z.conjugate()
            zp = [gmpy2.mpc(1)]
            for _ in range(jmax):
                zp.append(zp[-1] * z)
            cp = [zc]
            for _ in range(kmax - 1):
                cp.append(cp[-1] * zc)
            for j, k in pairs:
                acc[j, k] += zp[j] * cp[k] * weight
    return acc


def _dpsi_mp(d, t, z):
    c = geo._consts(d, True)
    if d.kind == "disk":
        return c.R
    return c.Rs * t ** (c.s - 1) * z / (c.Rs * t**c.s + 1)


def _moment_pairs(d, N, exploit_symmetry):
    pairs = []
    for j in range(N + 1):
        for k in range(j, N + 1):
            if exploit_symmetry:
                if d.symmetry == 0 and j != k:
                    continue
                if d.symmetry and (k - j) % d.symmetry:
                    continue
            pairs.append((j, k))
    return pairs


def moment_matrix(d, N, precision_bits=53, exploit_symmetry=True, tol=None):
    """Hermitian matrix ``G[j][k] = <z^j, z^k>`` for ``0 <= j, k <= N``.

    Moments are reduced to contour integrals over ``L_1`` by Green's formula
    and evaluated with the trapezoid rule in ``t = exp(i theta)``, doubling the
    node count until the largest change (relative to ``sqrt(G_jj G_kk)``) is
    below ``tol``.  With ``exploit_symmetry`` the rotation invariance of the
    domain is used: only pairs with ``j = k (mod s)`` are evaluated and the
    sum is restricted to one sector of nodes.

    Returns a list of lists of ``gmpy2.mpc`` at ``precision_bits``.
    """
    if tol is None:
        tol = min(1e-12, 2.0 ** -(precision_bits - 20))
    bits = precision_bits + 32
    pairs = _moment_pairs(d, N, exploit_symmetry)
    schedule = _node_count_schedule(d)
    use_sector = exploit_symmetry and d.symmetry > 1
    sums = None
    previous = None
    for level_idx, m in enumerate(schedule):
        span = m // d.symmetry if use_sector else m
        if sums is None:
            node_ids = range(span)
            sums = _sector_sums(d, pairs, m, node_ids, bits)
        else:
            # reuse the coarse nodes: only the odd-indexed nodes of the finer grid are new
            node_ids = range(1, span, 2)
            new = _sector_sums(d, pairs, m, node_ids, bits)
            with workprec(bits):
                sums = {p: sums[p] + new[p] for p in pairs}
        with workprec(bits):
            factor = gmpy2.mpfr(d.symmetry if use_sector else 1) / m
            current = {(j, k): sums[j, k] * factor / (k + 1) for j, k in pairs}
        if previous is not None:
            change = _max_relative_change(previous, current, N)
            if change < tol:
                return _assemble(current, N, precision_bits)
        previous = current
    raise ConvergenceError(f"area moments did not converge with {schedule[-1]} nodes (N={N}, bits={precision_bits})")


def _max_relative_change(old, new, N):
    diag = [abs(complex(new.get((j, j), 1))) for j in range(N + 1)]
    worst = 0.0
    for pair, value in new.items():
        j, k = pair
        scale = math.sqrt(diag[j] * diag[k])
        with workprec(64):
            delta = float(abs(value - old[pair]))
        worst = max(worst, delta / scale)
    return worst


def _assemble(values, N, bits):
    with workprec(bits):
        zero = gmpy2.mpc(0)
        G = [[zero] * (N + 1) for _ in range(N + 1)]
        for (j, k), v in values.items():
            v = gmpy2.mpc(v)
            G[j][k] = v
            G[k][j] = v.conjugate()
        for j in range(N + 1):
            G[j][j] = gmpy2.mpc(G[j][j].real)
    return G


def area_moment(d, j, k, m_nodes=MOMENT_START_NODES, precision_bits=53, tol=1e-12, max_doublings=4):
    """``(1/pi) * integral over G_1 of z^j conj(z)^k dA`` via the boundary integral.

    Starts from ``m_nodes`` trapezoid nodes and doubles until the relative
    change drops below ``tol``; returns a Python complex.
    """
    if j < 0 or k < 0:
        raise RangeError("moment indices must be non-negative")
    if m_nodes < 64:
        raise ValueError("area_moment needs m_nodes >= 64")
    bits = precision_bits + 32
    m = m_nodes
    sums = _sector_sums(d, [(j, k)], m, range(m), bits)[j, k]
    with workprec(bits):
        value = sums / m / (k + 1)
    for _ in range(max_doublings):
        m *= 2
        extra = _sector_sums(d, [(j, k)], m, range(1, m, 2), bits)[j, k]
        with workprec(bits):
            sums = sums + extra
            new = sums / m / (k + 1)
            delta = abs(complex(new - value))
        scale = max(abs(complex(new)), _moment_scale(d, j, k))
        value = new
        if delta <= tol * scale:
            return complex(value)
    raise ConvergenceError(f"area_moment({j},{k}) did not converge after {max_doublings} doublings")


def _moment_scale(d, j, k):
    # sqrt of the diagonal moments bounds |moment(j, k)| (Cauchy-Schwarz); crude a priori proxy
    radius = d.R if d.kind == "disk" else (1 + d.R**d.s) ** (1.0 / d.s)
    return radius ** (j + k + 2) / (1 + max(j, k))


# -- Cholesky engine ---------------------------------------------------------


def _cholesky(G, bits, progress=None):
    n = len(G)
    with workprec(bits):
        L = [[gmpy2.mpc(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                acc = G[i][j]
                for k in range(j):
                    if L[i][k] != 0 and L[j][k] != 0:
                        acc -= L[i][k] * L[j][k].conjugate()
                if i == j:
                    diag = acc.real
                    if not diag > 0:
                        raise NotPositiveDefinite(
                            f"Gram matrix lost positive definiteness at index {i}; "
                            "raise precision_bits"
                        )
                    L[i][i] = gmpy2.mpc(gmpy2.sqrt(diag))
                elif acc != 0:
                    L[i][j] = acc / L[j][j].real
            if progress is not None:
                progress(i, n - 1)
    return L


def _lower_inverse(L, bits):
    n = len(L)
    with workprec(bits):
        C = [[gmpy2.mpc(0)] * n for _ in range(n)]
        for i in range(n):
            inv_diag = 1 / L[i][i].real
            C[i][i] = gmpy2.mpc(inv_diag)
            for j in range(i):
                acc = gmpy2.mpc(0)
                for k in range(j, i):
                    if L[i][k] != 0 and C[k][j] != 0:
                        acc += L[i][k] * C[k][j]
                C[i][j] = -acc * inv_diag
    return C


def gram_cholesky_orthonormalize(d, N, precision_bits=None, exploit_symmetry=True, progress=None):
    """Orthonormal polynomials ``P_0..P_N`` from the Cholesky factor of the monomial Gram matrix."""
    if N < 0:
        raise RangeError("N must be non-negative")
    if precision_bits is None:
        precision_bits = default_precision(N)
    bits = precision_bits + 32
    G = moment_matrix(d, N, precision_bits, exploit_symmetry=exploit_symmetry)
    L = _cholesky(G, bits, progress)
    C = _lower_inverse(L, bits)
    polys = tuple(Poly(tuple(C[n][: n + 1]), precision_bits) for n in range(N + 1))
    with workprec(precision_bits):
        kappas = tuple(gmpy2.mpfr(C[n][n].real) for n in range(N + 1))
    return OrthonormalSet(d, polys, kappas, precision_bits, "cholesky")


# -- Arnoldi engine ----------------------------------------------------------


def make_area_rule(d, radial_n, angular_n):
    """Tensor rule on the unit disk pulled back to ``G_1`` by the interior map.

    Radial nodes are Gauss-Legendre on ``[0, 1]``, angular nodes are
    equispaced; weights include the polar factor ``r``, the Jacobian
    ``|(phi^{-1})'(w)|**2`` and the ``1/pi`` normalization of the inner product.
    """
    if radial_n < 8 or angular_n < 16:
        raise ValueError("make_area_rule needs radial_n >= 8 and angular_n >= 16")
    x, wx = np.polynomial.legendre.leggauss(radial_n)
    r = 0.5 * (x + 1)
    wr = 0.5 * wx * r
    theta = 2 * np.pi * np.arange(angular_n) / angular_n
    w = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    polar = np.repeat(wr, angular_n) * (2 * np.pi / angular_n)
    try:
        nodes = geo.interior_inverse(d, w)
        jac = np.abs(geo.interior_inverse_deriv(d, w)) ** 2
    except DomainError as exc:
        raise DomainError(f"{d}: interior_inverse unsupported ({exc})") from exc
    return QuadratureRule(nodes, polar * jac / np.pi, "area_G1")


def default_area_rule(d, N):
    if d.kind == "disk":
        return make_area_rule(d, max(16, N + 2), max(32, 2 * N + 4))
    return make_area_rule(d, max(48, 3 * N + 20), max(128, 8 * N + 64))


def arnoldi_orthonormalize(d, N, rule=None):
    """Orthonormal polynomials by Arnoldi on the nodes of ``rule`` (double precision)."""
    if rule is None:
        rule = default_area_rule(d, N)
    if rule.target != "area_G1":
        raise ValueError("arnoldi_orthonormalize needs an area rule")
    z, w = rule.nodes, rule.weights
    Q = np.zeros((N + 1, z.size), dtype=complex)
    C = np.zeros((N + 1, N + 1), dtype=complex)
    norm0 = math.sqrt(rule.total)
    Q[0] = 1.0 / norm0
    C[0, 0] = 1.0 / norm0
    for n in range(1, N + 1):
        v = z * Q[n - 1]
        coeffs = np.zeros(N + 1, dtype=complex)
        coeffs[1 : n + 1] = C[n - 1, :n]
        start = math.sqrt(np.sum(w * np.abs(v) ** 2))
        for _ in range(2):
            h = Q[:n].conj() @ (w * v)
            v = v - h @ Q[:n]
            coeffs = coeffs - h @ C[:n]
        norm = math.sqrt(np.sum(w * np.abs(v) ** 2))
        if norm < 1e-14 * start:
            raise RankDeficiency(f"Arnoldi breakdown at degree {n}")
        Q[n] = v / norm
        C[n] = coeffs / norm
        C[n, n] = C[n, n].real
    polys = tuple(Poly(tuple(C[n, : n + 1]), 53) for n in range(N + 1))
    kappas = tuple(float(C[n, n].real) for n in range(N + 1))
    return OrthonormalSet(d, polys, kappas, 53, "arnoldi")


# -- closed forms and inner products ----------------------------------------


def closed_form_lemniscate(d, n, precision_bits=256):
    """Exact ``P_n`` for ``n = s m + s - 1``: ``sqrt(n+1) R^-(n+1) z^(s-1) (z^s - 1)^m``."""
    if d.kind != "lemniscate":
        raise DomainError("closed_form_lemniscate needs a lemniscate domain")
    s = d.s
    if n < 0 or (n - (s - 1)) % s:
        raise RangeError(f"closed form exists only for n = {s - 1} mod {s}")
    m = (n - (s - 1)) // s
    with workprec(precision_bits + 32):
        scale = gmpy2.sqrt(mpf(n + 1)) / mpf(d.R) ** (n + 1)
        coeffs = [gmpy2.mpc(0)] * (n + 1)
        for j in range(m + 1):
            coeffs[s * j + s - 1] = gmpy2.mpc(scale * math.comb(m, j) * (-1) ** (m - j))
    return Poly(tuple(coeffs), precision_bits)


def closed_form_disk(d, n, precision_bits=53):
    """``P_n(z) = sqrt(n+1) z^n / R^(n+1)`` for the disk of radius R."""
    if d.kind != "disk":
        raise DomainError("closed_form_disk needs a disk domain")
    with workprec(precision_bits + 32):
        lead = gmpy2.sqrt(mpf(n + 1)) / mpf(d.R) ** (n + 1)
        coeffs = [gmpy2.mpc(0)] * n + [gmpy2.mpc(lead)]
    return Poly(tuple(coeffs), precision_bits)


def inner_product(d, p, q, m_nodes=MOMENT_START_NODES, precision_bits=53):
    """``<p, q>`` expanded over the boundary-reduced monomial moments."""
    pc = [complex(c) for c in p.coeffs]
    qc = [complex(c) for c in q.coeffs]
    total = 0j
    for j, a in enumerate(pc):
        if a == 0:
            continue
        for k, b in enumerate(qc):
            if b == 0:
                continue
            if d.symmetry == 0 and j != k:
                continue
            if d.symmetry and (j - k) % d.symmetry:
                continue
            total += a * b.conjugate() * area_moment(d, j, k, m_nodes, precision_bits)
    return total


def gram_residual(oset, rule=None):
    """``max |<P_n, P_m> - delta_nm|`` under an area quadrature rule."""
    if rule is None:
        rule = default_area_rule(oset.domain, oset.N)
    vals = np.array([p(rule.nodes) for p in oset.polys])
    gram = (vals * rule.weights) @ vals.conj().T
    return float(np.max(np.abs(gram - np.eye(len(oset.polys)))))


def closed_form_set(d, N, precision_bits=53):
    """Exact ``P_0..P_N`` (disk only: the lemniscate has closed forms on one residue class)."""
    if d.kind != "disk":
        raise DomainError("a complete closed-form set exists only for the disk")
    polys = tuple(closed_form_disk(d, n, precision_bits) for n in range(N + 1))
    kappas = tuple(float(p.leading.real) for p in polys)
    return OrthonormalSet(d, polys, kappas, precision_bits, "closed_form")


def orthonormal_set(d, N, engine="cholesky", precision_bits=None, progress=None):
    """Dispatch to one of the engines by name."""
    if engine == "cholesky":
        return gram_cholesky_orthonormalize(d, N, precision_bits, progress=progress)
    if engine == "arnoldi":
        return arnoldi_orthonormalize(d, N)
    if engine == "closed_form":
        return closed_form_set(d, N, precision_bits or 53)
    raise ValueError(f"unknown engine {engine!r}")

"""Domains bounded by level curves of explicit exterior conformal maps.

Two families are supported:

* ``disk(R)``: the disk ``|z| < R``; ``psi(w) = R w`` and ``rho = 0``.
* ``lemniscate(s, R)``: the interior of ``|z**s - 1| = R**s`` with
  ``psi(w) = (R**s w**s + 1)**(1/s)``, ``rho = 1/R`` and ``s`` corners of the
  inner curve ``|z**s - 1| = 1``, all located at the origin.

Every map accepts a Python scalar, a complex numpy array or a ``gmpy2.mpc``;
the latter is evaluated at the current gmpy2 working precision.  Fractional
powers are written so that the principal branch is the analytic one on the
whole region where the map is used: ``psi(w) = R w (1 + (R w)**-s)**(1/s)`` has
``|(R w)**-s| < 1`` outside ``|w| = rho``, and the interior map's radicand
``R**(2s) - 1 + z**s`` stays in the right half-plane on ``G_{1/rho}``.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from types import SimpleNamespace

import gmpy2
import numpy as np

from ._prec import is_mp, mpf, workprec
from .errors import CoincidenceError, DomainError, RangeError
from .measures import DiscreteMeasure

_EDGE = 1e-12


@dataclass(frozen=True)
class CornerDatum:
    omega: complex
    theta: float
    lam: float
    A: complex
    z: complex
    A_hat: complex


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    R: float
    s: int = 0
    rho: float = 0.0
    cap: float = 0.0
    corners: tuple = field(default=(), repr=False)

    @property
    def symmetry(self):
        """Order of the rotation group leaving the domain invariant (0: all rotations)."""
        return self.s if self.kind == "lemniscate" else 0

    def to_dict(self):
        out = {"kind": self.kind, "R": self.R}
        if self.kind == "lemniscate":
            out["s"] = self.s
        return out

    @classmethod
    def from_dict(cls, data):
        if data["kind"] == "disk":
            return disk(float(data["R"]))
        if data["kind"] == "lemniscate":
            return lemniscate(int(data["s"]), float(data["R"]))
        raise ValueError(f"unknown domain kind {data['kind']!r}")

    def __str__(self):
        if self.kind == "disk":
            return f"disk(R={self.R})"
        return f"lemniscate(s={self.s}, R={self.R})"


def disk(R):
    R = float(R)
    if not R > 0:
        raise DomainError("disk radius must be positive")
    return DomainSpec("disk", R, 0, 0.0, 1.0 / R, ())


def lemniscate(s, R):
    s, R = int(s), float(R)
    if s < 2:
        raise DomainError("lemniscate needs s >= 2")
    if not R > 1:
        raise DomainError("R must exceed 1")
    d = DomainSpec("lemniscate", R, s, 1.0 / R, 1.0 / R, ())
    object.__setattr__(d, "corners", _lemniscate_corners(d))
    return d


# -- constants ---------------------------------------------------------------


def _dbl_consts(d):
    R, s = d.R, d.s
    ns = SimpleNamespace(R=R, one=1.0, mp=False)
    if d.kind == "lemniscate":
        ns.s = s
        ns.inv_s = 1.0 / s
        ns.Rs = R**s
        ns.R2s1 = R ** (2 * s) - 1.0
        ns.c = ns.R2s1**ns.inv_s
    return ns


@lru_cache(maxsize=64)
def _mp_consts(kind, s, R, bits):
    with workprec(bits):
        Rm = mpf(R)
        ns = SimpleNamespace(R=Rm, one=mpf(1), mp=True)
        if kind == "lemniscate":
            ns.s = s
            ns.inv_s = mpf(1) / s
            ns.Rs = Rm**s
            ns.R2s1 = Rm ** (2 * s) - 1
            ns.c = ns.R2s1**ns.inv_s
    return ns


def _consts(d, mp):
    if mp:
        return _mp_consts(d.kind, d.s, d.R, gmpy2.get_context().precision)
    return _dbl_consts(d)


def _arg(z):
    if is_mp(z):
        return (z if isinstance(z, gmpy2.mpc) else gmpy2.mpc(z)), True
    return np.asarray(z, dtype=complex), False


def _ret(v, mp):
    if mp or np.ndim(v) > 0:
        return v
    return complex(v)


def _root(u, c):
    return u**c.inv_s


def _absf(x):
    return np.abs(np.asarray(complex(x)) if is_mp(x) else x)


# -- region predicates -------------------------------------------------------


def level(d, z):
    """The number ``r`` for which ``z`` lies on the level curve ``L_r``.

    For the lemniscate this is ``|z**s - 1|**(1/s) / R``; it is defined on the
    whole plane and ``z`` is in ``G_r`` exactly when ``level(z) < r``.
    """
    z = np.asarray(complex(z)) if is_mp(z) else np.asarray(z, dtype=complex)
    if d.kind == "disk":
        out = np.abs(z) / d.R
    else:
        out = np.abs(z**d.s - 1.0) ** (1.0 / d.s) / d.R
    return float(out) if out.ndim == 0 else out


def in_omega_rho(d, z, margin=0.0):
    lv = level(d, z)
    return np.all(lv > d.rho + margin) if d.kind == "lemniscate" else np.all(np.abs(lv) > margin)


def in_G(d, r, z, margin=0.0):
    return bool(np.all(level(d, z) < r - margin))


def _require(cond, message):
    if not cond:
        raise DomainError(message)


# -- exterior map ------------------------------------------------------------


def _psi(d, w, mp):
    c = _consts(d, mp)
    if d.kind == "disk":
        return c.R * w
    Rw = c.R * w
    return Rw * _root(1 + Rw ** (-c.s), c)


def exterior_map(d, w):
    """psi: the conformal map of ``|w| > 1`` onto the exterior of ``L_1`` (continued to ``|w| > rho``)."""
    w, mp = _arg(w)
    _require(np.all(_absf(w) >= d.rho * (1 - _EDGE)), "exterior_map needs |w| >= rho")
    return _ret(_psi(d, w, mp), mp)


def exterior_map_deriv(d, w):
    w, mp = _arg(w)
    _require(np.all(_absf(w) > d.rho), "exterior_map_deriv needs |w| > rho")
    c = _consts(d, mp)
    if d.kind == "disk":
        return _ret(c.R + 0 * w, mp)
    psi = _psi(d, w, mp)
    return _ret(c.Rs * w ** (c.s - 1) * psi / (c.Rs * w**c.s + 1), mp)


def _phi(d, z, mp):
    c = _consts(d, mp)
    if d.kind == "disk":
        return z / c.R
    return (z / c.R) * _root(1 - z ** (-c.s), c)


def exterior_inverse(d, z):
    """phi: inverse of :func:`exterior_map`, defined on ``Omega_rho``."""
    z, mp = _arg(z)
    if d.kind == "disk":
        _require(np.all(_absf(z) > 0), "exterior_inverse: z = 0 is not in Omega_rho")
    else:
        _require(np.all(level(d, z) >= d.rho * (1 - _EDGE)), "exterior_inverse: z is not in Omega_rho")
    return _ret(_phi(d, z, mp), mp)


def _dphi(d, z, mp):
    c = _consts(d, mp)
    if d.kind == "disk":
        return 1 / c.R + 0 * z
    return _phi(d, z, mp) * z ** (c.s - 1) / (z**c.s - 1)


def exterior_inverse_deriv(d, z):
    z, mp = _arg(z)
    if d.kind == "lemniscate":
        _require(np.all(level(d, z) > d.rho), "exterior_inverse_deriv: z is not in Omega_rho")
    return _ret(_dphi(d, z, mp), mp)


# -- interior map ------------------------------------------------------------


def _phi_int(d, z, mp):
    c = _consts(d, mp)
    if d.kind == "disk":
        return z / c.R
    return c.R * z / _root(c.R2s1 + z**c.s, c)


def _dphi_int(d, z, mp):
    c = _consts(d, mp)
    if d.kind == "disk":
        return 1 / c.R + 0 * z
    u = c.R2s1 + z**c.s
    return c.R * c.R2s1 / (u * _root(u, c))


def interior_map(d, z):
    """Conformal map of ``G_1`` onto the unit disk with value 0 and positive derivative at 0."""
    z, mp = _arg(z)
    _require(in_G(d, 1.0 + _EDGE, z), "interior_map: z is outside the closure of G_1")
    return _ret(_phi_int(d, z, mp), mp)


def interior_map_deriv(d, z):
    z, mp = _arg(z)
    _require(in_G(d, 1.0 / d.rho if d.rho else np.inf, z), "interior_map_deriv: z outside G_{1/rho}")
    return _ret(_dphi_int(d, z, mp), mp)


def _phi_int_inv(d, w, mp):
    c = _consts(d, mp)
    if d.kind == "disk":
        return c.R * w
    return w * c.c / _root(c.Rs - w**c.s, c)


def _dphi_int_inv(d, w, mp):
    c = _consts(d, mp)
    if d.kind == "disk":
        return c.R + 0 * w
    v = c.Rs - w**c.s
    return c.c * c.Rs / (v * _root(v, c))


def interior_inverse(d, w):
    w, mp = _arg(w)
    _require(np.all(_absf(w) < 1), "interior_inverse needs |w| < 1")
    return _ret(_phi_int_inv(d, w, mp), mp)


def interior_inverse_deriv(d, w):
    w, mp = _arg(w)
    _require(np.all(_absf(w) < 1), "interior_inverse_deriv needs |w| < 1")
    return _ret(_dphi_int_inv(d, w, mp), mp)


# -- kernels -----------------------------------------------------------------


def _check_continuation(d, *pts):
    if d.rho:
        for p in pts:
            _require(in_G(d, 1.0 / d.rho, p), "kernel argument outside G_{1/rho}")


def kernel_L(d, zeta, z):
    """The meromorphic kernel ``phi'(zeta) phi'(z) / (phi(zeta) - phi(z))**2`` of the interior map."""
    zeta, mp1 = _arg(zeta)
    z, mp2 = _arg(z)
    mp = mp1 or mp2
    _check_continuation(d, zeta, z)
    if np.any(_absf(zeta - z) < 1e-13):
        raise CoincidenceError("kernel_L has a double pole at zeta = z")
    num = _dphi_int(d, zeta, mp) * _dphi_int(d, z, mp)
    return _ret(num / (_phi_int(d, zeta, mp) - _phi_int(d, z, mp)) ** 2, mp)


def kernel_L_closed_form(d, zeta, z):
    """Explicit lemniscate expression for ``kernel_L`` (independent of the map code path)."""
    if d.kind != "lemniscate":
        raise DomainError("closed form exists only for the lemniscate")
    s, R = d.s, d.R
    a = R ** (2 * s) - 1
    uz = (a + complex(z) ** s) ** (1.0 / s)
    uzeta = (a + complex(zeta) ** s) ** (1.0 / s)
    num = a**2 * uz ** (1 - s) * uzeta ** (1 - s)
    return num / (uz * zeta - z * uzeta) ** 2


def kernel_L_zeta_deriv_at_zero(d, j, z):
    """``d^j L / d zeta^j`` at ``zeta = 0`` for ``0 <= j <= s-2`` in closed form.

    With ``l = s - 2 - j`` the value is
    ``(s-l-1)! z**(l-s) ((R**2s - 1) / (R**2s - 1 + z**s))**((l+1)/s)``.
    """
    if d.kind != "lemniscate":
        raise DomainError("corner kernel derivatives need a lemniscate")
    s = d.s
    if not 0 <= j <= s - 2:
        raise RangeError(f"derivative order must lie in 0..{s - 2}")
    z, mp = _arg(z)
    if np.any(_absf(z) < 1e-13):
        raise CoincidenceError("kernel derivative at zeta = 0 is singular for z = 0")
    _require(in_G(d, d.R, z), "z outside G_{1/rho}")
    c = _consts(d, mp)
    l = s - 2 - j
    fact = 1
    for i in range(2, s - l):
        fact *= i
    ratio = c.R2s1 / (c.R2s1 + z**s)
    return _ret(fact * z ** (l - s) * ratio ** ((l + 1) * c.inv_s), mp)


def kernel_L_taylor(d, j, z, nodes=128):
    """``d^j L / d zeta^j (0, z)`` for any order, by a Cauchy integral around 0.

    The trapezoid rule runs on ``|zeta| = |z| / 2``, inside the disk where
    ``L(., z)`` is analytic; accuracy is about ``2**-nodes`` relative.
    """
    z = complex(z)
    if abs(z) < 1e-13:
        raise CoincidenceError("Cauchy radius collapses at z = 0")
    radius = abs(z) / 2
    if d.kind == "lemniscate":
        radius = min(radius, 0.5 * (d.R ** (2 * d.s) - 1) ** (1.0 / d.s))
    t = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    vals = _dphi_int(d, t, False) * _dphi_int(d, z, False) / (_phi_int(d, t, False) - _phi_int(d, z, False)) ** 2
    coeff = np.mean(vals * t ** (-j))
    fact = 1.0
    for i in range(2, j + 1):
        fact *= i
    return complex(fact * coeff)


def bergman_kernel(d, zeta, z):
    """Bergman kernel of ``G_1`` expressed through the interior map."""
    zeta, mp1 = _arg(zeta)
    z, mp2 = _arg(z)
    mp = mp1 or mp2
    _require(in_G(d, 1.0, zeta) and in_G(d, 1.0, z), "bergman_kernel arguments must lie in G_1")
    fz = _phi_int(d, z, mp)
    dfz = _dphi_int(d, z, mp)
    if mp:
        fz_bar, dfz_bar = fz.conjugate(), dfz.conjugate()
    else:
        fz_bar, dfz_bar = np.conj(fz), np.conj(dfz)
    out = dfz_bar * _dphi_int(d, zeta, mp) / (1 - fz_bar * _phi_int(d, zeta, mp)) ** 2
    return _ret(out, mp)


def schwarz_reflect(d, z):
    """Reflection ``psi(1 / conj(phi(z)))`` across ``L_1``."""
    z, mp = _arg(z)
    lv = level(d, z)
    upper = 1.0 / d.rho if d.rho else np.inf
    _require(np.all(lv > d.rho) and np.all(lv < upper), "schwarz_reflect: z outside G_{1/rho} ∩ Omega_rho")
    f = _phi(d, z, mp)
    f_bar = f.conjugate() if mp else np.conj(f)
    return _ret(_psi(d, 1 / f_bar, mp), mp)


# -- curves and measures -----------------------------------------------------


def level_curve(d, r, m):
    """``m`` points ``psi(r exp(2 pi i j / m))`` of ``L_r``."""
    if not r > d.rho:
        raise DomainError("level_curve needs r > rho")
    if m < 8:
        raise ValueError("level_curve needs m >= 8")
    w = r * np.exp(2j * np.pi * np.arange(m) / m)
    return _psi(d, w, False)


def equilibrium_measure(d, m):
    """Uniformly weighted image of ``m`` midpoint nodes of ``|w| = rho`` under ``psi``."""
    if not d.rho > 0:
        raise DomainError("the equilibrium measure of L_rho is unsupported when rho = 0")
    if m < 16:
        raise ValueError("equilibrium_measure needs m >= 16")
    theta = 2 * np.pi * (np.arange(m) + 0.5) / m
    return DiscreteMeasure.uniform(_psi(d, d.rho * np.exp(1j * theta), False))


def equilibrium_potential(d, z):
    """``log|phi'(inf) / phi(z)|``, the equilibrium potential of ``L_rho`` on ``Omega_rho``."""
    z, mp = _arg(z)
    z = np.asarray(complex(z)) if mp else z
    if d.kind == "disk":
        _require(np.all(np.abs(z) > 0), "equilibrium_potential: z not in Omega_rho")
    else:
        _require(np.all(level(d, z) > d.rho), "equilibrium_potential: z not in Omega_rho")
    out = np.log(d.cap) - np.log(np.abs(_phi(d, z, False)))
    return float(out) if np.ndim(out) == 0 else out


# -- corners -----------------------------------------------------------------


def _lemniscate_corners(d, bits=192, t0=1e-4):
    s, rho = d.s, d.rho
    raw = []
    with workprec(bits):
        pi = gmpy2.const_pi()
        lam = mpf(1) / s
        for k in range(1, s + 1):
            theta = (2 * k - 1) * pi / s
            direction = gmpy2.mpc(gmpy2.cos(theta), gmpy2.sin(theta))
            omega = direction / mpf(d.R)
            phase = gmpy2.mpc(gmpy2.cos(lam * theta), gmpy2.sin(lam * theta))

            def ratio(t):
                t = mpf(t)
                return _psi(d, omega + t * direction, True) / (t**lam * phase)

            f0, f1, f2 = ratio(t0), ratio(t0 / 2), ratio(t0 / 4)
            r1a, r1b = 2 * f1 - f0, 2 * f2 - f1
            A = (4 * r1b - r1a) / 3
            raw.append((complex(omega), float(theta), complex(A)))
    lam1 = 1.0 / s
    theta1 = raw[0][1]
    return tuple(
        CornerDatum(
            omega=om,
            theta=th,
            lam=lam1,
            A=A,
            z=0j,
            A_hat=A * np.exp(1j * (lam1 + 1) * (th - theta1)),
        )
        for om, th, A in raw
    )


def minimal_corners(d, tol=1e-12):
    """Corners sharing the smallest exterior-angle parameter, sorted by argument."""
    if not d.corners:
        raise DomainError(f"{d} has no corners")
    ordered = sorted(d.corners, key=lambda c: (c.lam, c.theta))
    lam1 = ordered[0].lam
    return [c for c in ordered if abs(c.lam - lam1) <= tol]

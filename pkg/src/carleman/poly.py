"""Complex polynomials with extended-precision coefficients."""
from dataclasses import dataclass

import gmpy2
import numpy as np

from ._prec import is_mp, mpc, workprec


@dataclass(frozen=True)
class Poly:
    """Polynomial ``sum_k coeffs[k] z**k`` (ascending order).

    Coefficients are ``gmpy2.mpc`` values carried at ``prec`` bits.  Calling the
    polynomial on Python/numpy numbers evaluates in double precision; calling it
    on a ``gmpy2.mpc`` evaluates at the polynomial's own precision.
    """

    coeffs: tuple
    prec: int = 53

    def __post_init__(self):
        with workprec(self.prec):
            cs = tuple(mpc(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        if not cs:
            cs = (gmpy2.mpc(0),)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "_dbl", np.array([complex(c) for c in cs]))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def as_complex(self):
        return self._dbl.copy()

    def __call__(self, z):
        if is_mp(z):
            return self.eval_mp(z)
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self._dbl[::-1]:
            out = out * z + c
        return complex(out) if out.ndim == 0 else out

    def eval_mp(self, z):
        with workprec(self.prec):
            z = mpc(z)
            acc = gmpy2.mpc(0)
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc

    def derivative(self):
        with workprec(self.prec):
            cs = tuple(k * self.coeffs[k] for k in range(1, len(self.coeffs)))
        return Poly(cs or (0,), self.prec)

    def scaled(self, factor):
        with workprec(self.prec):
            f = mpc(factor)
            return Poly(tuple(c * f for c in self.coeffs), self.prec)

    def max_abs_coeff(self):
        return float(np.max(np.abs(self._dbl)))

    @classmethod
    def from_roots(cls, roots, lead=1, prec=53):
        with workprec(prec):
            cs = [mpc(lead)]
            for r in roots:
                r = mpc(r)
                new = [gmpy2.mpc(0)] * (len(cs) + 1)
                for k, c in enumerate(cs):
                    new[k + 1] += c
                    new[k] -= r * c
                cs = new
        return cls(tuple(cs), prec)

    def to_pairs(self):
        """Coefficients as ``[re, im]`` pairs (decimal strings above double precision)."""
        if self.prec <= 53:
            return [[float(c.real), float(c.imag)] for c in self.coeffs]
        digits = int(self.prec * 0.30103) + 3
        return [[_fmt(c.real, digits), _fmt(c.imag, digits)] for c in self.coeffs]

    @classmethod
    def from_pairs(cls, pairs, prec=53):
        with workprec(prec):
            cs = tuple(gmpy2.mpc(gmpy2.mpfr(str(re)), gmpy2.mpfr(str(im))) for re, im in pairs)
        return cls(cs, prec)


def _fmt(x, digits):
    if x == 0:
        return "0"
    mant, exp, _ = x.digits(10, digits)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1}"

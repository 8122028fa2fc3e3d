"""Real Gamma function and generalized binomial coefficients.

Gamma is evaluated with Spouge's approximation at a precision-dependent
order, using the reflection formula for arguments below 1/2.  All values are
returned as :class:`gmpy2.mpfr` numbers rounded to the requested precision.
"""
import math
from functools import lru_cache

import gmpy2

from ._prec import mpf, workprec
from .errors import PoleError

POLE_GUARD = 1e-9
INT_TOL = 1e-12


def _nearest_int(x):
    r = round(float(x))
    return r, abs(float(x) - r)


def _exact(x):
    # a float argument is its binary value; decimal rounding would be amplified near poles
    if isinstance(x, gmpy2.mpfr):
        return x
    return gmpy2.mpfr(float(x)) if isinstance(x, float) else mpf(x)


def _check_pole(x):
    r, dist = _nearest_int(x)
    if r <= 0 and dist < POLE_GUARD:
        raise PoleError(f"Gamma has a pole at {r} (argument {float(x)!r})")


@lru_cache(maxsize=None)
def _spouge_coefficients(bits):
    # Spouge: relative error < a^{-1/2} (2 pi)^{-(a + 1/2)}
    a = int(math.ceil(bits * math.log(2) / math.log(2 * math.pi))) + 2
    guard = 2 * bits + 32
    with workprec(guard):
        coeffs = [gmpy2.sqrt(2 * gmpy2.const_pi())]
        fact = mpf(1)
        for k in range(1, a):
            if k > 1:
                fact *= k - 1
            ck = (a - k) ** (mpf(k) - mpf(1) / 2) * gmpy2.exp(mpf(a - k)) / fact
            coeffs.append(ck if k % 2 == 1 else -ck)
    return a, guard, tuple(coeffs)


def _spouge_log(x, bits):
    """log Gamma(x) for x >= 1 (returned at guard precision)."""
    a, guard, coeffs = _spouge_coefficients(bits)
    with workprec(guard):
        z = mpf(x) - 1
        series = coeffs[0]
        for k in range(1, a):
            series += coeffs[k] / (z + k)
        return (z + mpf(1) / 2) * gmpy2.log(z + a) - (z + a) + gmpy2.log(series)


def _log_abs_gamma(x, bits):
    """Return (log|Gamma(x)|, sign) at guard precision."""
    _check_pole(x)
    _, guard, _ = _spouge_coefficients(bits)
    with workprec(guard):
        x = _exact(x)
        if x >= 1:
            return _spouge_log(x, bits), 1
        if x >= mpf(1) / 2:
            # Gamma(x) = Gamma(x + 1) / x
            return _spouge_log(x + 1, bits) - gmpy2.log(x), 1
        # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        sin_pix = gmpy2.sin(gmpy2.const_pi() * x)
        log_refl, _ = _log_abs_gamma(1 - x, bits)
        value = gmpy2.log(gmpy2.const_pi()) - gmpy2.log(abs(sin_pix)) - log_refl
        return value, (1 if sin_pix > 0 else -1)


def gamma(x, prec=53):
    """Euler Gamma function of a real argument.

    Raises :class:`PoleError` within ``1e-9`` of a non-positive integer.
    """
    r, dist = _nearest_int(x)
    if r >= 1 and dist < INT_TOL and r <= 1000:
        return gmpy2.mpfr(math.factorial(r - 1), prec)
    logval, sign = _log_abs_gamma(x, prec)
    _, guard, _ = _spouge_coefficients(prec)
    with workprec(guard):
        value = sign * gmpy2.exp(logval)
    return gmpy2.mpfr(value, prec)


def log_abs_gamma(x, prec=53):
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``."""
    logval, sign = _log_abs_gamma(x, prec)
    return gmpy2.mpfr(logval, prec), sign


def _is_int(x):
    r, dist = _nearest_int(x)
    return dist < INT_TOL, r


def _is_pole(x):
    r, dist = _nearest_int(x)
    return r <= 0 and dist < POLE_GUARD


def _binomial_exact(a, b):
    """Integer cases with pole cancellation, or None when not applicable."""
    a_int, ai = _is_int(a)
    b_int, bi = _is_int(b)
    if not (a_int and b_int):
        return None
    if ai >= 0:
        if 0 <= bi <= ai:
            return math.comb(ai, bi)
        return 0
    # a is a negative integer: Gamma(a + 1) has a pole that only a second pole can cancel
    if bi >= 0:
        return (-1) ** bi * math.comb(bi - ai - 1, bi)
    if bi <= ai:
        k = ai - bi
        return (-1) ** k * math.comb(-bi - 1, k)
    return 0


def log_abs_gen_binomial(a, b, prec=53):
    """Return ``(log|binom(a, b)|, sign)`` with binom(a,b) = G(a+1)/(G(b+1)G(a-b+1)).

    A vanishing coefficient is reported as ``(-inf, 0)``.
    """
    exact = _binomial_exact(a, b)
    if exact is not None:
        if exact == 0:
            return gmpy2.mpfr("-inf"), 0
        with workprec(prec + 64):
            return gmpy2.mpfr(gmpy2.log(abs(gmpy2.mpz(exact))), prec), (1 if exact > 0 else -1)
    a_m, b_m = _exact(a), _exact(b)
    with workprec(prec + 64):
        top, bottom1, bottom2 = a_m + 1, b_m + 1, a_m - b_m + 1
    if _is_pole(top):
        raise PoleError(f"binom({float(a)}, {float(b)}): uncancelled pole of Gamma(a+1)")
    if _is_pole(bottom1) or _is_pole(bottom2):
        return gmpy2.mpfr("-inf"), 0
    l1, s1 = _log_abs_gamma(top, prec)
    l2, s2 = _log_abs_gamma(bottom1, prec)
    l3, s3 = _log_abs_gamma(bottom2, prec)
    _, guard, _ = _spouge_coefficients(prec)
    with workprec(guard):
        value = l1 - l2 - l3
    return gmpy2.mpfr(value, prec), s1 * s2 * s3


def gen_binomial(a, b, prec=53):
    """Generalized binomial coefficient Gamma(a+1) / (Gamma(b+1) Gamma(a-b+1)).

    Non-negative integer arguments with ``b <= a`` are handled exactly.
    """
    exact = _binomial_exact(a, b)
    if exact is not None:
        return gmpy2.mpfr(exact, prec)
    logval, sign = log_abs_gen_binomial(a, b, prec + 32)
    if sign == 0:
        return gmpy2.mpfr(0, prec)
    with workprec(prec + 32):
        value = sign * gmpy2.exp(logval)
    return gmpy2.mpfr(value, prec)

"""Working-precision helpers around gmpy2 contexts."""
from contextlib import contextmanager

import gmpy2

MPC = gmpy2.mpc
MPFR = gmpy2.mpfr


@contextmanager
def workprec(bits):
    """Run the enclosed block with gmpy2 working precision set to ``bits``."""
    with gmpy2.context(gmpy2.get_context(), precision=int(bits)):
        yield


def is_mp(x):
    return isinstance(x, (gmpy2.mpc, gmpy2.mpfr))


def mpf(x):
    """Convert a float/str/int to mpfr at the current precision.

    Floats go through ``repr`` so that a user-facing ``1.4`` means the decimal 1.4.
    """
    if isinstance(x, float):
        return gmpy2.mpfr(repr(float(x)))
    return gmpy2.mpfr(x)


def mpc(x):
    if isinstance(x, gmpy2.mpc):
        return gmpy2.mpc(x)
    if isinstance(x, complex):
        return gmpy2.mpc(mpf(x.real), mpf(x.imag))
    return gmpy2.mpc(mpf(x), 0)


def pi():
    return gmpy2.const_pi()

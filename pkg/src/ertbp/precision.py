"""Extended-precision scalar support.

All dynamics run on gmpy2's MPFR floats. Precision is expressed in
significant decimal digits at the API surface and converted to bits here;
every entry point pins the gmpy2 context explicitly so results never
depend on ambient interpreter state.
"""
import math
from contextlib import contextmanager

import gmpy2
from gmpy2 import mpfr

DEFAULT_DIGITS = 35

# Decimal inputs (constants, initial conditions) are parsed at this
# precision so that a later rounding to any realistic working precision
# is still a correct rounding of the printed decimal.
PARSE_DIGITS = 200


def digits_to_bits(digits):
    return int(math.ceil(digits * math.log2(10))) + 4


@contextmanager
def working_precision(digits=DEFAULT_DIGITS):
    """Context manager pinning the MPFR precision to `digits` decimals."""
    ctx = gmpy2.get_context().copy()
    ctx.precision = digits_to_bits(digits)
    with ctx:
        yield


def as_mpfr(value, digits=None):
    """Coerce a number or decimal string to mpfr at the active precision.

    Strings go through mpfr directly so no binary double rounding sneaks
    in; pass digits to override the ambient context precision.
    """
    if digits is not None:
        with working_precision(digits):
            return mpfr(value) if not isinstance(value, str) else mpfr(value.strip())
    if isinstance(value, str):
        return mpfr(value.strip())
    return mpfr(value)


def mpfr_str(x):
    """Minimal decimal string that reads back to exactly the same mpfr."""
    if not isinstance(x, mpfr):
        x = mpfr(x)  # only reached for exact types (int, Fraction, ...)
    mant, exp, _ = gmpy2.digits(x, 10, 0)
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    else:
        sign = ""
    if not mant.strip("0"):
        return "0"
    return f"{sign}0.{mant}e{exp}"


def format_mpfr(x, digits=30):
    """Fixed significant-digit scientific string, e.g. for printed reports."""
    if not isinstance(x, mpfr):
        x = mpfr(x)
    mant, exp, _ = gmpy2.digits(x, 10, digits)
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    else:
        sign = ""
    if not mant.strip("0"):
        return "0"
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1:+03d}"

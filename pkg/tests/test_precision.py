import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from ertbp.precision import (DEFAULT_DIGITS, PARSE_DIGITS, as_mpfr,
                             digits_to_bits, format_mpfr, mpfr_str,
                             working_precision)


def test_digits_to_bits_monotone_and_sufficient():
    assert digits_to_bits(35) >= 117  # 35 * log2(10) ~ 116.3
    assert digits_to_bits(50) > digits_to_bits(35)


def test_working_precision_scopes_context():
    outside = gmpy2.get_context().precision
    with working_precision(60):
        assert gmpy2.get_context().precision == digits_to_bits(60)
    assert gmpy2.get_context().precision == outside


def test_as_mpfr_string_avoids_double_rounding():
    with working_precision(35):
        direct = as_mpfr("0.048")
        through_float = mpfr(float("0.048"))
    assert direct != through_float


@settings(max_examples=200, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_mpfr_str_round_trips(x):
    with working_precision(DEFAULT_DIGITS):
        value = mpfr(x)
        text = mpfr_str(value)
        assert mpfr(text) == value


def test_mpfr_str_does_not_rerround_existing_values():
    # A high-precision value printed from a narrower ambient context must
    # keep its own precision, not be squeezed through the ambient one.
    with working_precision(50):
        pi = gmpy2.const_pi()
    with working_precision(16):
        text = mpfr_str(pi)
    with working_precision(50):
        assert mpfr(text) == pi


def test_format_mpfr_fixed_digits():
    with working_precision(35):
        text = format_mpfr(as_mpfr("0.048"), 5)
    assert text == "4.8000e-02"
    assert format_mpfr(mpfr(0), 10) == "0"


def test_parse_digits_exceed_default():
    assert PARSE_DIGITS >= 4 * DEFAULT_DIGITS

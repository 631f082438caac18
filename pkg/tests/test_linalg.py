import numpy as np
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from ertbp.errors import SingularJacobian
from ertbp.linalg import (condition_estimate, det, identity, inverse, mat,
                          mat_mul, mat_sub, mat_vec, one_norm, solve)
from ertbp.precision import working_precision

entries = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


def _matrix4(values):
    return mat([[repr(values[4 * i + j]) for j in range(4)] for i in range(4)])


@settings(max_examples=100, deadline=None)
@given(st.lists(entries, min_size=16, max_size=16))
def test_det_matches_numpy(values):
    with working_precision(35):
        mine = float(det(_matrix4(values)))
    ref = float(np.linalg.det(np.array(values).reshape(4, 4)))
    assert abs(mine - ref) < 1e-9 * max(1.0, abs(ref))


@settings(max_examples=50, deadline=None)
@given(st.lists(entries, min_size=16, max_size=16),
       st.lists(entries, min_size=4, max_size=4))
def test_solve_matches_numpy(values, rhs):
    a = np.array(values).reshape(4, 4)
    if abs(np.linalg.det(a)) < 1e-3:
        return  # stay away from near-singular cases; they get their own test
    with working_precision(35):
        x = solve(_matrix4(values), [repr(v) for v in rhs])
        residual = np.array([float(v) for v in x]) - np.linalg.solve(a, np.array(rhs))
    assert np.max(np.abs(residual)) < 1e-10


def test_singular_matrix_raises():
    singular = mat([["1", "2", "3", "4"],
                    ["2", "4", "6", "8"],
                    ["1", "0", "0", "0"],
                    ["0", "1", "0", "0"]])
    with working_precision(35):
        with pytest.raises(SingularJacobian):
            solve(singular, ["1", "0", "0", "0"])
        assert condition_estimate(singular) == mpfr("inf")


def test_inverse_round_trip():
    values = [3, 1, 0, 2, -1, 4, 1, 0, 0, 2, 5, 1, 1, 0, 2, 6]
    with working_precision(35):
        a = _matrix4([float(v) for v in values])
        product = mat_mul(a, inverse(a))
        err = one_norm(mat_sub(product, identity(4)))
        assert err < mpfr("1e-30")


def test_mat_vec():
    with working_precision(35):
        a = mat([["1", "2"], ["3", "4"]])
        out = mat_vec(a, (mpfr(1), mpfr(1)))
        assert [float(v) for v in out] == [3.0, 7.0]


def test_condition_estimate_identity():
    with working_precision(35):
        assert abs(condition_estimate(identity(4)) - 1) < mpfr("1e-30")

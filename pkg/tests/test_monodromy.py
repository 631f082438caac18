import numpy as np
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from ertbp.linalg import mat
from ertbp.monodromy import (classify_stability, eigenvalues_4x4,
                             state_transition_matrix)
from ertbp.precision import working_precision

entries = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def _sorted_key(z):
    return (round(z.real, 8), round(z.imag, 8))


@settings(max_examples=60, deadline=None)
@given(st.lists(entries, min_size=16, max_size=16))
def test_eigenvalues_match_numpy(values):
    a = np.array(values).reshape(4, 4)
    ref = sorted((complex(z) for z in np.linalg.eigvals(a)), key=_sorted_key)
    m = mat([[repr(values[4 * i + j]) for j in range(4)] for i in range(4)])
    mine = sorted((complex(float(z.real), float(z.imag))
                   for z in eigenvalues_4x4(m)), key=_sorted_key)
    scale = max(1.0, max(abs(z) for z in ref))
    for a_, b_ in zip(mine, ref):
        assert abs(a_ - b_) < 1e-7 * scale


def test_identity_eigenvalues():
    m = mat([["1", "0", "0", "0"], ["0", "1", "0", "0"],
             ["0", "0", "1", "0"], ["0", "0", "0", "1"]])
    with working_precision(35):
        eig = eigenvalues_4x4(m)
    for z in eig:
        assert abs(z.real - 1) < mpfr("1e-30")
        assert abs(z.imag) < mpfr("1e-30")


def test_diagonal_eigenvalues():
    m = mat([["2", "0", "0", "0"], ["0", "3", "0", "0"],
             ["0", "0", "5", "0"], ["0", "0", "0", "7"]])
    with working_precision(35):
        eig = sorted(eigenvalues_4x4(m), key=lambda z: float(z.real))
    for z, want in zip(eig, (2, 3, 5, 7)):
        assert abs(z.real - want) < mpfr("1e-28")
        assert abs(z.imag) < mpfr("1e-28")


def test_zero_period_is_identity(seed_state, params, config):
    mono = state_transition_matrix(seed_state, "0", params, config)
    for i in range(4):
        for j in range(4):
            assert mono.matrix[i][j] == (1 if i == j else 0)
    assert mono.determinant() == 1


def test_variational_agrees_with_central_difference(seed_state, params,
                                                    config, period):
    span = period / 40
    var = state_transition_matrix(seed_state, span, params, config,
                                  method="variational")
    cd = state_transition_matrix(seed_state, span, params, config,
                                 method="central_difference")
    worst = max(abs(var.matrix[i][j] - cd.matrix[i][j])
                for i in range(4) for j in range(4))
    assert worst < mpfr("1e-6")


def test_variational_determinant_symplectic(seed_state, params, config,
                                            period):
    mono = state_transition_matrix(seed_state, period / 20, params, config,
                                   method="variational")
    with working_precision(config.precision_digits):
        assert abs(mono.determinant() - 1) < mpfr("1e-20")


def test_classify_stable():
    vals = eigenvalues_4x4(mat([["0", "-1", "0", "0"], ["1", "0", "0", "0"],
                                ["0", "0", "0", "-1"], ["0", "0", "1", "0"]]))
    report = classify_stability(vals)
    assert report.classification in ("marginal", "stable")
    for m in report.moduli:
        assert abs(m - 1) < mpfr("1e-25")


def test_classify_unstable():
    vals = eigenvalues_4x4(mat([["2", "0", "0", "0"], ["0", "0.5", "0", "0"],
                                ["0", "0", "0", "-1"], ["0", "0", "1", "0"]]))
    report = classify_stability(vals)
    assert report.classification == "unstable"


def test_unknown_method_rejected(seed_state, params, config):
    with pytest.raises(ValueError):
        state_transition_matrix(seed_state, "1", params, config,
                                method="secret")

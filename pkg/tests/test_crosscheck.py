import gmpy2
import pytest
from gmpy2 import mpfr

from ertbp.crosscheck import propagate_crosscheck
from ertbp.dynamics import PhaseState, SystemParams, orbital_period
from ertbp.errors import ToleranceNotMet
from ertbp.precision import working_precision
from ertbp.taylor import propagate


def test_zero_span_is_identity(seed_state, params):
    assert propagate_crosscheck(seed_state, 0, params) is seed_state


def test_circular_kepler_closes():
    params = SystemParams.from_values(e="0", mu="1e-30", period_days=None)
    state = PhaseState.make(z=("0.5", "0"),
                            v=("0", "1.4142135623730950488016887242096980786"))
    with working_precision(35):
        t_end = 2 * gmpy2.const_pi() * mpfr("0.5") ** mpfr("1.5")
    final = propagate_crosscheck(state, t_end, params, tolerance="1e-28")
    with working_precision(35):
        assert abs(final.z[0] - mpfr("0.5")) < mpfr("1e-22")
        assert abs(final.z[1]) < mpfr("1e-22")


def test_agrees_with_taylor_over_partial_period(seed_state, params, config):
    with working_precision(config.precision_digits):
        t_end = orbital_period(params.e) / 20
    taylor = propagate(seed_state, t_end, params,
                       config.with_(order=12, step=None))
    rkf = propagate_crosscheck(seed_state, t_end, params, tolerance="1e-28")
    with working_precision(config.precision_digits):
        assert abs(taylor.z[0] - rkf.z[0]) < mpfr("1e-22")
        assert abs(taylor.z[1] - rkf.z[1]) < mpfr("1e-22")
        assert abs(taylor.theta - rkf.theta) < mpfr("1e-22")


def test_budget_exhaustion_raises(seed_state, params):
    with pytest.raises(ToleranceNotMet):
        propagate_crosscheck(seed_state, "1", params, tolerance="1e-25",
                             max_steps=3)

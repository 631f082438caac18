import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from ertbp.dynamics import (PhaseState, SystemParams, convert_state,
                            orbital_period, primary_positions,
                            reference_initial_state, reference_params,
                            spacecraft_acceleration, theta_rate, unit_system)
from ertbp.errors import CollisionSingularity, ConfigError
from ertbp.precision import as_mpfr, format_mpfr, working_precision


def test_reference_params_invariants(params):
    assert 0 <= params.e < 1
    assert 0 < params.mu < mpfr("0.5")
    with working_precision(35):
        # mu is the published value, not m2/(m1+m2) from the rounded masses
        assert params.mu == as_mpfr("0.000953339", 200)


def test_params_validation():
    with pytest.raises(ConfigError):
        SystemParams.from_values(e="1.0")
    with pytest.raises(ConfigError):
        SystemParams.from_values(mu="0.7")


def test_theta_rate_aphelion_and_perihelion(params):
    with working_precision(35):
        e = params.e
        at_aphelion = theta_rate(0, e)
        at_perihelion = theta_rate(gmpy2.const_pi(), e)
        assert abs(at_aphelion - gmpy2.sqrt(1 - e)) < mpfr("1e-33")
        expected = (1 + e) ** 2 / gmpy2.sqrt((1 - e) ** 3)
        assert abs(at_perihelion - expected) < mpfr("1e-32")
        assert at_aphelion < at_perihelion  # slowest at aphelion


@settings(max_examples=1000, deadline=None)
@given(st.floats(min_value=-10.0, max_value=10.0, allow_nan=False))
def test_center_of_mass_invariance(theta):
    params = reference_params()
    with working_precision(35):
        x, y = primary_positions(theta, params)
        com = ((1 - params.mu) * x[0] + params.mu * y[0],
               (1 - params.mu) * x[1] + params.mu * y[1])
        assert abs(com[0]) < mpfr("1e-33")
        assert abs(com[1]) < mpfr("1e-33")


def test_primary_separation_pulsates(params):
    with working_precision(35):
        x0, y0 = primary_positions(0, params)
        xp, yp = primary_positions(gmpy2.const_pi(), params)
        sep0 = gmpy2.sqrt((y0[0] - x0[0]) ** 2 + (y0[1] - x0[1]) ** 2)
        sepp = gmpy2.sqrt((yp[0] - xp[0]) ** 2 + (yp[1] - xp[1]) ** 2)
        assert abs(sep0 - 1) < mpfr("1e-33")  # aphelion separation is 1 ud
        expected = (1 - params.e) / (1 + params.e)
        assert abs(sepp - expected) < mpfr("1e-33")


def test_acceleration_is_attractive(params, seed_state):
    with working_precision(35):
        a = spacecraft_acceleration(seed_state, params)
        z = seed_state.z
        # far from Jupiter, acceleration points back toward the origin
        assert a[0] * z[0] + a[1] * z[1] < 0


def test_acceleration_sign_flip_is_reversed(params, seed_state):
    with working_precision(35):
        a = spacecraft_acceleration(seed_state, params)
        b = spacecraft_acceleration(seed_state, params, attractive=False)
        assert a[0] == -b[0] and a[1] == -b[1]


def test_collision_floor_raises(params):
    state = PhaseState.make(z=("0.9990466610", "0"), v=("0", "0"))
    near = reference_params()
    with working_precision(35):
        with pytest.raises(CollisionSingularity):
            spacecraft_acceleration(state, near, collision_floor="1e-3")


def test_orbital_period_published_digits(params):
    with working_precision(35):
        T = orbital_period(params.e)
        assert format_mpfr(T, 10) == "5.856497259e+00"


def test_unit_system_calendar_anchor(params):
    with working_precision(35):
        units = unit_system(params)
        assert units.ud_in_m == params.r0
        assert units.um_in_kg == params.m1 + params.m2
        assert format_mpfr(units.ut_in_s, 24) == "6.39214246027536259802333e+07"


def test_unit_system_dynamical_fallback():
    plain = SystemParams.from_values(period_days=None)
    with working_precision(35):
        units = unit_system(plain)
        mtot = plain.m1 + plain.m2
        expected = gmpy2.sqrt(plain.r0 ** 3 / (plain.G * mtot))
        assert units.ut_in_s == expected
        # the calendar anchor and the rounded SI constants agree to ~5 digits
        anchored = unit_system(reference_params())
        assert abs(units.ut_in_s / anchored.ut_in_s - 1) < mpfr("1e-4")


def test_convert_state_round_trip(params):
    with working_precision(35):
        units = unit_system(params)
        for kind, value in (("length", "0.25"), ("time", "2"), ("velocity", "-1.5")):
            si = convert_state(value, kind, "to_si", units)
            back = convert_state(si, kind, "from_si", units)
            assert abs(back - as_mpfr(value)) < mpfr("1e-32")
        vec = convert_state(("1", "2"), "length", "to_si", units)
        assert vec[1] == 2 * vec[0]


def test_convert_state_rejects_unknown(params):
    units = unit_system(params)
    with pytest.raises(ConfigError):
        convert_state("1", "area", "to_si", units)
    with pytest.raises(ConfigError):
        convert_state("1", "length", "sideways", units)


def test_reference_initial_state_parses_full_precision():
    state = reference_initial_state()
    with working_precision(35):
        assert state.t == 0 and state.theta == 0
        assert format_mpfr(state.z[0], 11) == "-3.8063861100e-02"
        assert format_mpfr(state.v[1], 11) == "-1.5096541883e+00"

import gmpy2
import pytest

from ertbp.dynamics import (orbital_period, reference_initial_state,
                            reference_params)
from ertbp.precision import working_precision
from ertbp.taylor import propagate, reference_config


@pytest.fixture(scope="session")
def params():
    return reference_params()


@pytest.fixture(scope="session")
def config():
    return reference_config()


@pytest.fixture(scope="session")
def seed_state():
    return reference_initial_state()


@pytest.fixture(scope="session")
def period(params, config):
    with working_precision(config.precision_digits):
        return orbital_period(params.e)


@pytest.fixture(scope="session")
def full_period_state(seed_state, period, params, config):
    """The state after one full period with the reference configuration.

    Session-scoped: this 10,000-step extended-precision run backs several
    tests and the acceptance gate.
    """
    return propagate(seed_state, period, params, config)

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from semicomp.spaces import de_sitter, friedmann_space, minkowski

settings.register_profile(
    "semicomp", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("semicomp")


@pytest.fixture(scope="session")
def desitter():
    return de_sitter()


@pytest.fixture(scope="session")
def friedmann0():
    return friedmann_space(0)


@pytest.fixture(scope="session")
def mink():
    return minkowski()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from thetasing.theta import make_context

settings.register_profile(
    "default",
    derandomize=True,
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", derandomize=False, deadline=None, max_examples=200)
settings.load_profile("default")

HALF = (1 + 1j) / 2


@pytest.fixture(scope="session")
def prod2():
    return make_context(np.diag([1j, 1j]))


@pytest.fixture(scope="session")
def prod3():
    return make_context(np.diag([1j, 1j, 1j]))


@pytest.fixture(scope="session")
def generic2():
    tau = np.array([[0.2 + 1.1j, 0.35 + 0.3j], [0.35 + 0.3j, -0.1 + 0.95j]])
    return make_context(tau)


@pytest.fixture(scope="session")
def elliptic():
    return make_context([[0.2 + 1.1j]])

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from garsia_kit.boundary import make_grid

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    return make_grid(14)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(10)

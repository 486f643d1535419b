import numpy as np
import pytest

from dualbm import make_grid


@pytest.fixture(scope="session")
def circle():
    return make_grid(2, 64)


@pytest.fixture(scope="session")
def sphere():
    return make_grid(3, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

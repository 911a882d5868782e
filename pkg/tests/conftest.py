import numpy as np
import pytest

from riccati_pde.grid import make_grid


@pytest.fixture
def grid64():
    return make_grid(20.0, 64)


@pytest.fixture
def grid256():
    return make_grid(20.0, 256)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)

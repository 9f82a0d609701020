import numpy as np
import pytest

from kawafd import GridFunction, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)


def random_gf(grid, rng) -> GridFunction:
    return GridFunction(grid, rng.standard_normal(grid.n))


@pytest.fixture
def unit_grid():
    return make_grid(0.0, 1.0, 64)

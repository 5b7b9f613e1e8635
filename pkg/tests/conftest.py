import numpy as np
import pytest

from hodgelets.complex import from_simplices


@pytest.fixture
def filled_triangle():
    return from_simplices(3, [], [(1, 2, 3)])


@pytest.fixture
def empty_triangle():
    return from_simplices(3, [(1, 2), (2, 3), (1, 3)], [])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import random

import numpy as np
import pytest

from ncwaring.exactmat import Mat
from ncwaring.fields import QQ


@pytest.fixture
def seed():
    return 7


@pytest.fixture
def rng(seed):
    return random.Random(seed)


@pytest.fixture
def np_rng(seed):
    return np.random.default_rng(seed)


def _random_rows(rng, n, height):
    return [[rng.randint(-height, height) for _ in range(n)] for _ in range(n)]


@pytest.fixture
def random_mat(rng):
    def make(n, height=5, field=QQ):
        return Mat(_random_rows(rng, n, height), field)
    return make


@pytest.fixture
def random_traceless(rng):
    def make(n, height=3):
        rows = _random_rows(rng, n, height)
        rows[-1][-1] = -sum(rows[i][i] for i in range(n - 1))
        return Mat(rows)
    return make


@pytest.fixture
def random_invertible(rng):
    def make(n, height=3, field=QQ):
        while True:
            p = Mat(_random_rows(rng, n, height), field)
            if p.det() != 0:
                return p
    return make


@pytest.fixture
def random_nilpotent(rng, random_invertible):
    def make(n, height=3):
        rows = [[rng.randint(-height, height) if j > i else 0 for j in range(n)] for i in range(n)]
        p = random_invertible(n)
        return p @ Mat(rows) @ p.inverse()
    return make

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from classify import build_model  # noqa: E402
from models import MatrixPair, ModelTag  # noqa: E402


@pytest.fixture
def model_a():
    return build_model(ModelTag.A, g=0.5, theta=np.pi / 2)


@pytest.fixture
def model_b():
    return build_model(ModelTag.B, g=0.5, c=1.0)


@pytest.fixture
def model_c():
    return build_model(ModelTag.C, u=1.0, g=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_pair(rng):
    def make() -> MatrixPair:
        a0 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        a1 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        return MatrixPair(a0, a1)
    return make

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

from aniso.geometry import Simplex, measure

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def simplices(draw, dims=(2, 3), min_shape=1e-4):
    """Non-degenerate simplices with coordinates in [-10, 10]."""
    d = draw(st.sampled_from(dims))
    coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
    V = np.array(draw(st.lists(st.lists(coord, min_size=d, max_size=d), min_size=d + 1, max_size=d + 1)))
    h = max(np.linalg.norm(a - b) for a in V for b in V)
    with np.errstate(all="ignore"):
        vol = abs(np.linalg.det(V[1:] - V[0])) / math.factorial(d)
    assume(h > 1e-3 and vol > min_shape * h**d)
    return Simplex(V)


def random_simplex(rng: np.random.Generator, d: int) -> Simplex:
    while True:
        T = Simplex(rng.normal(size=(d + 1, d)))
        if measure(T) > 1e-2 * T.diameter() ** d:
            return T


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def unit_triangle():
    return Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))


@pytest.fixture
def unit_tet():
    return Simplex(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]))

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aniso.fields import global_frame, polynomial_field, random_polynomial
from aniso.geometry import Simplex
from aniso.polynomial import (
    LocalFrame,
    Polynomial,
    PolynomialBatch,
    dim_P,
    linear_combination,
    monomial_exponents,
)

from conftest import random_simplex


@pytest.mark.parametrize("d,k", [(2, 0), (2, 3), (3, 2), (3, 4)])
def test_monomial_count(d, k):
    E = monomial_exponents(d, k)
    assert len(E) == dim_P(d, k) == math.comb(d + k, k)
    degrees = E.sum(axis=1)
    assert np.all(np.diff(degrees) >= 0)


def test_value_and_derivatives_closed_form():
    # 2x^2 - xy + 3y^2
    p = polynomial_field(2, {(2, 0): 2.0, (1, 1): -1.0, (0, 2): 3.0})
    X = np.array([[0.3, -1.2], [2.0, 0.5]])
    x, y = X.T
    np.testing.assert_allclose(p.value(X), 2 * x**2 - x * y + 3 * y**2, rtol=1e-14)
    np.testing.assert_allclose(p.gradient(X), np.column_stack([4 * x - y, -x + 6 * y]), rtol=1e-14)
    np.testing.assert_allclose(p.derivative(X, 2)[0], [[4, -1], [-1, 6]], rtol=1e-14)
    np.testing.assert_allclose(p.derivative(X, 3), 0.0)


def test_barycentric_quadratic_matches_products(rng):
    T = random_simplex(rng, 3)
    frame = LocalFrame.of(T)
    lam = [Polynomial.barycentric(frame, i) for i in range(4)]
    Q = rng.normal(size=(4, 4))
    Q = Q + Q.T
    b = rng.normal(size=4)
    direct = Polynomial.constant(frame, 0.7)
    for i in range(4):
        direct = direct + lam[i] * b[i]
        for j in range(4):
            direct = direct + lam[i] * lam[j] * Q[i, j]
    fast = Polynomial.barycentric_quadratic(frame, Q, b, 0.7)
    X = rng.normal(size=(15, 3))
    np.testing.assert_allclose(fast.value(X), direct.value(X), atol=1e-10)


def test_batch_matches_individual(rng):
    T = random_simplex(rng, 2)
    frame = LocalFrame.of(T)
    polys = [Polynomial(frame, monomial_exponents(2, 3), rng.normal(size=10)) for _ in range(4)]
    polys.append(random_polynomial(2, 2, rng))  # different frame
    batch = PolynomialBatch(polys)
    X = rng.normal(size=(9, 2))
    np.testing.assert_allclose(batch.value(X), np.column_stack([p.value(X) for p in polys]), atol=1e-11)
    np.testing.assert_allclose(batch.derivative(X, 2), np.stack([p.derivative(X, 2) for p in polys], axis=1), atol=1e-9)


def test_linear_combination(rng):
    polys = [random_polynomial(3, 2, rng) for _ in range(3)]
    c = np.array([1.5, -2.0, 0.25])
    X = rng.normal(size=(6, 3))
    combo = linear_combination(polys, c)
    np.testing.assert_allclose(combo.value(X), sum(ci * p.value(X) for ci, p in zip(c, polys)), atol=1e-12)


def test_coefficient_vector_rejects_high_degree():
    p = polynomial_field(2, {(3, 0): 1.0})
    with pytest.raises(ValueError):
        p.coefficient_vector(2)


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]), st.integers(0, 4))
def test_rebase_preserves_function(seed, d, k):
    rng = np.random.default_rng(seed)
    q = random_polynomial(d, k, rng)
    T = Simplex(rng.normal(size=(d + 1, d)))
    r = q.rebased(LocalFrame.of(T))
    X = rng.normal(size=(8, d))
    scale = max(1.0, np.abs(q.value(X)).max())
    np.testing.assert_allclose(r.value(X), q.value(X), atol=1e-8 * scale)
    assert r.rebased(global_frame(d)).degree <= k


@given(st.integers(0, 2**32 - 1))
def test_mixed_frame_arithmetic(seed):
    rng = np.random.default_rng(seed)
    T = random_simplex(rng, 2)
    a = Polynomial(LocalFrame.of(T), monomial_exponents(2, 2), rng.normal(size=6))
    b = random_polynomial(2, 2, rng)
    X = rng.normal(size=(5, 2))
    np.testing.assert_allclose((a + b).value(X), a.value(X) + b.value(X), atol=1e-9)
    np.testing.assert_allclose((a * b).value(X), a.value(X) * b.value(X), atol=1e-8)
    np.testing.assert_allclose((b - a).value(X), b.value(X) - a.value(X), atol=1e-9)

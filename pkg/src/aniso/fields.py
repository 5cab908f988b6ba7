"""Scalar and vector fields with caller-supplied analytic derivatives."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import MissingDerivative
from .polynomial import LocalFrame, Polynomial, VectorPolynomial, _contract

Array = np.ndarray


@dataclass(frozen=True)
class ScalarField:
    """x -> f(x) with derivative tensors; ``derivatives[m]`` maps (n, d) to (n,) + (d,)*m."""

    fn: Callable[[Array], Array]
    derivatives: Mapping[int, Callable[[Array], Array]] = field(default_factory=dict)

    def value(self, X: Array) -> Array:
        return np.asarray(self.fn(np.atleast_2d(X)), dtype=float)

    __call__ = value

    def derivative(self, X: Array, order: int) -> Array:
        if order == 0:
            return self.value(X)
        if order not in self.derivatives:
            raise MissingDerivative(f"derivative of order {order} not supplied")
        return np.asarray(self.derivatives[order](np.atleast_2d(X)), dtype=float)


@dataclass(frozen=True)
class VectorField:
    """x -> v(x) in R^d with Jacobian J[i, j] = dv_i/dx_j."""

    fn: Callable[[Array], Array]
    jac: Callable[[Array], Array] | None = None

    def value(self, X: Array) -> Array:
        return np.asarray(self.fn(np.atleast_2d(X)), dtype=float)

    __call__ = value

    def derivative(self, X: Array, order: int) -> Array:
        if order == 0:
            return self.value(X)
        if order != 1 or self.jac is None:
            raise MissingDerivative(f"vector-field derivative of order {order} not supplied")
        return np.asarray(self.jac(np.atleast_2d(X)), dtype=float)

    def jacobian(self, X: Array) -> Array:
        return self.derivative(X, 1)

    def divergence(self, X: Array) -> Array:
        return np.trace(self.jacobian(X), axis1=1, axis2=2)


class Difference:
    """a - b for any two objects with value/derivative."""

    def __init__(self, a, b):
        self.a, self.b = a, b

    def value(self, X: Array) -> Array:
        return self.a.value(X) - self.b.value(X)

    __call__ = value

    def derivative(self, X: Array, order: int) -> Array:
        return self.a.derivative(X, order) - self.b.derivative(X, order)


class AffineComposition:
    """g(x) = f(M x + c); derivatives by the chain rule (scalar f only)."""

    def __init__(self, f, M: Array, c: Array):
        self.f, self.M, self.c = f, np.asarray(M, dtype=float), np.asarray(c, dtype=float)

    def _y(self, X: Array) -> Array:
        return np.atleast_2d(X) @ self.M.T + self.c

    def value(self, X: Array) -> Array:
        return self.f.value(self._y(X))

    __call__ = value

    def derivative(self, X: Array, order: int) -> Array:
        if order == 0:
            return self.value(X)
        return _contract(self.f.derivative(self._y(X), order), self.M, order)


def global_frame(dim: int) -> LocalFrame:
    return LocalFrame(np.zeros(dim), np.eye(dim))


def polynomial_field(dim: int, coeffs: Mapping[tuple[int, ...], float]) -> Polynomial:
    """Polynomial in global coordinates from {exponent tuple: coefficient}."""
    keys = list(coeffs)
    return Polynomial(global_frame(dim), np.array(keys, dtype=int), np.array([coeffs[k] for k in keys]))


def random_polynomial(dim: int, degree: int, rng: np.random.Generator, scale: float = 1.0) -> Polynomial:
    from .polynomial import monomial_exponents

    E = monomial_exponents(dim, degree)
    return Polynomial(global_frame(dim), E, scale * rng.normal(size=len(E)))


def random_vector_polynomial(dim: int, degree: int, rng: np.random.Generator) -> VectorPolynomial:
    return VectorPolynomial([random_polynomial(dim, degree, rng) for _ in range(dim)])

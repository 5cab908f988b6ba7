"""Polynomials in local affine coordinates of a simplex, with analytic derivatives.

A polynomial is stored as coefficients on monomials xi^alpha, where
``xi = Binv (x - x0)`` are the barycentric coordinates lambda_2..lambda_{d+1} of a
simplex. Working in these coordinates keeps coefficient sizes independent of the
element's scale and aspect ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np


def monomial_exponents(dim: int, degree: int) -> np.ndarray:
    """All exponents with |alpha| <= degree in graded lexicographic order."""
    out = []
    for total in range(degree + 1):
        for alpha in product(range(total, -1, -1), repeat=dim):
            if sum(alpha) == total:
                out.append(alpha)
    return np.array(out, dtype=int).reshape(-1, dim)


def dim_P(dim: int, degree: int) -> int:
    return math.comb(dim + degree, degree)


@dataclass(frozen=True)
class LocalFrame:
    x0: np.ndarray
    Binv: np.ndarray

    @classmethod
    def of(cls, T) -> "LocalFrame":
        return cls(np.array(T.vertices[0], dtype=float), np.linalg.inv(T.edge_matrix()))

    @property
    def dim(self) -> int:
        return self.x0.shape[0]

    def xi(self, X: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(X) - self.x0) @ self.Binv.T

    def same_as(self, other: "LocalFrame") -> bool:
        return self is other or (np.array_equal(self.x0, other.x0) and np.array_equal(self.Binv, other.Binv))


def _contract(t: np.ndarray, Binv: np.ndarray, order: int, start: int = 1) -> np.ndarray:
    """Transform a xi-derivative tensor (n, [k,] d, ..., d) to x-derivatives."""
    for ax in range(start, start + order):
        t = np.moveaxis(np.tensordot(t, Binv, axes=([ax], [0])), -1, ax)
    return t


def _powers(xi: np.ndarray, degree: int) -> np.ndarray:
    """pw[k, j, n] = xi[n, j] ** k for k <= degree."""
    return xi.T[None, :, :] ** np.arange(degree + 1)[:, None, None]


def _prepare(exps: np.ndarray, C: np.ndarray, beta: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray] | None:
    """Surviving exponents and scaled coefficients after d^beta/dxi^beta."""
    b = np.array(beta)
    red = exps - b
    ok = (red >= 0).all(axis=1)
    if not ok.any():
        return None
    fac = np.ones(exps.shape[0])
    for j in np.nonzero(b)[0]:
        for r in range(int(b[j])):
            fac = fac * (exps[:, j] - r)
    return red[ok], (C * fac)[:, ok].T


def _xi_derivative(prep: tuple[np.ndarray, np.ndarray] | None, k: int, pw: np.ndarray) -> np.ndarray:
    """Apply a prepared derivative to the power table; shape (n, k)."""
    if prep is None:
        return np.zeros((pw.shape[2], k))
    red, c = prep
    mon = pw[red[:, 0], 0]
    for j in range(1, red.shape[1]):
        mon = mon * pw[red[:, j], j]
    return mon.T @ c


def _derivative_tensor(
    frame: LocalFrame,
    exps: np.ndarray,
    C: np.ndarray,
    X: np.ndarray,
    order: int,
    cache: dict | None = None,
) -> np.ndarray:
    """x-derivatives of order ``order`` for coefficient rows C; shape (n, k) + (d,)*order.

    ``cache`` keeps prepared derivatives per multi-index between calls on the same coefficients.
    """
    xi = frame.xi(X)
    d = frame.dim
    k = C.shape[0]
    cache = {} if cache is None else cache
    pw = _powers(xi, int(exps.max(initial=0)))

    def part(beta):
        if beta not in cache:
            cache[beta] = _prepare(exps, C, beta)
        return _xi_derivative(cache[beta], k, pw)

    if order == 0:
        return part((0,) * d)
    t = np.empty((xi.shape[0], k) + (d,) * order)
    done: dict[tuple[int, ...], np.ndarray] = {}
    for idx in product(range(d), repeat=order):
        beta = tuple(int(v) for v in np.bincount(np.array(idx, dtype=int), minlength=d))
        if beta not in done:
            done[beta] = part(beta)
        t[(slice(None), slice(None)) + idx] = done[beta]
    return _contract(t, frame.Binv, order, start=2)


class Polynomial:
    """Scalar polynomial in local coordinates of a fixed simplex frame."""

    def __init__(self, frame: LocalFrame, exps: np.ndarray, coeffs: np.ndarray):
        self.frame = frame
        self.exps = np.asarray(exps, dtype=int).reshape(-1, frame.dim)
        self.coeffs = np.asarray(coeffs, dtype=float)
        self._prep: dict = {}

    @classmethod
    def constant(cls, frame: LocalFrame, c: float) -> "Polynomial":
        return cls(frame, np.zeros((1, frame.dim), dtype=int), np.array([c]))

    @classmethod
    def barycentric(cls, frame: LocalFrame, i: int) -> "Polynomial":
        """lambda_i (0-based vertex index) as a polynomial."""
        d = frame.dim
        if i == 0:
            exps = np.vstack([np.zeros(d, dtype=int), np.eye(d, dtype=int)])
            return cls(frame, exps, np.concatenate([[1.0], -np.ones(d)]))
        e = np.zeros((1, d), dtype=int)
        e[0, i - 1] = 1
        return cls(frame, e, np.array([1.0]))

    @classmethod
    def barycentric_quadratic(cls, frame: LocalFrame, Q: np.ndarray, b: np.ndarray, c: float) -> "Polynomial":
        """lambda^T Q lambda + b . lambda + c for the barycentric vector lambda of the frame."""
        d = frame.dim
        # lambda = L [1, xi]
        L = np.zeros((d + 1, d + 1))
        L[0, 0] = 1.0
        L[0, 1:] = -1.0
        L[1:, 1:] = np.eye(d)
        M = L.T @ np.asarray(Q, dtype=float) @ L
        M[0, :] += 0.5 * (L.T @ np.asarray(b, dtype=float))
        M[:, 0] += 0.5 * (L.T @ np.asarray(b, dtype=float))
        M[0, 0] += c
        E = np.vstack([np.zeros(d, dtype=int), np.eye(d, dtype=int)])
        exps = (E[:, None, :] + E[None, :, :]).reshape(-1, d)
        return cls(frame, exps, M.ravel())._simplified()

    @classmethod
    def monomials(cls, frame: LocalFrame, degree: int) -> list["Polynomial"]:
        E = monomial_exponents(frame.dim, degree)
        return [cls(frame, E[k : k + 1], np.array([1.0])) for k in range(len(E))]

    @property
    def dim(self) -> int:
        return self.frame.dim

    @property
    def degree(self) -> int:
        nz = np.abs(self.coeffs) > 0
        return int(self.exps[nz].sum(axis=1).max()) if nz.any() else 0

    def _simplified(self) -> "Polynomial":
        """Merge repeated monomials; terms come out in graded order."""
        if self.exps.shape[0] == 0:
            return self
        e = self.exps
        base = int(e.max()) + 1
        # graded key: total degree first, then exponents in descending lexicographic order
        key = e.sum(axis=1)
        for j in range(self.dim):
            key = key * base + (base - 1 - e[:, j])
        uniq_key, first, inv = np.unique(key, return_index=True, return_inverse=True)
        coeffs = np.bincount(inv, weights=self.coeffs, minlength=len(uniq_key))
        return Polynomial(self.frame, e[first], coeffs)

    def rebased(self, frame: LocalFrame) -> "Polynomial":
        """The same function expressed in the local coordinates of ``frame``."""
        if frame.same_as(self.frame):
            return self
        # xi_old = M xi_new + c
        M = self.frame.Binv @ np.linalg.inv(frame.Binv)
        c = self.frame.Binv @ (frame.x0 - self.frame.x0)
        d = self.dim
        lin_exps = np.vstack([np.zeros((1, d), dtype=int), np.eye(d, dtype=int)])
        lin = [Polynomial(frame, lin_exps, np.concatenate([[c[j]], M[j]])) for j in range(d)]
        powers = [[Polynomial.constant(frame, 1.0)] for _ in range(d)]
        out = Polynomial(frame, np.zeros((0, d), dtype=int), np.zeros(0))
        for e, coef in zip(self.exps, self.coeffs):
            term = Polynomial.constant(frame, coef)
            for j in range(d):
                while len(powers[j]) <= e[j]:
                    powers[j].append(powers[j][-1] * lin[j])
                if e[j]:
                    term = term * powers[j][e[j]]
            out = out + term
        return out

    def _aligned(self, other: "Polynomial") -> "Polynomial":
        return other.rebased(self.frame)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.frame, float(other))
        other = self._aligned(other)
        return Polynomial(self.frame, np.vstack([self.exps, other.exps]), np.concatenate([self.coeffs, other.coeffs]))._simplified()

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.frame, self.exps, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.frame, self.exps, self.coeffs * float(other))
        other = self._aligned(other)
        exps = (self.exps[:, None, :] + other.exps[None, :, :]).reshape(-1, self.dim)
        coeffs = (self.coeffs[:, None] * other.coeffs[None, :]).ravel()
        return Polynomial(self.frame, exps, coeffs)._simplified()

    __rmul__ = __mul__

    def __truediv__(self, c: float):
        return Polynomial(self.frame, self.exps, self.coeffs / float(c))

    def coefficient_vector(self, degree: int) -> np.ndarray:
        """Coefficients against monomial_exponents(dim, degree)."""
        E = monomial_exponents(self.dim, degree)
        index = {tuple(a): k for k, a in enumerate(E)}
        out = np.zeros(len(E))
        for a, c in zip(map(tuple, self.exps), self.coeffs):
            if a not in index:
                if c != 0.0:
                    raise ValueError(f"monomial {a} exceeds degree {degree}")
                continue
            out[index[a]] += c
        return out

    def value(self, X: np.ndarray) -> np.ndarray:
        return _derivative_tensor(self.frame, self.exps, self.coeffs[None, :], X, 0, self._prep)[:, 0]

    __call__ = value

    def derivative(self, X: np.ndarray, order: int) -> np.ndarray:
        """Tensor of order-th partial derivatives in x, shape (n,) + (d,)*order."""
        if order == 0:
            return self.value(X)
        return _derivative_tensor(self.frame, self.exps, self.coeffs[None, :], X, order, self._prep)[:, 0]

    def gradient(self, X: np.ndarray) -> np.ndarray:
        return self.derivative(X, 1)


class PolynomialBatch:
    """Polynomials on a common frame evaluated together; a batch axis follows the point axis."""

    def __init__(self, polys: list[Polynomial]):
        self.frame = polys[0].frame
        polys = [p.rebased(self.frame) for p in polys]
        merged = Polynomial(self.frame, np.vstack([p.exps for p in polys]), np.zeros(sum(len(p.coeffs) for p in polys)))
        self.exps = merged._simplified().exps
        index = {tuple(a): i for i, a in enumerate(self.exps)}
        self.C = np.zeros((len(polys), len(self.exps)))
        for k, p in enumerate(polys):
            for a, c in zip(map(tuple, p.exps), p.coeffs):
                self.C[k, index[a]] += c
        self._prep: dict = {}

    def value(self, X: np.ndarray) -> np.ndarray:
        return _derivative_tensor(self.frame, self.exps, self.C, X, 0, self._prep)

    __call__ = value

    def derivative(self, X: np.ndarray, order: int) -> np.ndarray:
        if order == 0:
            return self.value(X)
        return _derivative_tensor(self.frame, self.exps, self.C, X, order, self._prep)


class VectorPolynomial:
    """R^d-valued polynomial; component k is a Polynomial."""

    def __init__(self, components: list[Polynomial]):
        self.components = list(components)
        self._batch: PolynomialBatch | None = None

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def frame(self) -> LocalFrame:
        return self.components[0].frame

    def __add__(self, other: "VectorPolynomial") -> "VectorPolynomial":
        return VectorPolynomial([a + b for a, b in zip(self.components, other.components)])

    def __mul__(self, c: float) -> "VectorPolynomial":
        return VectorPolynomial([a * float(c) for a in self.components])

    __rmul__ = __mul__

    @property
    def batch(self) -> PolynomialBatch:
        if self._batch is None:
            self._batch = PolynomialBatch(self.components)
        return self._batch

    def value(self, X: np.ndarray) -> np.ndarray:
        return self.batch.value(X)

    __call__ = value

    def derivative(self, X: np.ndarray, order: int) -> np.ndarray:
        """Shape (n, d) + (d,)*order; the component index comes first."""
        return self.batch.derivative(X, order)

    def jacobian(self, X: np.ndarray) -> np.ndarray:
        return self.derivative(X, 1)

    def divergence(self, X: np.ndarray) -> np.ndarray:
        return np.trace(self.jacobian(X), axis1=1, axis2=2)


def linear_combination(polys: list, coeffs: np.ndarray):
    """Sum_k coeffs[k] * polys[k] for Polynomial or VectorPolynomial lists."""
    if isinstance(polys[0], VectorPolynomial):
        return VectorPolynomial(
            [linear_combination([p.components[c] for p in polys], coeffs) for c in range(polys[0].dim)]
        )
    polys = [p.rebased(polys[0].frame) for p in polys]
    exps = np.vstack([p.exps for p in polys])
    vals = np.concatenate([p.coeffs * float(c) for p, c in zip(polys, coeffs)])
    return Polynomial(polys[0].frame, exps, vals)._simplified()

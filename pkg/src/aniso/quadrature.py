"""Quadrature on simplices and their facets.

Rules are conical (collapsed) Gauss-Jacobi products: positive weights and any
requested exactness degree. Nodes are stored in barycentric coordinates and weights
sum to the reference measure 1/k!.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

from .errors import QuadratureFailure

DEFAULT_DEGREE = {1: 8, 2: 8, 3: 6}
LINF_DEGREE = 12
ENV_DEGREE = "ANISO_QUAD_DEGREE"


@dataclass(frozen=True)
class QuadratureRule:
    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.shape != (weights.shape[0], self.dim + 1):
            raise QuadratureFailure(f"nodes must be barycentric of shape (n, {self.dim + 1})")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def reference_measure(self) -> float:
        return 1.0 / math.factorial(self.dim)

    def points(self, vertices: np.ndarray) -> np.ndarray:
        return self.nodes @ np.asarray(vertices, dtype=float)


@lru_cache(maxsize=None)
def _conical_rule(dim: int, degree: int) -> QuadratureRule:
    if dim == 0:
        return QuadratureRule(0, np.ones((1, 1)), np.ones(1), degree)
    m = max(1, math.ceil((degree + 1) / 2))
    axes = []
    for i in range(dim):
        alpha = dim - 1 - i
        x, w = roots_jacobi(m, alpha, 0.0)
        axes.append(((1.0 + x) / 2.0, w / 2.0 ** (alpha + 1)))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgrid = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    W = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    X = np.empty_like(U)
    rest = np.ones(U.shape[0])
    for i in range(dim):
        X[:, i] = rest * U[:, i]
        rest = rest * (1.0 - U[:, i])
    bary = np.column_stack([1.0 - X.sum(axis=1), X])
    return QuadratureRule(dim, bary, W, degree)


def default_degree(dim: int) -> int:
    env = os.environ.get(ENV_DEGREE)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise QuadratureFailure(f"{ENV_DEGREE} must be an integer, got {env!r}") from exc
    return DEFAULT_DEGREE[dim]


def rule(dim: int, degree: int | None = None) -> QuadratureRule:
    """Positive-weight rule on the reference dim-simplex exact to ``degree``."""
    return _conical_rule(dim, default_degree(dim) if degree is None else int(degree))


def integrate_embedded(vertices: np.ndarray, f: Callable[[np.ndarray], np.ndarray], q: QuadratureRule) -> np.ndarray:
    """Integral of f over a k-simplex embedded in R^n (k = len(vertices) - 1)."""
    from .geometry import simplex_measure

    vertices = np.asarray(vertices, dtype=float)
    X = q.points(vertices)
    vals = np.asarray(f(X), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise QuadratureFailure("integrand is not finite at a quadrature node")
    scale = simplex_measure(vertices) / q.reference_measure
    return scale * np.tensordot(q.weights, vals, axes=(0, 0))


def integrate(T, f: Callable[[np.ndarray], np.ndarray], q: QuadratureRule | None = None) -> np.ndarray:
    """Integral over the simplex T of f, where f maps (n, d) points to (n, ...) values."""
    q = q or rule(T.dim)
    return integrate_embedded(T.vertices, f, q)


def mean_embedded(vertices: np.ndarray, f: Callable[[np.ndarray], np.ndarray], q: QuadratureRule) -> np.ndarray:
    vertices = np.asarray(vertices, dtype=float)
    if len(vertices) == 1:
        return np.asarray(f(vertices), dtype=float)[0]
    X = q.points(vertices)
    vals = np.asarray(f(X), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise QuadratureFailure("integrand is not finite at a quadrature node")
    return np.tensordot(q.weights, vals, axes=(0, 0)) / q.reference_measure


def sample_points(T, degree: int = LINF_DEGREE, lattice: int = 8) -> np.ndarray:
    """Points for L-infinity approximations: rule nodes, vertices and a barycentric lattice."""
    return _sample_bary(T.dim, degree, lattice) @ T.vertices


@lru_cache(maxsize=None)
def _sample_bary(d: int, degree: int, lattice: int) -> np.ndarray:
    lat = []
    for idx in np.ndindex(*([lattice + 1] * d)):
        if sum(idx) <= lattice:
            x = np.array(idx, dtype=float) / lattice
            lat.append(np.concatenate([[1.0 - x.sum()], x]))
    bary = np.vstack([rule(d, degree).nodes, np.array(lat)])
    bary.setflags(write=False)
    return bary

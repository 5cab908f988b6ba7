"""Reference-element machinery: barycentric coordinates, dofs and shape bases."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import geometry as geo
from .errors import UnsupportedDegree, WrongDimension
from .geometry import Simplex
from .polynomial import (
    LocalFrame,
    Polynomial,
    PolynomialBatch,
    VectorPolynomial,
    dim_P,
    linear_combination,
    monomial_exponents,
)
from .quadrature import mean_embedded, integrate_embedded, rule


class ElementKind(str, Enum):
    Lagrange = "Lagrange"
    P1Bubble = "P1Bubble"
    CR = "CR"
    NodalCR = "NodalCR"
    Morley = "Morley"
    RT0 = "RT0"


def barycentric(T: Simplex, x: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of one point (d,) or many points (n, d)."""
    geo.measure(T)
    X = np.atleast_2d(np.asarray(x, dtype=float))
    xi = np.linalg.solve(T.edge_matrix(), (X - T.vertices[0]).T).T
    lam = np.column_stack([1.0 - xi.sum(axis=1), xi])
    return lam[0] if np.ndim(x) == 1 else lam


# Degrees of freedom ---------------------------------------------------------
# Each dof returns a float, or a vector when applied to a PolynomialBatch.


def _out(x) -> float | np.ndarray:
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class PointValue:
    point: np.ndarray

    def __call__(self, f) -> float:
        return _out(np.asarray(f.value(self.point[None, :]))[0])


@dataclass(frozen=True)
class SubsimplexMean:
    """Mean of f over the simplex spanned by ``vertices`` (a point value for one vertex)."""

    vertices: np.ndarray

    def __call__(self, f) -> float:
        k = len(self.vertices) - 1
        if k == 0:
            return _out(np.asarray(f.value(self.vertices))[0])
        return _out(mean_embedded(self.vertices, f.value, rule(k)))


FaceMean = SubsimplexMean


@dataclass(frozen=True)
class NormalDerivativeMean:
    vertices: np.ndarray
    normal: np.ndarray

    def __call__(self, f) -> float:
        k = len(self.vertices) - 1
        return _out(mean_embedded(self.vertices, lambda X: f.derivative(X, 1) @ self.normal, rule(k)))


@dataclass(frozen=True)
class FaceFlux:
    """Integral of v.n over a facet with outward unit normal n."""

    vertices: np.ndarray
    normal: np.ndarray

    def __call__(self, v) -> float:
        k = len(self.vertices) - 1
        return float(integrate_embedded(self.vertices, lambda X: v.value(X) @ self.normal, rule(k)))


@dataclass
class ShapeBasis:
    kind: ElementKind
    simplex: Simplex
    functions: list
    dofs: list
    degree: int

    def __len__(self) -> int:
        return len(self.functions)

    def duality_matrix(self) -> np.ndarray:
        """M[i, j] = chi_i(theta_j)."""
        return dof_matrix(self.dofs, self.functions)

    def dof_values(self, f) -> np.ndarray:
        return np.array([chi(f) for chi in self.dofs])


def dof_matrix(dofs: list, functions: list) -> np.ndarray:
    """M[i, j] = chi_i(f_j); scalar polynomials are evaluated as one batch."""
    if all(isinstance(f, Polynomial) for f in functions):
        batch = PolynomialBatch(functions)
        return np.array([np.broadcast_to(chi(batch), (len(functions),)) for chi in dofs])
    return np.array([[chi(f) for f in functions] for chi in dofs])


def nodal_basis(kind: ElementKind, T: Simplex, generators: list, dofs: list, degree: int) -> ShapeBasis:
    """Basis dual to ``dofs`` obtained by inverting the dof matrix on ``generators``."""
    D = dof_matrix(dofs, generators)
    C = np.linalg.inv(D)
    funcs = [linear_combination(generators, C[:, j]) for j in range(len(dofs))]
    return ShapeBasis(kind, T, funcs, dofs, degree)


def _lambdas(T: Simplex) -> tuple[LocalFrame, list[Polynomial]]:
    geo.measure(T)
    frame = LocalFrame.of(T)
    return frame, [Polynomial.barycentric(frame, i) for i in range(T.nverts)]


def lagrange_nodes(T: Simplex, k: int) -> np.ndarray:
    """Points sum_i (a_i / k) p_i over multi-indices |a| = k."""
    d = T.dim
    pts = []
    for a in monomial_exponents(d + 1, k):
        if a.sum() == k:
            pts.append(a / k)
    return np.array(pts) @ T.vertices


def lagrange_basis(T: Simplex, k: int = 1) -> ShapeBasis:
    if k not in (1, 2):
        raise UnsupportedDegree(f"Lagrange degree {k} not supported (1 or 2)")
    frame, lam = _lambdas(T)
    if k == 1:
        return ShapeBasis(ElementKind.Lagrange, T, lam, [PointValue(p) for p in T.vertices], 1)
    nodes = lagrange_nodes(T, 2)
    gens = Polynomial.monomials(frame, 2)
    return nodal_basis(ElementKind.Lagrange, T, gens, [PointValue(p) for p in nodes], 2)


def p1bubble_basis(T: Simplex) -> ShapeBasis:
    if T.dim != 2:
        raise WrongDimension("P1+bubble is defined for triangles only")
    _, lam = _lambdas(T)
    bubble = lam[0] * lam[1] * lam[2] * 27.0
    funcs = [lam[i] - bubble / 3.0 for i in range(3)] + [bubble]
    dofs = [PointValue(p) for p in T.vertices] + [PointValue(T.centroid())]
    return ShapeBasis(ElementKind.P1Bubble, T, funcs, dofs, 3)


def _facets(T: Simplex) -> list[np.ndarray]:
    return [geo.facet_vertices(T, i) for i in range(T.nverts)]


def cr_basis(T: Simplex) -> ShapeBasis:
    """theta_i = d (1/d - lambda_i) with face-mean dofs on F_i (opposite p_i)."""
    _, lam = _lambdas(T)
    d = T.dim
    funcs = [1.0 - lam[i] * float(d) for i in range(d + 1)]
    return ShapeBasis(ElementKind.CR, T, funcs, [FaceMean(F) for F in _facets(T)], 1)


def nodal_cr_basis(T: Simplex) -> ShapeBasis:
    _, lam = _lambdas(T)
    d = T.dim
    funcs = [1.0 - lam[i] * float(d) for i in range(d + 1)]
    return ShapeBasis(ElementKind.NodalCR, T, funcs, [PointValue(F.mean(axis=0)) for F in _facets(T)], 1)


def morley_dofs(T: Simplex) -> tuple[list, list, list[tuple[int, int]]]:
    """(chi1, chi2, pairs): subsimplex means indexed by pairs (i, j) and facet normal derivative means."""
    n = geo.outward_normals(T)
    idx = range(T.nverts)
    pairs = list(combinations(idx, 2))
    chi1 = [SubsimplexMean(T.vertices[[m for m in idx if m not in p]]) for p in pairs]
    chi2 = [NormalDerivativeMean(geo.facet_vertices(T, i), n[i]) for i in idx]
    return chi1, chi2, pairs


def morley_basis(T: Simplex) -> ShapeBasis:
    """Morley basis from the closed-form expressions in barycentric coordinates.

    theta2_i = lambda_i (d lambda_i - 2) / (2 |grad lambda_i|)
    theta1_ij = 1 - (d-1)(lambda_i + lambda_j) + d(d-1) lambda_i lambda_j
                - (d-1)(grad lambda_i . grad lambda_j) sum_{k=i,j} lambda_k (d lambda_k - 2) / (2 |grad lambda_k|^2)
    theta1_ij is dual to the mean over the subsimplex not containing p_i, p_j.
    """
    geo.measure(T)
    frame = LocalFrame.of(T)
    d = T.dim
    G = geo.barycentric_gradients(T)
    g2 = np.einsum("ij,ij->i", G, G)
    chi1, chi2, pairs = morley_dofs(T)
    theta1 = []
    for i, j in pairs:
        gij = float(G[i] @ G[j])
        Q = np.zeros((d + 1, d + 1))
        b = np.zeros(d + 1)
        Q[i, j] = Q[j, i] = 0.5 * d * (d - 1)
        for k in (i, j):
            # lambda_k (d lambda_k - 2) / (2 |grad lambda_k|^2) scaled by -(d-1) grad_i.grad_j
            Q[k, k] -= (d - 1) * gij * d / (2.0 * g2[k])
            b[k] = -(d - 1) + (d - 1) * gij / g2[k]
        theta1.append(Polynomial.barycentric_quadratic(frame, Q, b, 1.0))
    theta2 = []
    for i in range(d + 1):
        Q = np.zeros((d + 1, d + 1))
        b = np.zeros(d + 1)
        Q[i, i] = d / (2.0 * math.sqrt(g2[i]))
        b[i] = -1.0 / math.sqrt(g2[i])
        theta2.append(Polynomial.barycentric_quadratic(frame, Q, b, 0.0))
    return ShapeBasis(ElementKind.Morley, T, theta1 + theta2, chi1 + chi2, 2)


def morley_basis_generic(T: Simplex) -> ShapeBasis:
    """Morley basis by inverting the dof matrix on P^2 (cross-check of the closed form)."""
    frame, _ = _lambdas(T)
    chi1, chi2, _ = morley_dofs(T)
    return nodal_basis(ElementKind.Morley, T, Polynomial.monomials(frame, 2), chi1 + chi2, 2)


def rt0_basis(T: Simplex, iota: np.ndarray | None = None) -> ShapeBasis:
    """theta_i = iota_i / (d |T|) (x - p_i) with outward face-flux dofs.

    ``iota`` holds the global orientation signs (+1 when the facet normal is outward).
    """
    frame, _ = _lambdas(T)
    d = T.dim
    vol = geo.measure(T)
    iota = np.ones(d + 1) if iota is None else np.asarray(iota, dtype=float)
    n = geo.outward_normals(T) * iota[:, None]
    # x - p_i in local coordinates: x = x0 + B xi
    B = T.edge_matrix()
    exps = np.vstack([np.zeros((1, d), dtype=int), np.eye(d, dtype=int)])
    funcs = []
    for i in range(d + 1):
        scale = iota[i] / (d * vol)
        comps = [
            Polynomial(frame, exps, np.concatenate([[T.vertices[0, c] - T.vertices[i, c]], B[c]]) * scale)
            for c in range(d)
        ]
        funcs.append(VectorPolynomial(comps))
    dofs = [FaceFlux(geo.facet_vertices(T, i), n[i]) for i in range(d + 1)]
    return ShapeBasis(ElementKind.RT0, T, funcs, dofs, 1)


def rt0_dimension(d: int, k: int = 0) -> int:
    """dim RT^k on a d-simplex."""
    if d == 2:
        return (k + 1) * (k + 3)
    return (k + 1) * (k + 2) * (k + 4) // 2


def basis_for(kind: ElementKind | str, T: Simplex, k: int = 1) -> ShapeBasis:
    """Shape basis of ``kind`` on T; recent bases are reused (they are never mutated)."""
    kind = ElementKind(kind)
    V = np.ascontiguousarray(T.vertices)
    return _cached_basis(kind, k, V.tobytes(), V.shape)


@lru_cache(maxsize=128)
def _cached_basis(kind: ElementKind, k: int, raw: bytes, shape: tuple[int, int]) -> ShapeBasis:
    T = Simplex(np.frombuffer(raw, dtype=float).reshape(shape).copy())
    if kind is ElementKind.Lagrange:
        return lagrange_basis(T, k)
    if kind is ElementKind.P1Bubble:
        return p1bubble_basis(T)
    if kind is ElementKind.CR:
        return cr_basis(T)
    if kind is ElementKind.NodalCR:
        return nodal_cr_basis(T)
    if kind is ElementKind.Morley:
        return morley_basis(T)
    return rt0_basis(T)


def space_dimension(kind: ElementKind, d: int, k: int = 1) -> int:
    kind = ElementKind(kind)
    if kind is ElementKind.Lagrange:
        return dim_P(d, k)
    if kind is ElementKind.P1Bubble:
        return 4
    if kind in (ElementKind.CR, ElementKind.NodalCR, ElementKind.RT0):
        return d + 1
    return dim_P(d, 2)

"""Local interpolation operators, L2 projections and the Piola transform."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from . import geometry as geo
from .basis import ElementKind, ShapeBasis, basis_for, rt0_basis
from .errors import QuadratureFailure, SingularGram, UnsupportedKind
from .fields import VectorField
from .geometry import Simplex
from .polynomial import LocalFrame, Polynomial, linear_combination
from .quadrature import QuadratureRule, integrate, rule
from .standardization import AffineFactorization


@dataclass
class Interpolant:
    kind: ElementKind | str
    simplex: Simplex
    coeffs: np.ndarray
    functions: list

    def __post_init__(self) -> None:
        if len(self.coeffs) != len(self.functions):
            raise ValueError("coefficient count must equal the number of basis functions")
        self.poly = linear_combination(self.functions, self.coeffs)

    def value(self, X: np.ndarray) -> np.ndarray:
        return self.poly.value(X)

    __call__ = value

    def derivative(self, X: np.ndarray, order: int) -> np.ndarray:
        return self.poly.derivative(X, order)

    def divergence(self, X: np.ndarray) -> np.ndarray:
        return self.poly.divergence(X)


def interpolate(kind: ElementKind | str, T: Simplex, f, k: int = 1) -> Interpolant:
    """I_T f = sum_i chi_i(f) theta_i for the element ``kind``."""
    try:
        kind = ElementKind(kind)
    except ValueError as exc:
        raise UnsupportedKind(f"unknown element kind {kind!r}") from exc
    basis = basis_for(kind, T, k)
    coeffs = basis.dof_values(f)
    if not np.all(np.isfinite(coeffs)):
        raise QuadratureFailure("non-finite degree of freedom")
    return Interpolant(kind, T, coeffs, basis.functions)


def interpolate_with(basis: ShapeBasis, f) -> Interpolant:
    return Interpolant(basis.kind, basis.simplex, basis.dof_values(f), basis.functions)


def rt0_interpolate(T: Simplex, v) -> Interpolant:
    """Lowest-order Raviart-Thomas interpolant matching the outward face fluxes of v."""
    basis = rt0_basis(T)
    coeffs = basis.dof_values(v)
    if not np.all(np.isfinite(coeffs)):
        raise QuadratureFailure("non-finite face flux")
    return Interpolant(ElementKind.RT0, T, coeffs, basis.functions)


def l2_project(T: Simplex, f, k: int = 0, q: QuadratureRule | None = None) -> Interpolant:
    """Pi^k f: the L2(T)-orthogonal projection onto P^k, by Cholesky on the Gram matrix."""
    frame = LocalFrame.of(T)
    basis = Polynomial.monomials(frame, k)
    q = q or rule(T.dim)
    X = q.points(T.vertices)
    w = q.weights * (geo.measure(T) / q.reference_measure)
    Phi = np.column_stack([b.value(X) for b in basis])
    G = Phi.T @ (w[:, None] * Phi)
    rhs = Phi.T @ (w * np.asarray(f.value(X), dtype=float))
    try:
        c = cho_solve(cho_factor(G), rhs)
    except LinAlgError as exc:
        raise SingularGram("Gram matrix is not positive definite") from exc
    return Interpolant(f"L2-P{k}", T, c, basis)


def mean_value(T: Simplex, values_fn, q: QuadratureRule | None = None) -> np.ndarray:
    """Pi^0 of a (possibly tensor-valued) function: its mean over T."""
    return integrate(T, values_fn, q) / geo.measure(T)


def piola_push(F: AffineFactorization, v_ref) -> VectorField:
    """v(x) = A v_hat(x_hat) / |det A| with x = A x_hat + b_T and A = A_T A_tilde A_hat.

    The absolute determinant keeps the divergence and flux identities sign-exact when
    A_T is a reflection.
    """
    A = F.A
    Ainv = np.linalg.inv(A)
    det = abs(np.linalg.det(A))
    b = F.b_T

    def xhat(X):
        return (np.atleast_2d(X) - b) @ Ainv.T

    def fn(X):
        return v_ref.value(xhat(X)) @ A.T / det

    def jac(X):
        J = v_ref.derivative(xhat(X), 1)
        return np.einsum("ij,njk,kl->nil", A, J, Ainv) / det

    return VectorField(fn, jac)


def piola_pull(F: AffineFactorization, v) -> VectorField:
    """Inverse of piola_push: v_hat(x_hat) = |det A| A^-1 v(x)."""
    A = F.A
    Ainv = np.linalg.inv(A)
    det = abs(np.linalg.det(A))
    b = F.b_T

    def x(Xh):
        return np.atleast_2d(Xh) @ A.T + b

    def fn(Xh):
        return v.value(x(Xh)) @ Ainv.T * det

    def jac(Xh):
        J = v.derivative(x(Xh), 1)
        return np.einsum("ij,njk,kl->nil", Ainv, J, A) * det

    return VectorField(fn, jac)


def commuting_residual(kind: ElementKind | str, T: Simplex, f, q: QuadratureRule | None = None) -> float:
    """Max over derivative components of ||D(I f) - Pi^0(D f)||_{L2(T)}.

    CR: D = first derivatives; Morley: second derivatives; RT0: divergence.
    """
    kind = ElementKind(kind)
    q = q or rule(T.dim)
    X = q.points(T.vertices)
    w = q.weights * (geo.measure(T) / q.reference_measure)
    if kind is ElementKind.RT0:
        I = rt0_interpolate(T, f)
        lhs = I.divergence(X)
        rhs = w @ np.trace(f.derivative(X, 1), axis1=1, axis2=2) / w.sum()
        return float(np.sqrt(w @ (lhs - rhs) ** 2))
    if kind is ElementKind.CR:
        order = 1
    elif kind is ElementKind.Morley:
        order = 2
    else:
        raise UnsupportedKind(f"no commuting diagram for {kind.value}")
    I = interpolate(kind, T, f)
    DI = I.derivative(X, order)
    Df = f.derivative(X, order)
    worst = 0.0
    for idx in combinations_with_replacement(range(T.dim), order):
        sl = (slice(None),) + idx
        mean = w @ Df[sl] / w.sum()
        worst = max(worst, float(np.sqrt(w @ (DI[sl] - mean) ** 2)))
    return worst

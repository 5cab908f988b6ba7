"""Seeded randomized invariant suites over geometry and operators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import special_ortho_group

from . import geometry as geo
from .basis import ElementKind, basis_for
from .fields import AffineComposition, Difference, random_polynomial, random_vector_polynomial
from .geometry import Simplex
from .interpolation import commuting_residual, interpolate, l2_project, piola_push, rt0_interpolate
from .norms import SeminormSpec, lp_norm, seminorm
from .quadrature import integrate, integrate_embedded, rule
from .quality import H_parameter, H_star
from .standardization import (
    direction_frame,
    factorize,
    standardize,
)

DEFAULT_SEED = 42
DEFAULT_COUNT = 1000


@dataclass(frozen=True)
class SimplexSampler:
    """Gaussian vertices; half the draws are stretched by 10^U(log10(stretch), 0) along
    random axes. Draws with |T| <= min_shape h_T^d are rejected."""

    stretch: float = 1e-3
    min_shape: float = 1e-6


# Geometry invariants are exact algebra and tolerate near-degenerate draws; operator
# identities lose about eps * cond^2 digits, so their sampler is milder.
GEOMETRY_SAMPLER = SimplexSampler(1e-3, 1e-6)
OPERATOR_SAMPLER = SimplexSampler(1e-2, 1e-4)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.name}: {status}{extra}"


def random_simplex(rng: np.random.Generator, d: int, sampler: SimplexSampler = GEOMETRY_SAMPLER) -> Simplex:
    while True:
        P = rng.normal(size=(d + 1, d))
        if rng.random() < 0.5:
            scales = 10.0 ** rng.uniform(math.log10(sampler.stretch), 0.0, size=d)
            P = P @ np.diag(scales) @ special_ortho_group.rvs(d, random_state=rng)
        T = Simplex(P)
        if geo.measure(T) > sampler.min_shape * T.diameter() ** d:
            return T


def simplices(seed: int, count: int, sampler: SimplexSampler = GEOMETRY_SAMPLER) -> list[Simplex]:
    """``count`` simplices alternating d = 2 and d = 3."""
    rng = np.random.default_rng(seed)
    return [random_simplex(rng, 2 + (i % 2), sampler) for i in range(count)]


def _result(name: str, worst: float, limit: float, fmt: str = "max {:.2e}", strict: bool = False) -> CheckResult:
    ok = worst < limit if strict else worst <= limit
    return CheckResult(name, bool(ok and math.isfinite(worst)), worst, fmt.format(worst))


# Geometry -------------------------------------------------------------------


def check_h_equivalence(Ts: list[Simplex]) -> CheckResult:
    """1/2 H* < H_T < 2 H* strictly; reports the extreme log2 ratio."""
    worst = max(abs(math.log2(H_parameter(T) / H_star(T))) for T in Ts)
    return _result("H_T vs H*_T equivalence", worst, 1.0, "max |log2(H/H*)| {:.3f}", strict=True)


def check_h_lower(Ts: list[Simplex]) -> CheckResult:
    """h_T <= H_T/2 (d=2), h_T <= H_T/6 (d=3)."""
    worst = max(T.diameter() * (2.0 if T.dim == 2 else 6.0) / H_parameter(T) for T in Ts)
    return _result("h_T <= H_T/2 (d=2), H_T/6 (d=3)", worst, 1.0 + 1e-12, "max c h_T/H_T {:.4f}")


def check_factorization(Ts: list[Simplex]) -> CheckResult:
    """|det(A_tilde A_hat)| = d!|T|, A_T orthogonal, vertices mapped onto T."""
    worst = 0.0
    for T in Ts:
        S = standardize(T)
        F = factorize(S)
        det = abs(np.linalg.det(F.A_tilde @ F.A_hat))
        worst = max(worst, abs(det / (math.factorial(T.dim) * geo.measure(T)) - 1.0))
        worst = max(worst, np.abs(F.A_T.T @ F.A_T - np.eye(T.dim)).max())
        mapped = F.to_physical(F.reference_vertices())
        worst = max(worst, np.abs(mapped - S.base.vertices).max() / T.diameter())
    return _result("factorization invariants", worst, 1e-10)


def check_condition_numbers(Ts: list[Simplex]) -> CheckResult:
    """Norm bounds of the factors: ||A_hat|| <= h_T, kappa(A_hat) = max h/min h,
    ||A_tilde|| <= sqrt2 | 2, kappa(A_tilde) <= H/h | (2/3)H/h, ||A_T|| = ||A_T^-1|| = 1.

    ``worst`` is the largest measured ratio (left side over right side).
    """
    worst = 0.0
    for T in Ts:
        S = standardize(T)
        F = factorize(S)
        hT = T.diameter()
        sv_hat = np.linalg.svd(F.A_hat, compute_uv=False)
        sv_t = np.linalg.svd(F.A_tilde, compute_uv=False)
        sv_T = np.linalg.svd(F.A_T, compute_uv=False)
        ratio_h = H_parameter(T) / hT
        bound_t = math.sqrt(2.0) if T.dim == 2 else 2.0
        bound_k = ratio_h if T.dim == 2 else 2.0 / 3.0 * ratio_h
        kappa_hat = sv_hat[0] / sv_hat[-1]
        worst = max(
            worst,
            sv_hat[0] / hT,
            sv_t[0] / bound_t,
            (sv_t[0] / sv_t[-1]) / bound_k,
            1.0 + abs(kappa_hat / (max(S.h) / min(S.h)) - 1.0),
            1.0 + max(abs(sv_T[0] - 1.0), abs(1.0 / sv_T[-1] - 1.0)),
        )
    return _result("condition-number bounds", worst, 1.0 + 1e-12, "max measured/bound {:.6f}")


def check_directions(Ts: list[Simplex]) -> CheckResult:
    """r_i = A_T r~_i."""
    worst = 0.0
    for T in Ts:
        S = standardize(T)
        F = factorize(S)
        D = direction_frame(S)
        worst = max(worst, np.abs(D.r - D.r_tilde @ F.A_T.T).max())
    return _result("direction vectors r_i = A_T r~_i", worst, 1e-10)


def check_idempotent(Ts: list[Simplex]) -> CheckResult:
    bad = 0
    for T in Ts:
        S = standardize(T)
        S2 = standardize(S.base)
        if S2.order != tuple(range(T.nverts)) or S2.type_tag is not S.type_tag:
            bad += 1
    return CheckResult("standardization idempotent", bad == 0, float(bad), f"{bad} relabelled")


def geometry_suite(seed: int = DEFAULT_SEED, count: int = DEFAULT_COUNT) -> list[CheckResult]:
    Ts = simplices(seed, count, GEOMETRY_SAMPLER)
    return [
        check_h_equivalence(Ts),
        check_h_lower(Ts),
        check_factorization(Ts),
        check_condition_numbers(Ts),
        check_directions(Ts),
        check_idempotent(Ts),
    ]


# Operators ------------------------------------------------------------------


def check_duality(Ts: list[Simplex]) -> CheckResult:
    worst = 0.0
    for T in Ts:
        for kind in ElementKind:
            if kind is ElementKind.P1Bubble and T.dim != 2:
                continue
            ks = (1, 2) if kind is ElementKind.Lagrange else (1,)
            for k in ks:
                D = basis_for(kind, T, k).duality_matrix()
                worst = max(worst, np.abs(D - np.eye(len(D))).max())
    return _result("duality matrices = I (all kinds)", worst, 1e-9)


def _relative_residual(kind: str, T: Simplex, f, order: int) -> float:
    res = commuting_residual(kind, T, f)
    if kind == "RT0":
        scale = lp_norm(T, _Div(f))
    else:
        scale = seminorm(T, f, SeminormSpec(m=order, convention="tensor"))
    return res / max(scale, np.finfo(float).tiny)


class _Div:
    def __init__(self, v):
        self.v = v

    def value(self, X):
        return np.trace(self.v.derivative(X, 1), axis1=1, axis2=2)


def check_commuting(Ts: list[Simplex], rng: np.random.Generator) -> list[CheckResult]:
    worst = {"CR": 0.0, "Morley": 0.0, "RT0": 0.0}
    for T in Ts:
        c = T.centroid()
        h = T.diameter()
        # fields are centred and scaled on T so their derivatives are O(1) there
        g = AffineComposition(random_polynomial(T.dim, 3, rng), np.eye(T.dim) / h, -c / h)
        worst["CR"] = max(worst["CR"], _relative_residual("CR", T, g, 1))
        g4 = AffineComposition(random_polynomial(T.dim, 4, rng), np.eye(T.dim) / h, -c / h)
        worst["Morley"] = max(worst["Morley"], _relative_residual("Morley", T, g4, 2))
        v = _shifted_vector(random_vector_polynomial(T.dim, 2, rng), c, h)
        worst["RT0"] = max(worst["RT0"], _relative_residual("RT0", T, v, 1))
    return [
        _result("CR commuting residual", worst["CR"], 1e-8),
        _result("Morley commuting residual", worst["Morley"], 1e-8),
        _result("RT0 commuting residual", worst["RT0"], 1e-8),
    ]


class _shifted_vector:
    """x -> v((x - c)/h) with Jacobian scaled by 1/h."""

    def __init__(self, v, c: np.ndarray, h: float):
        self.v, self.c, self.h = v, c, h

    def value(self, X):
        return self.v.value((np.atleast_2d(X) - self.c) / self.h)

    def derivative(self, X, order: int):
        if order == 0:
            return self.value(X)
        return self.v.derivative((np.atleast_2d(X) - self.c) / self.h, 1) / self.h


def _piola_gaps(T: Simplex, rng: np.random.Generator) -> float:
    """Largest relative gap among the three Piola integral identities."""
    d = T.dim
    F = factorize(standardize(T))
    A = F.A
    Ainv = np.linalg.inv(A)
    That = Simplex(F.reference_vertices())
    vhat = random_vector_polynomial(d, 2, rng)
    phat = random_polynomial(d, 2, rng)
    v = piola_push(F, vhat)
    phi = AffineComposition(phat, Ainv, -Ainv @ F.b_T)

    def pair(Tk, vv, ff):
        div = integrate(Tk, lambda X: np.trace(vv.derivative(X, 1), axis1=1, axis2=2) * ff.value(X))
        adv = integrate(Tk, lambda X: np.einsum("ni,ni->n", vv.value(X), ff.derivative(X, 1)))
        n = geo.outward_normals(Tk)
        flux = sum(
            integrate_embedded(geo.facet_vertices(Tk, i), lambda X, i=i: (vv.value(X) @ n[i]) * ff.value(X), rule(d - 1))
            for i in range(d + 1)
        )
        return np.array([div, adv, flux], dtype=float)

    lhs = pair(T, v, phi)
    rhs = pair(That, vhat, phat)
    scale = np.maximum(np.abs(rhs), 1.0)
    return float(np.max(np.abs(lhs - rhs) / scale))


def check_piola(Ts: list[Simplex], rng: np.random.Generator) -> CheckResult:
    worst = max(_piola_gaps(T, rng) for T in Ts)
    return _result("Piola integral identities", worst, 1e-9)


def check_rt0_fluxes(Ts: list[Simplex], rng: np.random.Generator) -> CheckResult:
    """Face fluxes of I^RT0 v equal those of v."""
    worst = 0.0
    for T in Ts:
        v = _shifted_vector(random_vector_polynomial(T.dim, 2, rng), T.centroid(), T.diameter())
        I = rt0_interpolate(T, v)
        for chi in basis_for(ElementKind.RT0, T).dofs:
            a, b = chi(I.poly), chi(v)
            worst = max(worst, abs(a - b) / max(abs(b), geo.measure(T) ** ((T.dim - 1) / T.dim)))
    return _result("RT0 face fluxes preserved", worst, 1e-9)


def check_poincare(Ts: list[Simplex], rng: np.random.Generator) -> list[CheckResult]:
    """||Pi0 f - f|| <= h/pi |f|_1, |I^CR f - f|_1 <= h/pi |f|_2, |I^M f - f|_2 <= h/pi |f|_3.

    ``worst`` is the largest left/right ratio; seminorms sum over all ordered index
    sequences, as in the derivation of these bounds.
    """
    worst = {"P0": 0.0, "CR": 0.0, "M": 0.0}
    for T in Ts:
        h = T.diameter()
        c = T.centroid()
        base = random_polynomial(T.dim, 4, rng)
        f = AffineComposition(base, np.eye(T.dim) / h, -c / h)
        P0 = l2_project(T, f, 0)
        lhs = lp_norm(T, Difference(f, P0.poly))
        rhs = h / math.pi * seminorm(T, f, SeminormSpec(m=1, convention="tensor"))
        worst["P0"] = max(worst["P0"], lhs / rhs)
        Icr = interpolate("CR", T, f)
        lhs = seminorm(T, Difference(f, Icr.poly), SeminormSpec(m=1, convention="tensor"))
        rhs = h / math.pi * seminorm(T, f, SeminormSpec(m=2, convention="tensor"))
        worst["CR"] = max(worst["CR"], lhs / rhs)
        Im = interpolate("Morley", T, f)
        lhs = seminorm(T, Difference(f, Im.poly), SeminormSpec(m=2, convention="tensor"))
        rhs = h / math.pi * seminorm(T, f, SeminormSpec(m=3, convention="tensor"))
        worst["M"] = max(worst["M"], lhs / rhs)
    fmt = "max ratio {:.4f}"
    return [
        _result("Poincare bound for Pi0", worst["P0"], 1.0, fmt),
        _result("CR h_T/pi bound", worst["CR"], 1.0, fmt),
        _result("Morley h_T/pi bound", worst["M"], 1.0, fmt),
    ]


def check_lagrange_linf(Ts: list[Simplex], rng: np.random.Generator) -> CheckResult:
    """||f - I^L f||_inf <= c ||f||_inf with c <= d + 2."""
    worst = 0.0
    for T in Ts:
        f = AffineComposition(random_polynomial(T.dim, 3, rng), np.eye(T.dim) / T.diameter(), -T.centroid() / T.diameter())
        I = interpolate("Lagrange", T, f)
        c = lp_norm(T, Difference(f, I.poly), math.inf) / lp_norm(T, f, math.inf)
        worst = max(worst, c / (T.dim + 2))
    return _result("Lagrange L-infinity stability", worst, 1.0, "max c/(d+2) {:.4f}")


def operators_suite(seed: int = DEFAULT_SEED, count: int = DEFAULT_COUNT) -> list[CheckResult]:
    Ts = simplices(seed, count, OPERATOR_SAMPLER)
    rng = np.random.default_rng(seed + 1)
    return [
        check_duality(Ts),
        *check_commuting(Ts, rng),
        check_piola(Ts, rng),
        check_rt0_fluxes(Ts, rng),
        *check_poincare(Ts, rng),
        check_lagrange_linf(Ts, rng),
    ]


SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    "geometry": geometry_suite,
    "operators": operators_suite,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, count: int = DEFAULT_COUNT) -> list[CheckResult]:
    if name == "all":
        return geometry_suite(seed, count) + operators_suite(seed, count)
    return SUITES[name](seed, count)

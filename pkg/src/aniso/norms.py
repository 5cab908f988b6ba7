"""Sobolev (semi)norms on a simplex, Cartesian or directional, and weighted sums."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Sequence

import numpy as np

from .fields import Difference
from .geometry import Simplex, measure
from .quadrature import QuadratureRule, rule, sample_points

P_INF = float("inf")


@dataclass(frozen=True)
class SeminormSpec:
    """|f|_{W^{m,p}} with derivatives along ``directions`` (rows) or Cartesian axes.

    frame:
      "cartesian"   (sum_{|beta|=m} ||d^beta f||_p^p)^(1/p)
      "directional" same with d^beta taken along the rows of ``directions``
      "weighted"    sum_{|beta|=m} w^beta ||d^beta f||_p (no p-sum), with
                    ``weights`` such as the anisotropic lengths
    convention: "multi-index" counts each distinct beta once; "tensor" sums over all
    ordered index sequences (Frobenius norm of the derivative tensor).
    """

    m: int = 1
    p: float = 2.0
    frame: str = "cartesian"
    directions: np.ndarray | None = None
    weights: Sequence[float] | None = None
    convention: str = "multi-index"


def _index_sequences(d: int, m: int, convention: str):
    if m == 0:
        return [()]
    if convention == "tensor":
        return list(product(range(d), repeat=m))
    return list(combinations_with_replacement(range(d), m))


def _nodes(T: Simplex, p: float, q: QuadratureRule | None) -> tuple[np.ndarray, np.ndarray | None]:
    """Evaluation points and physical weights (None for the L-infinity node max)."""
    if p == P_INF:
        return sample_points(T), None
    q = q or rule(T.dim)
    w = q.weights * (measure(T) / q.reference_measure)
    return q.points(T.vertices), w


def _lp_values(vals: np.ndarray, w: np.ndarray | None, p: float) -> float:
    if w is None:
        return float(np.max(np.abs(vals)))
    return float(w @ np.abs(vals) ** p) ** (1.0 / p)


def lp_norm(T: Simplex, f, p: float = 2.0, q: QuadratureRule | None = None) -> float:
    """||f||_{L^p(T)} for a scalar field; vector fields use the Euclidean pointwise norm."""
    X, w = _nodes(T, p, q)
    v = np.asarray(f.value(X))
    if v.ndim > 1:
        v = np.linalg.norm(v, axis=-1)
    return _lp_values(v, w, p)


def derivative_norms(T: Simplex, f, spec: SeminormSpec, q: QuadratureRule | None = None) -> dict[tuple[int, ...], float]:
    """{index sequence: ||d^beta f||_{L^p(T)}} for all |beta| = spec.m."""
    X, w = _nodes(T, spec.p, q)
    t = np.asarray(f.derivative(X, spec.m))
    if spec.frame in ("directional", "weighted") and spec.directions is not None:
        R = np.asarray(spec.directions, dtype=float)
        for ax in range(1, spec.m + 1):
            t = np.moveaxis(np.tensordot(t, R, axes=([ax], [1])), -1, ax)
    out = {}
    for idx in _index_sequences(T.dim, spec.m, spec.convention):
        out[idx] = _lp_values(t[(slice(None),) + idx], w, spec.p)
    return out


def seminorm(T: Simplex, f, spec: SeminormSpec = SeminormSpec(), q: QuadratureRule | None = None) -> float:
    norms = derivative_norms(T, f, spec, q)
    if spec.frame == "weighted":
        w = np.ones(T.dim) if spec.weights is None else np.asarray(spec.weights, dtype=float)
        return float(sum(np.prod([w[k] for k in idx]) * v for idx, v in norms.items()))
    vals = np.array(list(norms.values()))
    if spec.p == P_INF:
        return float(vals.max())
    return float((vals**spec.p).sum() ** (1.0 / spec.p))


def sobolev_norm(T: Simplex, f, m: int, p: float = 2.0, q: QuadratureRule | None = None) -> float:
    """Full ||f||_{W^{m,p}} as the l^p combination of seminorms 0..m."""
    parts = [seminorm(T, f, SeminormSpec(m=j, p=p), q) for j in range(m + 1)]
    if p == P_INF:
        return max(parts)
    return float(sum(x**p for x in parts) ** (1.0 / p))


def error_seminorm(T: Simplex, f, interpolant, spec: SeminormSpec = SeminormSpec(), q: QuadratureRule | None = None) -> float:
    """|f - I f| in the seminorm described by ``spec``."""
    poly = getattr(interpolant, "poly", interpolant)
    return seminorm(T, Difference(f, poly), spec, q)


def directional_derivative(f, X: np.ndarray, r: np.ndarray) -> np.ndarray:
    """(r . grad) f at X."""
    return f.derivative(X, 1) @ np.asarray(r, dtype=float)


def jensen_sums(values: Sequence[float], r: float, s: float) -> tuple[float, float]:
    """(sum |a|^s)^(1/s) and (sum |a|^r)^(1/r); the first is <= the second when r <= s."""
    a = np.abs(np.asarray(values, dtype=float))
    return float((a**s).sum() ** (1.0 / s)), float((a**r).sum() ** (1.0 / r))


def richardson_gap(T: Simplex, f, interpolant, spec: SeminormSpec = SeminormSpec()) -> float:
    """Relative change of the error seminorm when the rule degree is doubled."""
    base = rule(T.dim)
    e1 = error_seminorm(T, f, interpolant, spec, base)
    e2 = error_seminorm(T, f, interpolant, spec, rule(T.dim, 2 * base.exactness_degree))
    return abs(e1 - e2) / max(abs(e2), np.finfo(float).tiny)

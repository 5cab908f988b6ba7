"""Vertex relabeling and the two-step affine factorization of a simplex.

The physical simplex T is the image of a reference simplex under
``x = A_T (A_tilde A_hat) x_hat + b_T`` with ``A_hat = diag(h)``, ``A_tilde`` upper
triangular with unit first column, and ``A_T`` orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from .errors import FactorizationFailure
from .geometry import Simplex, edge_length, measure

ORTHO_TOL = 1e-12
ROUNDTRIP_TOL = 1e-10


class SimplexType(str, Enum):
    TypeI = "TypeI"
    TypeII = "TypeII"


def reference_vertices(dim: int, type_tag: SimplexType = SimplexType.TypeI) -> np.ndarray:
    """Vertices of T_hat_1 (TypeI) or T_hat_2 (TypeII, p_hat_3 = (1,1,0))."""
    P = np.vstack([np.zeros(dim), np.eye(dim)])
    if type_tag is SimplexType.TypeII:
        if dim != 3:
            raise ValueError("TypeII reference exists only for d=3")
        P[2] = (1.0, 1.0, 0.0)
    return P


@dataclass(frozen=True)
class StandardizedSimplex:
    base: Simplex
    h: tuple[float, ...]
    type_tag: SimplexType
    params: dict[str, float]
    order: tuple[int, ...]
    frame: np.ndarray
    flags: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.base.dim


@dataclass(frozen=True)
class AffineFactorization:
    A_hat: np.ndarray
    A_tilde: np.ndarray
    A_T: np.ndarray
    b_T: np.ndarray
    type_tag: SimplexType

    @property
    def A(self) -> np.ndarray:
        """Full linear part A_T A_tilde A_hat."""
        return self.A_T @ self.A_tilde @ self.A_hat

    @property
    def dim(self) -> int:
        return self.A_hat.shape[0]

    def reference_vertices(self) -> np.ndarray:
        return reference_vertices(self.dim, self.type_tag)

    def to_physical(self, xhat: np.ndarray) -> np.ndarray:
        xhat = np.atleast_2d(xhat)
        return xhat @ self.A.T + self.b_T

    def to_reference(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.linalg.solve(self.A, (x - self.b_T).T).T


@dataclass(frozen=True)
class DirectionFrame:
    r: np.ndarray
    r_tilde: np.ndarray


@dataclass(frozen=True)
class MathscrH:
    values: tuple[float, ...]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _frame(P: np.ndarray) -> np.ndarray:
    """Orthonormal columns from Gram-Schmidt on p_2-p_1, p_3-p_1 (, p_4-p_1)."""
    d = P.shape[1]
    cols: list[np.ndarray] = []
    for k in range(1, d + 1):
        v = P[k] - P[0]
        for _ in range(2):
            for c in cols:
                v = v - np.dot(v, c) * c
        cols.append(_unit(v))
    return np.column_stack(cols)


def _pick(pairs: list[tuple[int, int]], L: dict, longest: bool) -> tuple[int, int]:
    if longest:
        best = max(L[p] for p in pairs)
    else:
        best = min(L[p] for p in pairs)
    return min(p for p in pairs if L[p] == best)


def _standardize_2d(T: Simplex) -> StandardizedSimplex:
    pairs = list(combinations(range(3), 2))
    L = {p: edge_length(T, *p) for p in pairs}
    i, j = _pick(pairs, L, longest=True)
    k = ({0, 1, 2} - {i, j}).pop()
    # p_2 is the endpoint farther from p_1; ties keep the smaller index first
    if L[tuple(sorted((k, j)))] > L[tuple(sorted((k, i)))]:
        i, j = j, i
    order = (k, i, j)
    P = T.vertices[list(order)]
    h1 = float(np.linalg.norm(P[1] - P[0]))
    h2 = float(np.linalg.norm(P[2] - P[0]))
    F = _frame(P)
    v3 = F.T @ (P[2] - P[0])
    s, t = v3[0] / h2, v3[1] / h2
    return StandardizedSimplex(
        base=Simplex(P), h=(h1, h2), type_tag=SimplexType.TypeI,
        params={"s": float(s), "t": float(t)}, order=order, frame=F,
        flags=_flags_2d(h1, h2, T.diameter(), s, t),
    )


def _flags_2d(h1, h2, hT, s, t) -> tuple[str, ...]:
    out = []
    if h2 > h1:
        out.append("h2>h1")
    if not t > 0:
        out.append("t<=0")
    return tuple(out)


def _standardize_3d(T: Simplex) -> StandardizedSimplex:
    pairs = list(combinations(range(4), 2))
    L = {p: edge_length(T, *p) for p in pairs}
    lmin = _pick(pairs, L, longest=False)
    adjacent = [p for p in pairs if p != lmin and len(set(p) & set(lmin)) == 1]
    lmax = _pick(adjacent, L, longest=True)
    a = (set(lmax) & set(lmin)).pop()
    b = (set(lmax) - {a}).pop()
    c = (set(lmin) - {a}).pop()
    e = ({0, 1, 2, 3} - {a, b, c}).pop()
    P0 = T.vertices
    mid = 0.5 * (P0[a] + P0[b])
    normal = P0[a] - P0[b]
    side_e = float(np.dot(P0[e] - mid, normal))
    if side_e >= 0.0:
        tag, order = SimplexType.TypeI, (a, b, c, e)
    else:
        tag, order = SimplexType.TypeII, (b, a, c, e)
    P = P0[list(order)]
    h1 = float(np.linalg.norm(P[1] - P[0]))
    h2 = L[lmin]
    h3 = float(np.linalg.norm(P[3] - P[0]))
    F = _frame(P)
    if tag is SimplexType.TypeI:
        v3 = F.T @ (P[2] - P[0])
        s1 = v3[0] / h2
    else:
        v3 = F.T @ (P[2] - P[1])
        s1 = -v3[0] / h2
    t1 = v3[1] / h2
    v4 = F.T @ (P[3] - P[0]) / h3
    params = {"s1": float(s1), "t1": float(t1), "s21": float(v4[0]), "s22": float(v4[1]), "t2": float(v4[2])}
    return StandardizedSimplex(
        base=Simplex(P), h=(h1, h2, h3), type_tag=tag, params=params, order=order, frame=F,
        flags=_flags_3d(h1, h2, h3, T.diameter(), params),
    )


def _flags_3d(h1, h2, h3, hT, p) -> tuple[str, ...]:
    tol = 1e-12 * hT
    out = []
    if not (p["s1"] > 0 and p["t1"] > 0):
        out.append("s1,t1 not positive")
    if h2 * p["s1"] > h1 / 2 + tol:
        out.append("h2*s1>h1/2")
    if not p["t2"] > 0:
        out.append("t2<=0")
    if h3 * p["s21"] > h1 / 2 + tol:
        out.append("h3*s21>h1/2")
    return tuple(out)


def standardize(T: Simplex) -> StandardizedSimplex:
    """Relabel T so that its vertex order satisfies the standard-position conditions.

    d=2: p_2p_3 is the longest edge and h_1 = |p_1p_2| >= h_2 = |p_1p_3|.
    d=3: h_2 is the shortest edge, h_1 the longest edge sharing one endpoint with it;
    the half-space test on the fourth vertex selects TypeI or TypeII.
    Any violated condition is listed in ``flags`` (empty in all cases seen so far).
    """
    measure(T)
    if T.dim == 2:
        return _standardize_2d(T)
    return _standardize_3d(T)


def a_tilde(S: StandardizedSimplex) -> np.ndarray:
    p = S.params
    if S.dim == 2:
        return np.array([[1.0, p["s"]], [0.0, p["t"]]])
    s1 = p["s1"] if S.type_tag is SimplexType.TypeI else -p["s1"]
    return np.array([[1.0, s1, p["s21"]], [0.0, p["t1"], p["s22"]], [0.0, 0.0, p["t2"]]])


def factorize(S: StandardizedSimplex) -> AffineFactorization:
    """Build A_hat, A_tilde, A_T, b_T with T = A_T (A_tilde A_hat) T_hat + b_T.

    A_T equals V (A_tilde A_hat V_hat)^-1 in exact arithmetic; it is taken from the
    Gram-Schmidt frame of the edge vectors so that roundoff is not amplified by the
    conditioning of A_tilde A_hat on very flat elements. The vertex round trip is then
    verified to 1e-10 h_T.
    """
    A_hat = np.diag(S.h)
    At = a_tilde(S)
    P = S.base.vertices
    Phat = reference_vertices(S.dim, S.type_tag)
    A_T = S.frame.copy()
    err = np.abs(A_T.T @ A_T - np.eye(S.dim)).max()
    if err > ORTHO_TOL:
        raise FactorizationFailure(f"A_T is not orthogonal (max deviation {err:.2e})")
    V = (P[1:] - P[0]).T
    Vt = At @ A_hat @ (Phat[1:] - Phat[0]).T
    mismatch = np.abs(A_T @ Vt - V).max()
    if mismatch > ROUNDTRIP_TOL * S.base.diameter():
        raise FactorizationFailure(f"reference vertices do not map onto T (mismatch {mismatch:.2e})")
    return AffineFactorization(A_hat=A_hat, A_tilde=At, A_T=A_T, b_T=P[0].copy(), type_tag=S.type_tag)


def mathscr_h(S: StandardizedSimplex) -> MathscrH:
    p = S.params
    if S.dim == 2:
        return MathscrH((S.h[0], S.h[1] * p["t"]))
    return MathscrH((S.h[0], S.h[1] * p["t1"], S.h[2] * p["t2"]))


def min_condition_M(S: StandardizedSimplex) -> float:
    """Smallest M with |s_22| <= M h_2 t_1 / h_3 (0 for d=2)."""
    if S.dim == 2:
        return 0.0
    p = S.params
    return abs(p["s22"]) * S.h[2] / (S.h[1] * p["t1"])


def check_condition_M(S: StandardizedSimplex, M: float) -> bool:
    if S.dim == 2:
        return True
    p = S.params
    return abs(p["s22"]) <= M * S.h[1] * p["t1"] / S.h[2]


def direction_frame(S: StandardizedSimplex) -> DirectionFrame:
    P = S.base.vertices
    p = S.params
    if S.dim == 2:
        r = np.array([_unit(P[1] - P[0]), _unit(P[2] - P[0])])
        rt = np.array([[1.0, 0.0], [p["s"], p["t"]]])
        return DirectionFrame(r=r, r_tilde=rt)
    if S.type_tag is SimplexType.TypeI:
        r2 = _unit(P[2] - P[0])
        rt2 = [p["s1"], p["t1"], 0.0]
    else:
        r2 = _unit(P[2] - P[1])
        rt2 = [-p["s1"], p["t1"], 0.0]
    r = np.array([_unit(P[1] - P[0]), r2, _unit(P[3] - P[0])])
    rt = np.array([[1.0, 0.0, 0.0], rt2, [p["s21"], p["s22"], p["t2"]]])
    return DirectionFrame(r=r, r_tilde=rt)


def angle_at_p1(S: StandardizedSimplex) -> float:
    """Angle between p_1p_2 and p_1p_3 of a standardized triangle."""
    return math.atan2(S.params["t"], S.params["s"])

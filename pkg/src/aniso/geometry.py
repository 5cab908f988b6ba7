"""Metric computations on triangles and tetrahedra."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DegenerateSimplex, WrongDimension

DEGENERACY_TOL = 1e-14


@dataclass(frozen=True)
class Simplex:
    """A d-simplex given by d+1 vertices in R^d (d in {2, 3})."""

    vertices: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] not in (2, 3) or v.shape[0] != v.shape[1] + 1:
            raise WrongDimension(f"expected (d+1, d) vertex array with d in {{2,3}}, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def nverts(self) -> int:
        return self.vertices.shape[0]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.vertices[i]

    def relabel(self, order) -> "Simplex":
        return Simplex(self.vertices[list(order)])

    def edge_matrix(self) -> np.ndarray:
        """Columns p_{i+1} - p_1, i = 1..d."""
        return (self.vertices[1:] - self.vertices[0]).T

    def diameter(self) -> float:
        V = self.vertices
        return float(np.sqrt(((V[:, None, :] - V[None, :, :]) ** 2).sum(axis=-1).max()))

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def to_physical(self, bary: np.ndarray) -> np.ndarray:
        """Map barycentric points (n, d+1) to physical points (n, d)."""
        return np.asarray(bary) @ self.vertices

    def __repr__(self) -> str:
        pts = ", ".join("(" + ", ".join(f"{c:.6g}" for c in p) + ")" for p in self.vertices)
        return f"Simplex[{pts}]"


@dataclass(frozen=True)
class EdgeData:
    lengths: tuple[float, ...]
    endpoints: tuple[tuple[int, int], ...]

    @property
    def h_T(self) -> float:
        return self.lengths[-1]

    @property
    def h_min_edge(self) -> float:
        return self.lengths[0]


@dataclass(frozen=True)
class AngleData:
    """Angles in radians.

    d=2: ``interior[i]`` is the angle at vertex i.
    d=3: ``dihedral[(i, j)]`` is the angle between facets F_i and F_j (F_i opposite p_i);
    ``face[(i, j)]`` is the interior angle at vertex j of facet F_i.
    """

    dim: int
    interior: tuple[float, ...] = ()
    dihedral: dict[tuple[int, int], float] = field(default_factory=dict)
    face: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def max_angle(self) -> float:
        """Largest interior angle (d=2) or largest face angle (d=3)."""
        if self.dim == 2:
            return max(self.interior)
        return max(self.face.values())

    @property
    def max_dihedral(self) -> float | None:
        return max(self.dihedral.values()) if self.dim == 3 else None


def signed_volume(T: Simplex) -> float:
    return float(np.linalg.det(T.edge_matrix())) / math.factorial(T.dim)


def _check(T: Simplex) -> float:
    vol = abs(signed_volume(T))
    h = T.diameter()
    if h == 0.0 or not np.isfinite(vol) or vol / h**T.dim < DEGENERACY_TOL:
        raise DegenerateSimplex(f"degenerate simplex: |T|/h^d = {vol / h**T.dim if h else 0.0:.3e}")
    return vol


def measure(T: Simplex) -> float:
    """d-volume |det[p_2-p_1, ..., p_{d+1}-p_1]| / d!."""
    return _check(T)


def is_degenerate(T: Simplex) -> bool:
    try:
        _check(T)
    except DegenerateSimplex:
        return True
    return False


def edge_data(T: Simplex) -> EdgeData:
    pairs = list(combinations(range(T.nverts), 2))
    lens = [float(np.linalg.norm(T[i] - T[j])) for i, j in pairs]
    order = sorted(range(len(pairs)), key=lambda k: (lens[k], pairs[k]))
    return EdgeData(tuple(lens[k] for k in order), tuple(pairs[k] for k in order))


def edge_length(T: Simplex, i: int, j: int) -> float:
    return float(np.linalg.norm(T[i] - T[j]))


def facet_vertices(T: Simplex, i: int) -> np.ndarray:
    """Vertices of the facet F_i opposite p_i, in increasing index order."""
    return np.delete(T.vertices, i, axis=0)


def simplex_measure(points: np.ndarray) -> float:
    """k-volume of a k-simplex embedded in R^n via the Gram determinant."""
    points = np.asarray(points, dtype=float)
    E = points[1:] - points[0]
    k = E.shape[0]
    if k == 0:
        return 1.0
    g = np.linalg.det(E @ E.T)
    return math.sqrt(max(g, 0.0)) / math.factorial(k)


def facet_measures(T: Simplex) -> np.ndarray:
    return np.array([simplex_measure(facet_vertices(T, i)) for i in range(T.nverts)])


def barycentric_gradients(T: Simplex) -> np.ndarray:
    """Row i is grad(lambda_i), shape (d+1, d)."""
    _check(T)
    Binv = np.linalg.inv(T.edge_matrix())
    G = np.empty((T.nverts, T.dim))
    G[1:] = Binv
    G[0] = -Binv.sum(axis=0)
    return G


def outward_normals(T: Simplex) -> np.ndarray:
    """Row i is the outward unit normal of facet F_i (opposite p_i)."""
    G = barycentric_gradients(T)
    return -G / np.linalg.norm(G, axis=1)[:, None]


def circumcenter(T: Simplex) -> np.ndarray:
    """Circumcenter from the linear system 2(p_i - p_1).c = |p_i|^2 - |p_1|^2."""
    _check(T)
    P = T.vertices
    A = 2.0 * (P[1:] - P[0])
    b = (P[1:] ** 2).sum(axis=1) - (P[0] ** 2).sum()
    return np.linalg.solve(A, b)


def circumradius(T: Simplex) -> float:
    vol = _check(T)
    if T.dim == 2:
        L = edge_data(T).lengths
        return L[0] * L[1] * L[2] / (4.0 * vol)
    P = T.vertices
    # three edges at p_1 and their opposite edges
    a, A = np.linalg.norm(P[0] - P[1]), np.linalg.norm(P[2] - P[3])
    b, B = np.linalg.norm(P[0] - P[2]), np.linalg.norm(P[1] - P[3])
    c, C = np.linalg.norm(P[0] - P[3]), np.linalg.norm(P[1] - P[2])
    x, y, z = a * A, b * B, c * C
    prod = (x + y + z) * (x + y - z) * (x - y + z) * (-x + y + z)
    return math.sqrt(max(prod, 0.0)) / (24.0 * vol)


def inradius(T: Simplex) -> float:
    vol = _check(T)
    return T.dim * vol / float(facet_measures(T).sum())


def _angle(u: np.ndarray, v: np.ndarray) -> float:
    """Angle between two vectors via atan2, accurate near 0 and pi."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[0] == 2:
        cross = abs(u[0] * v[1] - u[1] * v[0])
    else:
        cross = float(np.linalg.norm(np.cross(u, v)))
    return math.atan2(cross, float(np.dot(u, v)))


def _triangle_angles(P: np.ndarray) -> tuple[float, float, float]:
    """Interior angles of a triangle embedded in R^2 or R^3."""
    out = []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        out.append(_angle(P[j] - P[i], P[k] - P[i]))
    return tuple(out)


def angles(T: Simplex) -> AngleData:
    _check(T)
    if T.dim == 2:
        return AngleData(dim=2, interior=_triangle_angles(T.vertices))
    n = outward_normals(T)
    dihedral = {}
    for i, j in combinations(range(4), 2):
        dihedral[(i, j)] = math.pi - _angle(n[i], n[j])
    face = {}
    for i in range(4):
        idx = [m for m in range(4) if m != i]
        ang = _triangle_angles(T.vertices[idx])
        for m, a in zip(idx, ang):
            face[(i, m)] = a
    return AngleData(dim=3, dihedral=dihedral, face=face)

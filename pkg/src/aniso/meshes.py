"""Mesh families on the unit square, conformity checks, quality tables and mesh I/O."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import InvalidN, NonConformal, ParseError
from .geometry import Simplex
from .quality import DEFAULT_GAMMA0, QualityReport, Taxonomy, condition_report, label_triangle

FAMILIES = ("I", "II", "III", "IV", "V", "VI")
SHISHKIN_DELTA = 1.0 / 128.0
DEFAULT_PATTERN = {"I": "diagonal", "II": "diagonal", "III": "diagonal", "IV": "diagonal", "V": "staggered", "VI": "staggered"}


@dataclass
class Mesh:
    vertices: np.ndarray
    cells: np.ndarray

    def __post_init__(self) -> None:
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.cells = np.asarray(self.cells, dtype=int).reshape(-1, self.vertices.shape[1] + 1)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def ncells(self) -> int:
        return self.cells.shape[0]

    def simplex(self, c: int) -> Simplex:
        return Simplex(self.vertices[self.cells[c]])

    def simplices(self) -> Iterable[Simplex]:
        for c in range(self.ncells):
            yield self.simplex(c)

    def cell_measures(self) -> np.ndarray:
        P = self.vertices[self.cells]
        E = P[:, 1:, :] - P[:, :1, :]
        return np.abs(np.linalg.det(E)) / math.factorial(self.dim)


# Generation -----------------------------------------------------------------


def shishkin_tau(N: int, delta: float = SHISHKIN_DELTA) -> float:
    return 2.0 * delta * abs(math.log(N))


def grid_coordinates(family: str, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints (x_1^i), (x_2^i), i = 0..N, of the tensor grid behind each family."""
    i = np.arange(N + 1, dtype=float)
    uniform = i / N
    if family == "I":
        return uniform, uniform.copy()
    if family in ("II", "V"):
        if N % 2:
            raise InvalidN(f"Shishkin families need even N, got {N}")
        tau = shishkin_tau(N)
        y = np.where(i <= N / 2, tau * 2.0 / N * i, tau + (1.0 - tau) * 2.0 / N * (i - N / 2))
        return uniform, y
    if family == "III":
        c = 0.5 * (1.0 - np.cos(i * math.pi / N))
        c[0], c[-1] = 0.0, 1.0
        return c, c.copy()
    if family in ("IV", "VI"):
        return uniform, uniform**2
    raise InvalidN(f"unknown family {family!r}")


def _diagonal_mesh(x: np.ndarray, y: np.ndarray) -> Mesh:
    nx, ny = len(x), len(y)
    X, Y = np.meshgrid(x, y, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    cells = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            a = j * nx + i
            b, c, d = a + 1, a + nx, a + nx + 1
            # lower-left to upper-right diagonal a-d
            cells.append((a, b, d))
            cells.append((a, d, c))
    return Mesh(verts, np.array(cells))


def _staggered_mesh(N: int, y: np.ndarray) -> Mesh:
    """Rows at heights y; odd rows shift interior nodes by half a cell (brick pattern).

    Each strip between consecutive rows is triangulated by merging the two node rows
    in order of segment midpoints, which produces isosceles blades with half-right
    triangles at the sides.
    """
    full = np.arange(N + 1) / N
    shifted = np.concatenate([[0.0], (np.arange(N) + 0.5) / N, [1.0]])
    rows, verts = [], []
    for j, yj in enumerate(y):
        xs = full if j % 2 == 0 else shifted
        start = len(verts)
        verts.extend((float(xv), float(yj)) for xv in xs)
        rows.append((xs, list(range(start, start + len(xs)))))
    cells = []
    for j in range(len(y) - 1):
        (xb, ib), (xt, it) = rows[j], rows[j + 1]
        a = b = 0
        while a < len(xb) - 1 or b < len(xt) - 1:
            adv_bottom = b == len(xt) - 1 or (a < len(xb) - 1 and xb[a] + xb[a + 1] <= xt[b] + xt[b + 1])
            if adv_bottom:
                cells.append((ib[a], ib[a + 1], it[b]))
                a += 1
            else:
                cells.append((ib[a], it[b + 1], it[b]))
                b += 1
    return Mesh(np.array(verts), np.array(cells))


def generate(family: str, N: int, pattern: str | None = None) -> Mesh:
    """Mesh of the unit square for families I..VI.

    ``pattern`` selects the triangulation: "diagonal" splits each grid cell along its
    lower-left to upper-right diagonal; "staggered" uses brick rows (blade elements).
    Defaults: diagonal for I-IV, staggered for V-VI.
    """
    if family not in FAMILIES:
        raise InvalidN(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise InvalidN(f"N must be an integer >= 2, got {N!r}")
    pattern = pattern or DEFAULT_PATTERN[family]
    x, y = grid_coordinates(family, int(N))
    if pattern == "diagonal":
        return _diagonal_mesh(x, y)
    if pattern == "staggered":
        return _staggered_mesh(int(N), y)
    raise InvalidN(f"unknown pattern {pattern!r}")


# Conformity -----------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    facet: tuple[int, ...]
    cells: tuple[int, ...]


@dataclass
class ConformityReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def conformal(self) -> bool:
        return not self.violations

    def cells(self) -> set[int]:
        return {c for v in self.violations for c in v.cells}


def facet_map(M: Mesh) -> dict[tuple[int, ...], list[int]]:
    out: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for c, cell in enumerate(M.cells):
        for f in combinations(sorted(int(v) for v in cell), M.dim):
            out[f].append(c)
    return out


def _point_on_facet(P: np.ndarray, F: np.ndarray, tol: float) -> np.ndarray:
    """Mask of points in P lying in the relative interior of the facet simplex F."""
    E = (F[1:] - F[0]).T
    coef, *_ = np.linalg.lstsq(E, (P - F[0]).T, rcond=None)
    resid = np.linalg.norm(E @ coef - (P - F[0]).T, axis=0)
    lam = np.vstack([1.0 - coef.sum(axis=0), coef])
    scale = max(np.linalg.norm(E, axis=0).max(), 1e-300)
    return (resid <= tol * scale) & np.all(lam > tol, axis=0)


def _inside_cells(M: Mesh, pts: np.ndarray, tol: float = 1e-12) -> list[np.ndarray]:
    P = M.vertices[M.cells]
    lo, hi = P.min(axis=1), P.max(axis=1)
    out = []
    for x in pts:
        cand = np.nonzero(np.all((lo <= x) & (x <= hi), axis=1))[0]
        if cand.size == 0:
            out.append(cand)
            continue
        Pc = P[cand]
        E = np.transpose(Pc[:, 1:, :] - Pc[:, :1, :], (0, 2, 1))
        xi = np.linalg.solve(E, (x - Pc[:, 0, :])[..., None])[..., 0]
        lam = np.column_stack([1.0 - xi.sum(axis=1), xi])
        out.append(cand[np.all(lam > tol, axis=1)])
    return out


def conformity_check(M: Mesh, domain_box: tuple[np.ndarray, np.ndarray] | None = None, tol: float = 1e-12) -> ConformityReport:
    """List facets that break conformity.

    * facets shared by more than two cells;
    * hanging nodes (a vertex inside a facet that belongs to one cell only);
    * single-cell facets whose outer side is covered by another cell (overlap);
    * with ``domain_box``: single-cell facets not lying on the box boundary.
    """
    report = ConformityReport()
    fm = facet_map(M)
    boundary = []
    for f, cs in fm.items():
        if len(cs) > 2:
            report.violations.append(Violation("shared by more than two cells", f, tuple(cs)))
        elif len(cs) == 1:
            boundary.append(f)
    used = np.unique(M.cells)
    for f in boundary:
        F = M.vertices[list(f)]
        pad = 1e-9 * np.ptp(F, axis=0).max()
        near = used[np.all((M.vertices[used] >= F.min(axis=0) - pad) & (M.vertices[used] <= F.max(axis=0) + pad), axis=1)]
        cand = np.setdiff1d(near, f)
        if cand.size == 0:
            continue
        hit = cand[_point_on_facet(M.vertices[cand], F, 1e-9)]
        if hit.size:
            report.violations.append(Violation("hanging node", f, tuple(fm[f])))
    if boundary:
        probes, owners = [], []
        for f in boundary:
            c = fm[f][0]
            F = M.vertices[list(f)]
            opp = M.vertices[[v for v in M.cells[c] if v not in f][0]]
            centre = F.mean(axis=0)
            out = centre - opp
            E = (F[1:] - F[0]).T
            coef, *_ = np.linalg.lstsq(E, out, rcond=None)
            normal = out - E @ coef
            h = np.linalg.norm(F[1:] - F[0], axis=1).max()
            probes.append(centre + 1e-6 * h * normal / np.linalg.norm(normal))
            owners.append(c)
        inside = _inside_cells(M, np.array(probes), tol)
        for f, c, hits in zip(boundary, owners, inside):
            others = [int(h) for h in hits if h != c]
            if others:
                report.violations.append(Violation("overlap", f, (c, *others)))
    if domain_box is not None:
        lo, hi = (np.asarray(b, dtype=float) for b in domain_box)
        for f in boundary:
            F = M.vertices[list(f)]
            on_face = np.any(np.all(np.isclose(F, lo, atol=tol), axis=0) | np.all(np.isclose(F, hi, atol=tol), axis=0))
            if not on_face:
                v = Violation("interior facet with one cell", f, tuple(fm[f]))
                if v not in report.violations:
                    report.violations.append(v)
    return report


# Quality --------------------------------------------------------------------


@dataclass
class MeshQuality:
    min_angle_metric: float
    max_angle_metric: float
    min_angle_cell: int
    max_angle_cell: int
    mesh: Mesh = field(repr=False)
    _reports: list[QualityReport] | None = field(default=None, repr=False)

    @property
    def reports(self) -> list[QualityReport]:
        """Per-element reports (computed on first access)."""
        if self._reports is None:
            self._reports = [condition_report(T) for T in self.mesh.simplices()]
        return self._reports


def triangle_metrics(M: Mesh) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell |L_3|^2/|T| and |L_1||L_2|/|T| for a triangle mesh."""
    P = M.vertices[M.cells]
    L = np.sort(np.stack([np.linalg.norm(P[:, i] - P[:, j], axis=1) for i, j in ((0, 1), (0, 2), (1, 2))], axis=1), axis=1)
    area = M.cell_measures()
    return L[:, 2] ** 2 / area, L[:, 0] * L[:, 1] / area


def quality(M: Mesh, check: bool = True) -> MeshQuality:
    if M.dim != 2:
        raise NonConformal("MinAngle/MaxAngle metrics are defined for triangle meshes")
    if check:
        rep = conformity_check(M)
        if not rep.conformal:
            raise NonConformal(f"mesh is not conformal: {len(rep.violations)} violating facets")
    mn, mx = triangle_metrics(M)
    return MeshQuality(
        min_angle_metric=float(mn.max()),
        max_angle_metric=float(mx.max()),
        min_angle_cell=int(mn.argmax()),
        max_angle_cell=int(mx.argmax()),
        mesh=M,
    )


QUALITY_COLUMNS = ("cell_id", "h_T", "H_T", "H_T/h_T", "max_angle", "classification")


@dataclass(frozen=True)
class TriangleColumns:
    """Per-cell quality columns of a triangle mesh, computed with array operations."""

    h_T: np.ndarray
    H_T: np.ndarray
    ratio: np.ndarray
    max_angle: np.ndarray
    labels: list[Taxonomy]


def triangle_columns(M: Mesh, gamma0: float = DEFAULT_GAMMA0, right_tol: float = 1e-9) -> TriangleColumns:
    """h_T, H_T = |L_1||L_2||L_3|/|T|, H_T/h_T, the largest angle and the taxonomy label per cell."""
    P = M.vertices[M.cells]
    L = np.sort(np.stack([np.linalg.norm(P[:, i] - P[:, j], axis=1) for i, j in ((0, 1), (0, 2), (1, 2))], axis=1), axis=1)
    area = M.cell_measures()
    ratio = L[:, 0] * L[:, 1] / area
    ang = np.empty((M.ncells, 3))
    right = np.zeros(M.ncells, dtype=bool)
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        u, v = P[:, j] - P[:, i], P[:, k] - P[:, i]
        dot = (u * v).sum(axis=1)
        ang[:, i] = np.arctan2(np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]), dot)
        right |= np.abs(dot) <= right_tol * np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1)
    labels = [label_triangle(r, *l, bool(rt), gamma0) for r, l, rt in zip(ratio, L, right)]
    return TriangleColumns(L[:, 2], ratio * L[:, 2], ratio, ang.max(axis=1), labels)


def write_quality_csv(Q: MeshQuality, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(QUALITY_COLUMNS)
    if Q.mesh.dim == 2:
        t = triangle_columns(Q.mesh)
        rows = zip(t.h_T, t.H_T, t.ratio, t.max_angle, (c.value for c in t.labels))
    else:
        rows = ((r.h_T, r.H_T, r.ratio_new, r.max_angle, r.classification.value) for r in Q.reports)
    for c, (h, H, ratio, angle, label) in enumerate(rows):
        w.writerow([c, f"{h:.10e}", f"{H:.10e}", f"{ratio:.10e}", f"{angle:.10e}", label])


# I/O ------------------------------------------------------------------------


def format_mesh(M: Mesh) -> str:
    lines = [f"{M.dim} {len(M.vertices)} {M.ncells}"]
    lines += [" ".join(repr(float(c)) for c in p) for p in M.vertices]
    lines += [" ".join(str(int(v)) for v in cell) for cell in M.cells]
    return "\n".join(lines) + "\n"


def write_mesh(M: Mesh, path: str | Path) -> None:
    Path(path).write_text(format_mesh(M))


def parse_mesh(text: str, path: str | None = None) -> Mesh:
    lines = text.splitlines()

    def fields(k: int, n: int, conv, what: str):
        if k >= len(lines):
            raise ParseError(f"unexpected end of file, expected {what}", k + 1, path)
        parts = lines[k].split()
        if len(parts) != n:
            raise ParseError(f"expected {n} fields for {what}, found {len(parts)}", k + 1, path)
        try:
            return [conv(p) for p in parts]
        except ValueError as exc:
            raise ParseError(f"bad {what}: {exc}", k + 1, path) from exc

    dim, nv, nc = fields(0, 3, int, "header 'dim nv nc'")
    if dim not in (2, 3) or nv < 0 or nc < 0:
        raise ParseError(f"invalid header values dim={dim} nv={nv} nc={nc}", 1, path)
    verts = np.array([fields(1 + i, dim, float, "vertex coordinates") for i in range(nv)]).reshape(nv, dim)
    cells = []
    for c in range(nc):
        k = 1 + nv + c
        idx = fields(k, dim + 1, int, "cell indices")
        bad = [v for v in idx if not 0 <= v < nv]
        if bad:
            raise ParseError(f"cell index {bad[0]} out of range 0..{nv - 1}", k + 1, path)
        cells.append(idx)
    extra = [k for k in range(1 + nv + nc, len(lines)) if lines[k].strip()]
    if extra:
        raise ParseError("trailing content after the last cell", extra[0] + 1, path)
    return Mesh(verts, np.array(cells, dtype=int).reshape(nc, dim + 1))


def read_mesh(path: str | Path) -> Mesh:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read mesh file: {exc.strerror}", None, str(p)) from exc
    return parse_mesh(text, str(p))


def mesh_to_string(M: Mesh) -> str:
    buf = io.StringIO()
    buf.write(format_mesh(M))
    return buf.getvalue()

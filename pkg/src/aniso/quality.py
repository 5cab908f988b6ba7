"""The H_T quality parameter, classical shape ratios and the good/bad taxonomy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from . import geometry as geo
from .geometry import Simplex
from .standardization import standardize

DEFAULT_GAMMA0 = 10.0
DIVERGENCE_FACTOR = 4.0


class Taxonomy(str, Enum):
    Isotropic = "Isotropic"
    RightAngled = "RightAngled"
    DaggerGood = "DaggerGood"
    DaggerBad = "DaggerBad"
    Blade = "Blade"
    Spire = "Spire"
    Spear = "Spear"
    Spindle = "Spindle"
    Spike = "Spike"
    Splinter = "Splinter"
    Sliver = "Sliver"
    Unclassified = "Unclassified"


GOOD_LABELS = frozenset({Taxonomy.Isotropic, Taxonomy.RightAngled, Taxonomy.DaggerGood})


@dataclass(frozen=True)
class QualityReport:
    h_T: float
    H_T: float
    H_star: float
    ratio_new: float
    ratio_classic: float
    hmax_over_hmin: float
    R_over_h: float
    rho_over_h: float
    max_angle: float
    max_dihedral: float | None
    classification: Taxonomy


def H_parameter(T: Simplex) -> float:
    """H_T = (prod h_i / |T|) * h_T with h_i from the standardized labeling."""
    vol = geo.measure(T)
    S = standardize(T)
    return float(np.prod(S.h)) / vol * T.diameter()


def H_star(T: Simplex) -> float:
    """H*_T = h_T^2 min|L_i| / |T| (d=2), h_T^2 |L_1||L_2| / |T| (d=3)."""
    vol = geo.measure(T)
    L = geo.edge_data(T).lengths
    hT = L[-1]
    if T.dim == 2:
        return hT * hT * L[0] / vol
    return hT * hT * L[0] * L[1] / vol


def _is_right(T: Simplex, tol: float = 1e-9) -> bool:
    P = T.vertices
    n = T.nverts
    for i in range(n):
        others = [P[j] - P[i] for j in range(n) if j != i]
        if all(abs(np.dot(u, v)) <= tol * np.linalg.norm(u) * np.linalg.norm(v) for u, v in combinations(others, 2)):
            return True
    return False


def _label_bad_3d(T: Simplex) -> Taxonomy:
    ed = geo.edge_data(T)
    hT = ed.h_T
    short = [p for p, L in zip(ed.endpoints, ed.lengths) if L < 0.25 * hT]
    if not short:
        return Taxonomy.Sliver
    if len(short) == 1:
        return Taxonomy.Spear
    verts = [v for p in short for v in p]
    if len(short) == 2:
        return Taxonomy.Spike if len(set(verts)) == 3 else Taxonomy.Spindle
    if len(short) == 3:
        if len(set(verts)) == 3:
            return Taxonomy.Spire
        return Taxonomy.Splinter
    return Taxonomy.Unclassified


def classify(T: Simplex, gamma0: float = DEFAULT_GAMMA0) -> Taxonomy:
    """Good iff H_T/h_T <= gamma0; sub-labels are shape heuristics only."""
    ratio = H_parameter(T) / T.diameter()
    ed = geo.edge_data(T)
    if T.dim == 2:
        L = ed.lengths
        return label_triangle(ratio, L[0], L[1], L[2], _is_right(T), gamma0)
    if ratio <= gamma0:
        return _label_good(_is_right(T), ed.h_T / ed.h_min_edge)
    return _label_bad_3d(T)


def _label_good(right: bool, aspect: float) -> Taxonomy:
    if right:
        return Taxonomy.RightAngled
    if aspect <= 2.0:
        return Taxonomy.Isotropic
    return Taxonomy.DaggerGood


def label_triangle(ratio: float, L0: float, L1: float, L2: float, right: bool, gamma0: float = DEFAULT_GAMMA0) -> Taxonomy:
    """Triangle label from H_T/h_T and the sorted edge lengths L0 <= L1 <= L2."""
    if ratio <= gamma0:
        return _label_good(right, L2 / L0)
    return Taxonomy.Blade if L0 >= 0.5 * L1 else Taxonomy.DaggerBad


def condition_report(T: Simplex, gamma0: float = DEFAULT_GAMMA0) -> QualityReport:
    vol = geo.measure(T)
    ed = geo.edge_data(T)
    hT = ed.h_T
    H = H_parameter(T)
    ang = geo.angles(T)
    return QualityReport(
        h_T=hT,
        H_T=H,
        H_star=H_star(T),
        ratio_new=H / hT,
        ratio_classic=hT**T.dim / vol,
        hmax_over_hmin=hT / ed.h_min_edge,
        R_over_h=geo.circumradius(T) / hT,
        rho_over_h=geo.inradius(T) / hT,
        max_angle=ang.max_angle,
        max_dihedral=ang.max_dihedral,
        classification=classify(T, gamma0),
    )


@dataclass(frozen=True)
class ProbeRow:
    k: int
    s: float
    angle: float
    ratio: float


@dataclass
class ProbeReport:
    rows: list[ProbeRow] = field(default_factory=list)
    angle_diverging: bool = False
    ratio_diverging: bool = False

    @property
    def verdict(self) -> str:
        if self.angle_diverging and self.ratio_diverging:
            return "co-diverging"
        if not self.angle_diverging and not self.ratio_diverging:
            return "co-bounded"
        return "mismatch"

    @property
    def equivalent(self) -> bool:
        return self.verdict != "mismatch"


def _probe_angle(T: Simplex) -> float:
    ang = geo.angles(T)
    return ang.max_angle if T.dim == 2 else ang.max_dihedral


def equivalence_probe(family: Callable[[float], Simplex], levels: Sequence[int] = range(5, 11)) -> ProbeReport:
    """Sweep s = 2^-k and compare the growth of the maximum angle and of H_T/h_T.

    An angle diverges when pi - angle shrinks by more than DIVERGENCE_FACTOR over the
    sweep; the ratio diverges when it grows by more than DIVERGENCE_FACTOR.
    """
    rows = []
    for k in levels:
        s = 2.0 ** (-k)
        T = family(s)
        rows.append(ProbeRow(k=k, s=s, angle=_probe_angle(T), ratio=H_parameter(T) / T.diameter()))
    first, last = rows[0], rows[-1]
    gap_first = math.pi - first.angle
    gap_last = math.pi - last.angle
    return ProbeReport(
        rows=rows,
        angle_diverging=gap_last * DIVERGENCE_FACTOR < gap_first,
        ratio_diverging=last.ratio > DIVERGENCE_FACTOR * first.ratio,
    )

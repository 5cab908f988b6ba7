"""Single-element convergence studies and the inverse-inequality sweep."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

import numpy as np

from . import families as fam
from . import geometry as geo
from .basis import ElementKind
from .errors import InvalidN, UnsupportedKind
from .fields import Difference, polynomial_field
from .geometry import Simplex
from .interpolation import interpolate
from .norms import SeminormSpec, lp_norm, seminorm
from .polynomial import LocalFrame, Polynomial, monomial_exponents
from .quadrature import QuadratureRule
from .standardization import factorize, mathscr_h, min_condition_M, standardize

TINY_EDGE = 1e-12


@dataclass
class StudyCase:
    """Interpolation error |phi - I phi|_{W^{m,p}(T_s)} on a family s -> T_s.

    With ``normalize = l`` the error is divided by |phi|_{W^{l,p}(T_s)}.
    ``predicted_rate`` is an a priori rate to compare against the observed one.
    """

    name: str
    generator: Callable[[float], Simplex]
    phi: object
    kind: ElementKind = ElementKind.Lagrange
    k: int = 1
    m: int = 1
    p: float = 2.0
    normalize: int | None = None
    Ns: tuple[int, ...] = (32, 64, 128, 256)
    params: dict[str, float] = field(default_factory=dict)
    predicted_rate: float | None = None


@dataclass(frozen=True)
class StudyRow:
    N: int
    s: float
    err: float
    err_raw: float
    norm_factor: float
    r: float | None
    flags: tuple[str, ...] = ()


@dataclass
class ConvergenceTable:
    case: str
    rows: list[StudyRow]
    params: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.array([r.err for r in self.rows])

    @property
    def rates(self) -> np.ndarray:
        return np.array([r.r for r in self.rows[1:]], dtype=float)

    def write_csv(self, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["N", "s", "Err", "r", "Err_full"])
        for row in self.rows:
            r = "" if row.r is None else f"{row.r:.4e}"
            w.writerow([row.N, f"{row.s:.4e}", f"{row.err:.4e}", r, repr(row.err)])


def check_levels(Ns: Sequence[int]) -> list[int]:
    """Levels must be powers of two, each twice the previous one."""
    Ns = [int(n) for n in Ns]
    if not Ns:
        raise InvalidN("no levels given")
    for n in Ns:
        if n < 1 or n & (n - 1):
            raise InvalidN(f"level {n} is not a power of two")
    for a, b in zip(Ns, Ns[1:]):
        if b != 2 * a:
            raise InvalidN(f"levels must double: {a} is followed by {b}")
    return Ns


def _error(case: StudyCase, T: Simplex, q: QuadratureRule | None) -> tuple[float, float]:
    I = interpolate(case.kind, T, case.phi, case.k)
    raw = seminorm(T, Difference(case.phi, I.poly), SeminormSpec(m=case.m, p=case.p), q)
    if case.normalize is None:
        return raw, 1.0
    return raw, seminorm(T, case.phi, SeminormSpec(m=case.normalize, p=case.p), q)


def run_study(case: StudyCase, Ns: Sequence[int] | None = None, q: QuadratureRule | None = None) -> ConvergenceTable:
    """Err_s for s = 1/N and r = log2(Err_s / Err_{s/2})."""
    Ns = check_levels(case.Ns if Ns is None else Ns)
    rows: list[StudyRow] = []
    for N in Ns:
        s = 1.0 / N
        T = case.generator(s)
        raw, factor = _error(case, T, q)
        err = raw / factor
        r = None if not rows else math.log2(rows[-1].err / err)
        flags = ("tiny-edge",) if geo.edge_data(T).h_min_edge < TINY_EDGE else ()
        rows.append(StudyRow(N, s, err, raw, factor, r, flags))
    table = ConvergenceTable(case.name, rows, dict(case.params))
    if any(r.flags for r in rows):
        table.notes.append(f"shortest edge below {TINY_EDGE:g} at some level; values rely on the local scaled frame")
    if case.predicted_rate is not None and len(rows) > 1:
        obs = rows[-1].r
        if abs(obs - case.predicted_rate) > 0.05:
            table.notes.append(f"observed rate {obs:.2f} differs from the predicted rate {case.predicted_rate:.2f}")
    return table


# Builtin cases --------------------------------------------------------------

PHI_2D = {(2, 0): 2.0, (1, 1): -1.0, (0, 2): 3.0}
PHI_3D = {(2, 0, 0): 1.0, (0, 2, 0): 0.25, (0, 0, 2): 1.0}
CASE_NAMES = ("p1bubble", "lag3d-I", "lag3d-II", "lagrange-2d-right", "lagrange-2d-dagger", "lagrange-2d-blade")


def make_case(name: str, eps: float | None = None, delta: float | None = None) -> StudyCase:
    """Builtin case ``name`` with optional shape exponents."""
    phi2 = polynomial_field(2, PHI_2D)
    phi3 = polynomial_field(3, PHI_3D)
    if name == "p1bubble":
        e = 1.5 if eps is None else eps
        return StudyCase(
            f"p1bubble(eps={e:g})", lambda s: fam.right_angled(s, e), phi2, ElementKind.P1Bubble,
            normalize=2, Ns=(128, 256, 512, 1024), params={"eps": e},
        )
    if name == "lag3d-I":
        e = 3.0 if eps is None else eps
        dl = 2.0 if delta is None else delta
        return StudyCase(
            f"lag3d-I(eps={e:g},delta={dl:g})", lambda s: fam.tet_case_I(s, e, dl), phi3,
            Ns=(64, 128, 256), params={"eps": e, "delta": dl}, predicted_rate=(3.0 + e + dl) / 2.0,
        )
    if name == "lag3d-II":
        e = 3.0 if eps is None else eps
        return StudyCase(f"lag3d-II(eps={e:g})", lambda s: fam.tet_case_II(s, e), phi3, Ns=(64, 128, 256), params={"eps": e})
    if name == "lagrange-2d-right":
        e = 2.0 if eps is None else eps
        return StudyCase(f"lagrange-2d-right(eps={e:g})", lambda s: fam.right_angled(s, e), phi2, normalize=2, params={"eps": e})
    if name == "lagrange-2d-dagger":
        e = 1.5 if eps is None else eps
        dl = 2.0 if delta is None else delta
        return StudyCase(
            f"lagrange-2d-dagger(eps={e:g},delta={dl:g})", lambda s: fam.dagger(s, e, dl), phi2, normalize=2,
            params={"eps": e, "delta": dl},
        )
    if name == "lagrange-2d-blade":
        e = 2.0 if eps is None else eps
        return StudyCase(f"lagrange-2d-blade(eps={e:g})", lambda s: fam.blade(s, e), phi2, normalize=2, params={"eps": e})
    raise UnsupportedKind(f"unknown case {name!r}; expected one of {', '.join(CASE_NAMES)}")


def builtin_cases() -> list[StudyCase]:
    return [
        make_case("p1bubble", 1.5),
        make_case("p1bubble", 2.0),
        make_case("lag3d-I", 3.0, 2.0),
        make_case("lag3d-II", 3.0),
        make_case("lag3d-II", 6.0),
        make_case("lagrange-2d-right"),
        make_case("lagrange-2d-dagger"),
        make_case("lagrange-2d-blade"),
    ]


# Inverse inequality ---------------------------------------------------------


def reflect_rotate(theta: float) -> np.ndarray:
    """A_r A_theta: reflection about the y-axis after a rotation by theta."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[-1.0, 0.0], [0.0, 1.0]]) @ np.array([[c, -s], [s, c]])


def transformed(family: Callable[[float], Simplex], Q: np.ndarray) -> Callable[[float], Simplex]:
    """s -> Q T_s (vertices mapped by the matrix Q)."""
    return lambda s: Simplex(family(s).vertices @ np.asarray(Q).T)


@dataclass(frozen=True)
class InverseRow:
    N: int
    s: float
    weights: np.ndarray
    ratios: np.ndarray

    @property
    def worst(self) -> float:
        return float(self.ratios.max())


@dataclass
class InverseTable:
    rows: list[InverseRow]
    p: float
    q: float

    def growth(self) -> float:
        w = [r.worst for r in self.rows]
        return max(w) / min(w)

    def bounded(self, factor: float = 4.0) -> bool:
        """True when the worst ratio varies by less than ``factor`` across levels."""
        return bool(np.all(np.isfinite([r.worst for r in self.rows]))) and self.growth() < factor


def bound_weights(T: Simplex, M: float | None = None) -> np.ndarray:
    """Per-direction factors |(A_T^-1)_{1i}|/H1 + 2|(A_T^-1)_{2i}|/H2 (+ 2(M+1)|(A_T^-1)_{3i}|/H3)."""
    S = standardize(T)
    F = factorize(S)
    H = np.asarray(mathscr_h(S).values)
    Ainv = np.linalg.inv(F.A_T)
    coef = np.array([1.0, 2.0])
    if T.dim == 3:
        Mv = min_condition_M(S) if M is None else M
        coef = np.array([1.0, 2.0, 2.0 * (Mv + 1.0)])
    return (coef / H) @ np.abs(Ainv)


def _reference_polys(T: Simplex, k: int) -> list[Polynomial]:
    """Nonconstant monomials in barycentric coordinates lambda_1..lambda_d of degree <= k."""
    frame = LocalFrame.of(T)
    lam = [Polynomial.barycentric(frame, i) for i in range(T.nverts)]
    out = []
    for e in monomial_exponents(T.dim, k)[1:]:
        poly = Polynomial.constant(frame, 1.0)
        for j, power in enumerate(e):
            for _ in range(int(power)):
                poly = poly * lam[j + 1]
        out.append(poly)
    return out


def inverse_inequality_check(
    family: Callable[[float], Simplex],
    Ns: Sequence[int],
    k: int = 1,
    p: float = 2.0,
    q: float = 2.0,
    M: float | None = None,
) -> InverseTable:
    """||d phi_h/dx_i||_{L^q} / (|T|^{1/q-1/p} w_i ||phi_h||_{L^p}), maximized over a P^k basis.

    The test functions are fixed reference polynomials carried to each T_s, so a bounded
    ratio across levels confirms the weights w_i capture the element's anisotropy.
    """
    rows = []
    for N in Ns:
        s = 1.0 / N
        T = family(s)
        w = bound_weights(T, M)
        scale = geo.measure(T) ** (1.0 / q - 1.0 / p)
        ratios = np.zeros(T.dim)
        for poly in _reference_polys(T, k):
            base = lp_norm(T, poly, p)
            for i in range(T.dim):
                e = np.eye(T.dim)[i]
                grad = _Directional(poly, e)
                ratios[i] = max(ratios[i], lp_norm(T, grad, q) / (scale * w[i] * base))
        rows.append(InverseRow(N, s, w, ratios))
    return InverseTable(rows, p, q)


class _Directional:
    def __init__(self, poly: Polynomial, e: np.ndarray):
        self.poly, self.e = poly, e

    def value(self, X: np.ndarray) -> np.ndarray:
        return self.poly.derivative(X, 1) @ self.e

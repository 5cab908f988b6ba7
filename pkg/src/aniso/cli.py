"""Command-line front end: ``aniso <command> [options]``.

Exit codes: 0 on success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager
from typing import Callable, Iterator, Sequence, TextIO

import numpy as np

from . import families as fam
from . import meshes
from .checks import DEFAULT_COUNT, DEFAULT_SEED, SUITES, run_suite
from .errors import AnisoError, InvalidN
from .geometry import Simplex
from .harness import CASE_NAMES, check_levels, make_case, run_study
from .quality import condition_report, equivalence_probe

# name -> (builder(s, eps, delta), default eps, default delta); sliver reads (eps1, eps2) from (eps, delta)
FAMILY_BUILDERS: dict[str, tuple[Callable[[float, float, float], Simplex], float, float]] = {
    "right": (lambda s, e, d: fam.right_angled(s, e), 2.0, 0.0),
    "dagger": (lambda s, e, d: fam.dagger(s, e, d), 1.5, 2.0),
    "blade": (lambda s, e, d: fam.blade(s, e), 2.0, 0.0),
    "blade-delta": (lambda s, e, d: fam.blade_delta(s, d), 0.0, 0.1),
    "sliver": (lambda s, e, d: fam.sliver(s, e, d), 1.5, 1.0),
    "tet-I": (lambda s, e, d: fam.tet_case_I(s, e, d), 3.0, 2.0),
    "tet-II": (lambda s, e, d: fam.tet_case_II(s, e), 3.0, 0.0),
    "good-tet": (lambda s, e, d: fam.good_tet(s, e, d), 1.5, 2.0),
}


def metric_format(v: float) -> str:
    """Fixed-point with five decimals on [1, 10), otherwise scientific with five."""
    return f"{v:.5f}" if 1.0 <= v < 10.0 else f"{v:.5e}"


def family_fn(name: str, eps: float | None, delta: float | None) -> Callable[[float], Simplex]:
    build, e0, d0 = FAMILY_BUILDERS[name]
    e = e0 if eps is None else eps
    d = d0 if delta is None else delta
    return lambda s: build(s, e, d)


@contextmanager
def _output(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise AnisoError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield fh


def _parse_levels(text: str) -> list[int]:
    try:
        levels = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be comma-separated integers, got {text!r}")
    try:
        return check_levels(levels)
    except InvalidN as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _parse_vertices(text: str) -> Simplex:
    """'x,y;x,y;x,y' (or three coordinates per point for a tetrahedron)."""
    try:
        pts = [[float(c) for c in p.split(",")] for p in text.split(";") if p.strip()]
        V = np.array(pts, dtype=float)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse vertices {text!r}")
    if V.ndim != 2 or V.shape[1] not in (2, 3) or V.shape[0] != V.shape[1] + 1:
        raise argparse.ArgumentTypeError("expected d+1 points with d in {2, 3}, e.g. '0,0;1,0;0,1'")
    return Simplex(V)


# Commands -------------------------------------------------------------------


def cmd_quality(args: argparse.Namespace) -> int:
    if args.mesh is not None:
        M = meshes.read_mesh(args.mesh)
    else:
        M = meshes.generate(args.family, args.n, args.pattern)
    Q = meshes.quality(M)
    with _output(args.out) as out:
        meshes.write_quality_csv(Q, out)
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["MinAngle", metric_format(Q.min_angle_metric)])
        w.writerow(["MaxAngle", metric_format(Q.max_angle_metric)])
        w.writerow(["MinAngleCell", Q.min_angle_cell])
        w.writerow(["MaxAngleCell", Q.max_angle_cell])
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    if args.vertices is not None:
        T = args.vertices
    else:
        T = family_fn(args.family, args.eps, args.delta)(args.s)
    r = condition_report(T)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["h_T", "H_T", "H*_T", "H_T/h_T", "h_T^d/|T|", "R/h_T", "max_angle", "max_dihedral", "classification"])
    dihedral = "" if r.max_dihedral is None else f"{r.max_dihedral:.10e}"
    w.writerow([
        f"{r.h_T:.10e}", f"{r.H_T:.10e}", f"{r.H_star:.10e}", f"{r.ratio_new:.10e}", f"{r.ratio_classic:.10e}",
        f"{r.R_over_h:.10e}", f"{r.max_angle:.10e}", dihedral, r.classification.value,
    ])
    return 0


def cmd_mesh_table(args: argparse.Namespace) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["family", "N", "MinAngle", "MaxAngle", "MinAngleCell", "MaxAngleCell"])
    for name in args.families:
        for N in args.ns:
            Q = meshes.quality(meshes.generate(name, N, args.pattern))
            w.writerow([
                name, N, metric_format(Q.min_angle_metric), metric_format(Q.max_angle_metric),
                Q.min_angle_cell, Q.max_angle_cell,
            ])
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    case = make_case(args.case, args.eps, args.delta)
    table = run_study(case, args.levels)
    with _output(args.out) as out:
        table.write_csv(out)
    for note in table.notes:
        print(f"note: {note}", file=sys.stderr)
    return 0


def cmd_probe(args: argparse.Namespace) -> int:
    rep = equivalence_probe(family_fn(args.family, args.eps, args.delta), range(args.kmin, args.kmax + 1))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["k", "s", "max_angle", "H_T/h_T"])
    for row in rep.rows:
        w.writerow([row.k, f"{row.s:.4e}", f"{row.angle:.10e}", f"{row.ratio:.10e}"])
    w.writerow(["verdict", rep.verdict])
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    print(f"# seed {args.seed} count {args.count} suite {args.suite}")
    results = run_suite(args.suite, args.seed, args.count)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"# {len(results) - failed}/{len(results)} passed")
    return 1 if failed else 0


# Parser ---------------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        return [_positive_int(t) for t in text.split(",") if t.strip()]
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"expected comma-separated positive integers, got {text!r}")


def _family_list(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in meshes.FAMILIES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown mesh family {bad[0]!r}; choose from {', '.join(meshes.FAMILIES)}")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aniso", description="Anisotropic simplex quality and interpolation tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quality", help="per-element quality CSV with MinAngle/MaxAngle footer")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--mesh", help="mesh file (header 'dim nv nc', vertex rows, cell rows)")
    src.add_argument("--family", choices=meshes.FAMILIES, help="builtin mesh family")
    p.add_argument("--n", type=_positive_int, help="subdivisions per side (with --family)")
    p.add_argument("--pattern", choices=("diagonal", "staggered"), help="triangulation pattern override")
    p.add_argument("--out", help="write the CSV here instead of stdout")
    p.set_defaults(func=cmd_quality)

    p = sub.add_parser("classify", help="quality report and taxonomy label of one simplex")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--vertices", type=_parse_vertices, help="'x,y;x,y;x,y' or 'x,y,z;...' (4 points)")
    src.add_argument("--family", choices=sorted(FAMILY_BUILDERS), help="builtin element family")
    p.add_argument("--s", type=float, default=2.0**-5, help="family parameter s (default 2^-5)")
    p.add_argument("--eps", type=float, help="family exponent (sliver: eps1)")
    p.add_argument("--delta", type=float, help="second family exponent (sliver: eps2)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("mesh-table", help="MinAngle/MaxAngle metrics per family and N")
    p.add_argument("--families", type=_family_list, default=list(meshes.FAMILIES), help="comma-separated, default all")
    p.add_argument("--ns", type=_int_list, default=[32, 64, 128], help="comma-separated N values")
    p.add_argument("--pattern", choices=("diagonal", "staggered"), help="triangulation pattern override")
    p.set_defaults(func=cmd_mesh_table)

    p = sub.add_parser("converge", help="single-element convergence table")
    p.add_argument("--case", required=True, choices=CASE_NAMES)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--levels", type=_parse_levels, help="comma-separated N values, doubling powers of two")
    p.add_argument("--out", help="write the CSV here instead of stdout")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("probe", help="angle vs H_T/h_T growth along a family")
    p.add_argument("--family", required=True, choices=sorted(FAMILY_BUILDERS))
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--kmin", type=int, default=5, help="first level, s = 2^-kmin")
    p.add_argument("--kmax", type=int, default=10, help="last level")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("check", help="randomized invariant suites")
    p.add_argument("--suite", choices=tuple(SUITES) + ("all",), default="all")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--count", type=_positive_int, default=DEFAULT_COUNT, help="random simplices per check")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "quality" and args.family is not None and args.n is None:
        parser.error("quality --family requires --n")
    if args.command == "probe" and args.kmax <= args.kmin:
        parser.error("--kmax must exceed --kmin")
    try:
        return args.func(args)
    except AnisoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Acceptance criteria. Each test prints one PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for the summary lines only.
"""

import math
import time

import numpy as np
import pytest

from aniso import families as fam
from aniso import geometry as geo
from aniso.checks import run_suite
from aniso.fields import Difference, polynomial_field
from aniso.harness import make_case, run_study
from aniso.interpolation import interpolate
from aniso.meshes import generate, quality
from aniso.norms import SeminormSpec, lp_norm, seminorm
from aniso.quality import H_star, condition_report, equivalence_probe
from aniso.standardization import mathscr_h, standardize

SIG5 = 5e-5  # relative, 5 significant digits

SLIVER = {
    (1.5, 1.0): [
        (1.4033, 6.7882e1, 3.4471e1, 5.0195e-1),
        (1.4087, 9.6000e1, 4.8375e1, 5.0098e-1),
        (1.4115, 1.3576e2, 6.8147e1, 5.0049e-1),
    ],
    (1.0, 1.5): [
        (5.6569, 6.7882e1, 8.5513, 5.0006e-1),
        (8.0000, 9.6000e1, 8.5184, 5.0002e-1),
        (1.1314e1, 1.3576e2, 8.5018, 5.0000e-1),
    ],
    (1.5, 1.5): [
        (5.6569, 3.8400e2, 3.4986e1, 1.4170),
        (8.0000, 7.6800e2, 4.8744e1, 2.0010),
        (1.1314e1, 1.5360e3, 6.8411e1, 2.8288),
    ],
}

MESH_MIN = {
    "I": (4.0, 4.0, 4.0),
    "II": (1.86831e1, 1.56487e1, 1.34936e1),
    "III": (4.08092e1, 8.15201e1, 1.62991e2),
    "IV": (6.40625e1, 1.28031e2, 2.56016e2),
}
MESH2 = {
    "V": ((1.84665e1, 4.83323), (1.53887e1, 4.10712), (1.31904e1, 3.60084)),
    "VI": ((6.4e1, 1.60625e1), (1.28e2, 3.20312e1), (2.56e2, 6.40156e1)),
}

BUBBLE = {
    1.5: ((2.9951e-2, 2.1101e-2, 1.4874e-2, 1.0491e-2), (5.0529e-1, 5.0452e-1, 5.0364e-1)),
    2.0: ((3.3397e-1, 3.3366e-1, 3.3350e-1, 3.3341e-1), (1.3398e-3, 6.9198e-4, 3.8939e-4)),
}
CASE_I = (2.4336e-08, 1.5209e-09, 9.5053e-11)


def _close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def criterion_1():
    t0 = time.perf_counter()
    worst, bad = 0.0, []
    for (e1, e2), rows in SLIVER.items():
        for N, expected in zip((32, 64, 128), rows):
            T = fam.sliver(1 / N, e1, e2)
            r = condition_report(T)
            got = (r.hmax_over_hmin, r.ratio_classic, H_star(T) / r.h_T, r.R_over_h)
            for g, x in zip(got, expected):
                err = abs(g - x) / abs(x)
                worst = max(worst, err)
                if err > SIG5:
                    bad.append(f"({e1},{e2},N={N}) {g:.5g} vs {x:.5g}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1.0
    return ok, f"max rel {worst:.1e}, {dt:.2f}s" + (f"; {bad[:3]}" if bad else "")


def criterion_2():
    bad, slowest = [], 0.0
    expected = {f: [(mn, 2.0) for mn in mins] for f, mins in MESH_MIN.items()} | MESH2
    for fam_name, rows in expected.items():
        for N, (mn, mx) in zip((32, 64, 128), rows):
            t0 = time.perf_counter()
            Q = quality(generate(fam_name, N))
            slowest = max(slowest, time.perf_counter() - t0)
            if not _close(Q.min_angle_metric, mn, SIG5):
                bad.append(f"{fam_name}/{N} MinAngle {Q.min_angle_metric:.5e} cell {Q.min_angle_cell}")
            # MaxAngle = 2 is exact for I-IV
            tol = 1e-14 if fam_name in MESH_MIN else SIG5
            if not _close(Q.max_angle_metric, mx, tol):
                bad.append(f"{fam_name}/{N} MaxAngle {Q.max_angle_metric:.5e} cell {Q.max_angle_cell}")
    ok = not bad and slowest < 5.0
    return ok, f"families I-VI, N=32,64,128; slowest mesh {slowest:.2f}s" + (f"; {bad[:4]}" if bad else "")


def criterion_3():
    t0 = time.perf_counter()
    bad, worst_e, worst_r = [], 0.0, 0.0
    for eps, (errs, rates) in BUBBLE.items():
        t = run_study(make_case("p1bubble", eps))
        e = max(abs(g - x) / x for g, x in zip(t.errors, errs))
        r = max(abs(g - x) for g, x in zip(t.rates, rates))
        worst_e, worst_r = max(worst_e, e), max(worst_r, r)
        if e > 5e-3 or r > 0.01:
            bad.append(f"eps={eps}: Err {['%.4e' % e for e in t.errors]}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1.0
    return ok, f"max rel Err {worst_e:.2e}, max |dr| {worst_r:.1e}, {dt:.2f}s" + (f"; {bad}" if bad else "")


def criterion_4():
    t0 = time.perf_counter()
    notes = []
    t1 = run_study(make_case("lag3d-I", 3.0, 2.0))
    rel = max(abs(g - x) / x for g, x in zip(t1.errors, CASE_I))
    ok_err = rel <= 5e-3
    ok_r1 = bool(np.all(np.abs(t1.rates - 4.0) <= 0.01))
    if not ok_err:
        notes.append(f"case I Err {['%.4e' % e for e in t1.errors]} (rel {rel:.2f})")
    t2 = run_study(make_case("lag3d-II", 3.0))
    ok_r2 = bool(np.all(np.abs(t2.rates - 1.5) <= 0.01))
    t3 = run_study(make_case("lag3d-II", 6.0))
    ok_c = bool(np.all(np.abs(t3.errors - 1.0206e-1) <= 5e-3 * 1.0206e-1)) and bool(np.all(np.abs(t3.rates) <= 0.01))
    dt = time.perf_counter() - t0
    ok = ok_err and ok_r1 and ok_r2 and ok_c and dt < 1.0
    parts = [f"I r={t1.rates.round(3).tolist()}", f"II(3) r={t2.rates.round(3).tolist()}", f"II(6) Err={t3.errors[0]:.4e}", f"{dt:.2f}s"]
    return ok, ", ".join(parts) + (f"; {notes}" if notes else "")


def criterion_5():
    phi = polynomial_field(2, {(2, 0): 1.0, (0, 2): 1.0})
    worst = 0.0
    for eps in (1.5, 2.0, 3.0):
        for k in range(5, 11):
            T = fam.right_angled(2.0**-k, eps)
            I = interpolate("Lagrange", T, phi)
            H = mathscr_h(standardize(T)).values
            num = lp_norm(T, Difference(phi, I.poly), math.inf)
            den = geo.measure(T) ** -0.5 * seminorm(T, phi, SeminormSpec(m=2, frame="weighted", weights=H))
            worst = max(worst, abs(num / den - 0.125))
    return worst <= 1e-9, f"max |ratio - 1/8| {worst:.1e}"


def criterion_6():
    t0 = time.perf_counter()
    results = run_suite("all", seed=42, count=1000)
    dt = time.perf_counter() - t0
    failed = [r.line() for r in results if not r.passed]
    ok = not failed and dt < 60.0
    return ok, f"{len(results) - len(failed)}/{len(results)} checks on 1000 simplices, {dt:.1f}s" + (f"; {failed}" if failed else "")


def criterion_7():
    fams = {
        "blade(2)": (lambda s: fam.blade(s, 2.0), "co-diverging"),
        "sliver(1.5,1.0)": (lambda s: fam.sliver(s, 1.5, 1.0), "co-diverging"),
        "right(3)": (lambda s: fam.right_angled(s, 3.0), "co-bounded"),
        "dagger(1.5,2)": (lambda s: fam.dagger(s, 1.5, 2.0), "co-bounded"),
    }
    got = {name: equivalence_probe(f).verdict for name, (f, _) in fams.items()}
    ok = all(got[n] == want for n, (_, want) in fams.items())
    return ok, ", ".join(f"{n} {v}" for n, v in got.items())


CRITERIA = [
    ("1 sliver geometry tables", criterion_1),
    ("2 mesh-family quality tables", criterion_2),
    ("3 P1+bubble convergence tables", criterion_3),
    ("4 3D Lagrange convergence", criterion_4),
    ("5 L-infinity ratio equals 1/8", criterion_5),
    ("6 randomized property suites", criterion_6),
    ("7 equivalence probe verdicts", criterion_7),
]


def _line(name, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}"


@pytest.mark.parametrize("name,fn", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    for name, fn in CRITERIA:
        print(_line(name, *fn()), flush=True)

import math

import numpy as np
import pytest
from hypothesis import given

from aniso import families as fam
from aniso import geometry as geo
from aniso.geometry import Simplex
from aniso.quality import (
    GOOD_LABELS,
    Taxonomy,
    H_parameter,
    H_star,
    classify,
    condition_report,
    equivalence_probe,
)
from aniso.standardization import angle_at_p1, standardize

from conftest import simplices


@pytest.mark.parametrize("s", [0.5, 2.0**-5, 2.0**-10])
@pytest.mark.parametrize("eps", [1.0, 1.5, 3.0])
def test_right_angled_ratio_is_two(s, eps):
    T = fam.right_angled(s, eps)
    assert H_parameter(T) / T.diameter() == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize(
    "eps1,eps2,N,expected",
    [(1.5, 1.0, 64, 4.8375e1), (1.0, 1.5, 128, 8.5018)],
)
def test_sliver_table_ratio(eps1, eps2, N, expected):
    # the printed column is the edge-product variant of the ratio
    T = fam.sliver(1 / N, eps1, eps2)
    assert H_star(T) / T.diameter() == pytest.approx(expected, rel=5e-5)


def test_h_star_closed_forms(unit_triangle):
    assert H_star(unit_triangle) == pytest.approx(2 / 0.5 * 1.0, rel=1e-15)
    eq = Simplex([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    assert H_star(eq) == pytest.approx(4 / math.sqrt(3), rel=1e-14)
    H = H_parameter(unit_triangle)
    assert 0.5 * H_star(unit_triangle) < H < 2 * H_star(unit_triangle)


def test_blade_ratio_closed_form():
    delta = 0.01
    r = condition_report(fam.blade_delta(1.0, delta))
    assert r.ratio_new == pytest.approx((1 + delta**2) / delta, rel=1e-10)


def test_regular_tet_classic_ratio_is_minimal():
    T = Simplex([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
    best = condition_report(T).ratio_classic
    assert best == pytest.approx(6 * math.sqrt(2), rel=1e-13)
    rng = np.random.default_rng(0)
    for _ in range(300):
        P = T.vertices + 0.2 * rng.normal(size=(4, 3))
        if not geo.is_degenerate(Simplex(P)):
            assert condition_report(Simplex(P)).ratio_classic >= best * (1 - 1e-12)


def test_classify_examples():
    assert classify(fam.right_angled(2.0**-7, 3.0), 10) is Taxonomy.RightAngled
    assert classify(fam.blade(2.0**-7, 2.0), 10) is Taxonomy.Blade
    for k in range(3, 12):
        assert classify(fam.dagger(2.0**-k, 1.5, 2.0), 10) in GOOD_LABELS


def test_classify_regular_and_sliver():
    eq = Simplex([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])
    assert classify(eq) is Taxonomy.Isotropic
    assert classify(fam.sliver(2.0**-7, 1.5, 1.0)) not in GOOD_LABELS


def test_probe_verdicts():
    assert equivalence_probe(lambda s: fam.right_angled(s, 3.0)).verdict == "co-bounded"
    blade = equivalence_probe(lambda s: fam.blade(s, 2.0))
    assert blade.verdict == "co-diverging"
    assert blade.rows[-1].angle > blade.rows[0].angle
    sl = equivalence_probe(lambda s: fam.sliver(s, 1.5, 1.0))
    assert sl.verdict == "co-diverging"


@given(simplices(min_shape=1e-6))
def test_h_star_equivalence(T):
    H, Hs = H_parameter(T), H_star(T)
    assert 0.5 * Hs < H < 2 * Hs


@given(simplices(min_shape=1e-6))
def test_h_lower_bound(T):
    H = H_parameter(T)
    if T.dim == 2:
        assert T.diameter() <= 0.5 * H * (1 + 1e-14)
    else:
        assert T.diameter() < H / 6


@given(simplices(dims=(2,)))
def test_h_star_against_circumradius(T):
    R = geo.circumradius(T)
    assert 2 * R < H_star(T) * (1 + 1e-14)
    assert H_star(T) < 8 * R


@given(simplices(dims=(2,)))
def test_h_sine_identity(T):
    theta = angle_at_p1(standardize(T))
    assert H_parameter(T) * math.sin(theta) == pytest.approx(2 * T.diameter(), rel=1e-10)


@given(simplices(dims=(3,)))
def test_h_tet_identity(T):
    p = standardize(T).params
    assert H_parameter(T) * p["t1"] * p["t2"] == pytest.approx(6 * T.diameter(), rel=1e-10)


@given(simplices())
def test_report_is_consistent(T):
    r = condition_report(T)
    assert r.ratio_new == pytest.approx(r.H_T / r.h_T, rel=1e-15)
    assert r.hmax_over_hmin >= 1
    assert (r.max_dihedral is None) == (T.dim == 2)
    assert (r.classification in GOOD_LABELS) == (r.ratio_new <= 10)

import io
import math
from pathlib import Path

import numpy as np
import pytest

from aniso.errors import InvalidN, NonConformal, ParseError
from aniso.meshes import (
    FAMILIES,
    Mesh,
    conformity_check,
    format_mesh,
    generate,
    grid_coordinates,
    parse_mesh,
    quality,
    read_mesh,
    shishkin_tau,
    triangle_columns,
    write_mesh,
    write_quality_csv,
)
from aniso.quality import condition_report

DATA = Path(__file__).parent / "data"

# (MinAngle, MaxAngle) per N = 32, 64, 128
TABLE = {
    "I": [(4.0, 2.0)] * 3,
    "II": [(1.86831e1, 2.0), (1.56487e1, 2.0), (1.34936e1, 2.0)],
    "III": [(4.08092e1, 2.0), (8.15201e1, 2.0), (1.62991e2, 2.0)],
    "IV": [(6.40625e1, 2.0), (1.28031e2, 2.0), (2.56016e2, 2.0)],
    "V": [(1.84665e1, 4.83323), (1.53887e1, 4.10712), (1.31904e1, 3.60084)],
    "VI": [(64.0, 16.0625), (128.0, 32.0312), (256.0, 64.0156)],
}


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("k,N", list(enumerate([32, 64, 128])))
def test_quality_tables(family, k, N):
    Q = quality(generate(family, N), check=(N == 32))
    mn, mx = TABLE[family][k]
    assert Q.min_angle_metric == pytest.approx(mn, rel=5e-6)
    assert Q.max_angle_metric == pytest.approx(mx, rel=5e-6)


@pytest.mark.parametrize("family", FAMILIES)
def test_area_tiles_unit_square(family):
    M = generate(family, 16)
    assert M.cell_measures().sum() == pytest.approx(1.0, abs=1e-12)
    assert M.vertices.min() == 0.0 and M.vertices.max() == 1.0


@pytest.mark.parametrize("family", FAMILIES)
def test_generated_meshes_are_conformal(family):
    rep = conformity_check(generate(family, 8), domain_box=(np.zeros(2), np.ones(2)))
    assert rep.conformal, rep.violations


def test_moved_vertex_breaks_conformity():
    M = generate("I", 4)
    v = M.vertices.copy()
    # split one edge of a cell without updating its neighbour
    # cell 0 is (a, b, d); a-d is the diagonal shared with cell 1
    a, b, d = M.cells[0]
    mid = len(v)
    v = np.vstack([v, 0.5 * (v[a] + v[d])])
    cells = M.cells.copy()
    cells[0] = (a, b, mid)
    cells = np.vstack([cells, (mid, b, d)])
    rep = conformity_check(Mesh(v, cells))
    assert not rep.conformal
    assert "hanging node" in {x.kind for x in rep.violations}
    assert rep.cells() <= {0, 1, M.ncells}


def test_duplicate_cell_shares_facet_three_times():
    M = generate("I", 4)
    cells = np.vstack([M.cells, M.cells[5]])
    rep = conformity_check(Mesh(M.vertices, cells))
    kinds = [x.kind for x in rep.violations]
    assert "shared by more than two cells" in kinds
    with pytest.raises(NonConformal):
        quality(Mesh(M.vertices, cells))


def test_round_trip_bit_identical(tmp_path):
    M = generate("III", 16)
    p = tmp_path / "m.mesh"
    write_mesh(M, p)
    R = read_mesh(p)
    assert np.array_equal(R.vertices, M.vertices)
    assert np.array_equal(R.cells, M.cells)
    assert format_mesh(R) == format_mesh(M)


def test_golden_file():
    assert format_mesh(generate("I", 4)) == (DATA / "family_I_N4.mesh").read_text()


def test_parse_error_names_line():
    text = "2 3 1\n0 0\n1 0\n0 1\n0 1 7\n"
    with pytest.raises(ParseError) as exc:
        parse_mesh(text, "bad.mesh")
    assert exc.value.line == 5
    assert "bad.mesh:5" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        parse_mesh("2 3 1\n0 0\n1 x\n0 1\n0 1 2\n")
    assert exc.value.line == 3


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        read_mesh(tmp_path / "nope.mesh")


@pytest.mark.parametrize("family", ["II", "V"])
def test_odd_n_rejected(family):
    with pytest.raises(InvalidN):
        generate(family, 33)


def test_invalid_family_and_n():
    with pytest.raises(InvalidN):
        generate("VII", 8)
    with pytest.raises(InvalidN):
        generate("I", 1)


def test_shishkin_transition():
    tau = shishkin_tau(32)
    assert tau == pytest.approx(2 / 128 * math.log(32), rel=1e-15)
    _, y = grid_coordinates("II", 32)
    assert y[16] == pytest.approx(tau, rel=1e-15)
    assert np.all(np.diff(y) > 0)


@pytest.mark.parametrize("family", FAMILIES)
def test_vectorized_columns_match_reports(family):
    M = generate(family, 8)
    t = triangle_columns(M)
    reps = [condition_report(T) for T in M.simplices()]
    np.testing.assert_allclose(t.h_T, [r.h_T for r in reps], rtol=1e-14)
    np.testing.assert_allclose(t.ratio, [r.ratio_new for r in reps], rtol=1e-13)
    np.testing.assert_allclose(t.max_angle, [r.max_angle for r in reps], rtol=1e-13)
    assert t.labels == [r.classification for r in reps]


def test_quality_csv():
    Q = quality(generate("I", 4))
    buf = io.StringIO()
    write_quality_csv(Q, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "cell_id,h_T,H_T,H_T/h_T,max_angle,classification"
    assert len(lines) == 1 + 32
    cols = lines[1].split(",")
    assert float(cols[3]) == pytest.approx(2.0, rel=1e-10)
    assert float(cols[4]) == pytest.approx(math.pi / 2, rel=1e-10)

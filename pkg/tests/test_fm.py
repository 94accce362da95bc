from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from stateic import fm
from stateic.fm import LinearSystem, SymbolicRhs


def system(vars_, rows):
    return LinearSystem.build(vars_, rows)


def test_eliminate_simple_interval():
    # 0 <= y <= 1, x - y <= 0  ->  x <= 1 once y is gone
    s = system(("x", "y"), [((0, -1), 0, "a"), ((0, 1), 1, "b"), ((1, -1), 0, "c")])
    out = fm.eliminate(s, "y")
    assert out.variables == ("x",)
    assert [(r.coeffs, r.rhs) for r in out.rows] == [((mpq(1),), mpq(1))]
    assert out.rows[0].tag == "b+c"


def test_eliminate_unknown_variable():
    with pytest.raises(fm.FMError):
        fm.eliminate(system(("x",), [((1,), 1)]), "z")


def test_row_guard():
    rows = [((1, 1), 1)] * 1 + [((1, k), k) for k in range(1, 400)] + [((-1, k), k) for k in range(1, 400)]
    s = system(("x", "y"), rows)
    old = fm.MAX_ROWS
    fm.MAX_ROWS = 1000
    try:
        with pytest.raises(fm.RowExplosion):
            fm.eliminate(s, "x")
    finally:
        fm.MAX_ROWS = old


def test_normalize_scales_to_primitive_integers():
    r = fm.normalize_row(fm.Row((mpq(1, 2), mpq(3, 4)), mpq(1), "t"))
    assert r.coeffs == (2, 3) and r.rhs == 4


def test_duplicates_keep_the_tightest():
    s = system(("x",), [((1,), 3), ((2,), 4), ((1,), 5)])
    out = fm.prune_redundant(s)
    assert [(r.coeffs, r.rhs) for r in out.rows] == [((mpq(1),), mpq(2))]


def test_prune_removes_implied_rows():
    s = system(("x", "y"), [((1, 0), 1, "a"), ((0, 1), 1, "b"), ((1, 1), 3, "loose"),
                            ((-1, 0), 0, "c"), ((0, -1), 0, "d")])
    assert fm.removed_tags(s) == ["loose"]


def test_prune_of_infeasible_system():
    s = system(("x",), [((1,), 0), ((-1,), -1)])
    assert not fm.is_feasible(s)
    out = fm.prune_redundant(s)
    assert len(out) == 1 and out.rows[0].tag == fm.INFEASIBLE_TAG


def test_symbolic_prune_needs_every_assignment():
    a, b = SymbolicRhs.symbol("a"), SymbolicRhs.symbol("b")
    s = system(("x",), [((1,), a, "ra"), ((1,), a + b, "rab"), ((-1,), 0, "nn")])
    # x <= a + b follows from x <= a when b >= 0; the converse does not
    assert fm.removed_tags(s) == ["rab"]
    s2 = system(("x",), [((1,), a, "ra"), ((1,), b, "rb"), ((-1,), 0, "nn")])
    assert fm.removed_tags(s2) == []


def test_symbolic_instantiation():
    a = SymbolicRhs.make(1, {"p": 2, "q": -1})
    assert a.instantiate({"p": 1, "q": mpq(1, 2)}) == mpq(5, 2)
    assert not a.nonneg_for_all()
    assert (a - a).terms == ()


def test_vertices_of_triangle():
    s = system(("x", "y"), [((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)])
    assert fm.vertices_2d(s) == [(0, 0), (1, 0), (0, 1)]


def test_vertices_errors():
    with pytest.raises(fm.Unbounded):
        fm.vertices_2d(system(("x", "y"), [((-1, 0), 0), ((0, -1), 0)]))
    with pytest.raises(fm.EmptyRegion):
        fm.vertices_2d(system(("x", "y"), [((1, 0), -1), ((-1, 0), 0), ((0, 1), 1), ((0, -1), 0)]))


def test_convex_hull_and_violation():
    pts = [(mpq(0), mpq(0)), (mpq(2), mpq(0)), (mpq(1), mpq(1)), (mpq(0), mpq(2)), (mpq(1, 2), mpq(1, 2))]
    hull = fm.convex_hull(pts)
    assert (mpq(1, 2), mpq(1, 2)) not in hull
    assert len(hull) == 3
    assert fm.polygon_violation(hull, (mpq(1), mpq(1))) == 0
    assert fm.polygon_violation(hull, (mpq(3), mpq(0))) == pytest.approx(1.0)


def test_max_linear_prefers_earliest_vertex_on_ties():
    verts = [(mpq(1), mpq(0)), (mpq(0), mpq(1))]
    val, v = fm.max_linear(verts, (mpq(1, 2), mpq(1, 2)))
    assert val == mpq(1, 2) and v == verts[0]


def test_text_round_trip():
    text = "a: 2*x - 1/3*y <= 0.25\n# comment\n-x <= 0\nb: y <= p + 2*q\n"
    s = fm.parse_system(text)
    assert s.variables == ("x", "y")
    assert s.rows[0].rhs == mpq(1, 4)
    assert s.rows[2].rhs == SymbolicRhs.make(0, {"p": 1, "q": 2})
    again = fm.parse_system(fm.format_system(s))
    assert again.rows == s.rows


@pytest.mark.parametrize("text, line", [
    ("x <= 1\nx + <= 2\n", 2),
    ("x <= 1\nx >= 2\n", 2),
    ("x <= 1 <= 2\n", 1),
])
def test_parse_errors_report_line(text, line):
    with pytest.raises(fm.ParseError) as info:
        fm.parse_system(text)
    assert info.value.line == line


def test_decimal_rhs_is_snapped():
    s = fm.parse_system("x <= 0.1\n")
    assert s.rows[0].rhs == mpq(1, 10)


# ------------------------------------------------------------------ soundness properties


small = st.integers(-3, 3)


@st.composite
def systems(draw, nvars=3):
    rows = []
    for _ in range(draw(st.integers(2, 7))):
        coeffs = [draw(small) for _ in range(nvars)]
        rows.append((coeffs, Fraction(draw(st.integers(-10, 20)), 10)))
    return rows


@settings(max_examples=80, deadline=None)
@given(systems(), st.lists(st.integers(-20, 20), min_size=3, max_size=3))
def test_projection_contains_projected_points(rows, point):
    """Any feasible point of the original projects into the eliminated system."""
    vars_ = ("x", "y", "z")
    s = system(vars_, rows)
    x = [mpq(p, 10) for p in point]
    out = fm.eliminate_all(s, ("z",))
    if s.contains(x):
        assert out.contains(x[:2])


@settings(max_examples=40, deadline=None)
@given(systems())
def test_pruning_keeps_the_set(rows):
    s = system(("x", "y", "z"), rows)
    pruned = fm.prune_redundant(s)
    grid = [mpq(k, 4) for k in range(-8, 9, 2)]
    for a in grid:
        for b in grid:
            for c in grid:
                assert s.contains((a, b, c)) == pruned.contains((a, b, c))


def random_int_system(rng, nvars, nrows):
    rows = []
    for _ in range(nrows):
        coeffs = rng.integers(-3, 4, size=nvars)
        if not coeffs.any():
            coeffs[rng.integers(nvars)] = 1
        rows.append((coeffs.tolist(), Fraction(int(rng.integers(-15, 26)), 50)))
    return rows


def test_grid_oracle_agrees_on_small_systems():
    rng = np.random.default_rng(5)
    vars_ = ("a", "b", "c", "d")
    for _ in range(10):
        rows = random_int_system(rng, 4, int(rng.integers(3, 10)))
        out = fm.eliminate_all(system(vars_, rows), ("d",))
        ref = oracles.grid_members(rows, vars_, ("a", "b", "c"), "d", lo=-15, hi=15)
        got = oracles.system_members(out, ("a", "b", "c"), lo=-15, hi=15)
        assert np.array_equal(ref, got)

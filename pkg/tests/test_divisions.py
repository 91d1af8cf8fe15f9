import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from colorsep.divisions import (
    base_order,
    format_division,
    make_division,
    parse_division,
    regroup,
    rf_division,
    t_range,
    uniform_division,
    verify_division,
)
from colorsep.errors import InvalidParameter, ParameterOutOfWindow
from colorsep.generators import grid, grid_subgraph, make_rng, triangulated_grid
from colorsep.graph import Graph
from colorsep.separators import EXHAUSTIVE, LIPTON_TARJAN

from conftest import path


def cycle(n):
    edges = [(i, (i + 1) % n) for i in range(n)]
    rot = [[(i + 1) % n, (i - 1) % n] for i in range(n)]
    return Graph.from_edges(n, edges, rotation=rot)


def test_small_graph_is_one_part():
    g = grid(3)
    d = rf_division(g, LIPTON_TARJAN, 9)
    assert d.t == 1 and d.boundary == frozenset() and d.parts[0] == frozenset(range(9))


def test_rf_division_rejects_bad_r():
    with pytest.raises(InvalidParameter):
        rf_division(grid(3), LIPTON_TARJAN, 0)


def test_path_division():
    g = path(100)
    d = rf_division(g, LIPTON_TARJAN, 10)
    rep = verify_division(g, d)
    assert rep.valid, rep.violations
    for part in d.parts:
        assert len(part) + len(d.part_boundary[d.parts.index(part)]) <= 10
    assert rep.max_part_boundary <= 2


def test_grid_rf_division():
    g = grid(32)
    d = rf_division(g, LIPTON_TARJAN, 64)
    rep = verify_division(g, d)
    assert rep.valid, rep.violations
    assert rep.measured_c1 > 0
    assert rep.max_part_boundary == pytest.approx(rep.measured_c1 * LIPTON_TARJAN.f(64))


def test_measured_constants_reproduce_extrema():
    g = triangulated_grid(20)
    d = uniform_division(g, LIPTON_TARJAN, 16)
    rep = verify_division(g, d, uniform=True)
    f = LIPTON_TARJAN.f(16)
    assert math.isclose(rep.measured_c1 * f, rep.max_part_boundary)
    assert math.isclose(rep.measured_c2 * f * g.n / 16, rep.boundary_total)


def test_rf_division_with_exhaustive_oracle():
    g = grid(4)
    d = rf_division(g, EXHAUSTIVE, 6)
    assert verify_division(g, d).valid


def test_hand_built_cycle_division():
    g = cycle(6)
    d = make_division(g, {0, 3}, [{1, 2}, {4, 5}], 4)
    rep = verify_division(g, d)
    assert rep.valid
    assert rep.max_part_boundary == 2


def test_adjacent_parts_flagged():
    g = cycle(6)
    d = make_division(g, {0}, [{1, 2, 3}, {4, 5}], 6)
    kinds = {v[0] for v in verify_division(g, d).violations}
    assert "parts-adjacent" in kinds


def test_uncovered_and_overlap_flagged():
    g = cycle(6)
    d = make_division(g, {0}, [{1, 2}, {2, 4, 5}], 6)
    kinds = {v[0] for v in verify_division(g, d).violations}
    assert "overlap" in kinds and "uncovered" in kinds


def test_uniform_grid_16():
    g = grid(16)
    d = uniform_division(g, LIPTON_TARJAN, 32)
    rep = verify_division(g, d, uniform=True)
    assert rep.valid, rep.violations
    assert 16 <= rep.min_part_size and rep.max_part_size <= 64


def test_uniform_disjoint_union():
    # two 16x16 grids side by side without connecting edges
    one = grid(16)
    n = one.n
    edges = list(one.edges()) + [(u + n, v + n) for u, v in one.edges()]
    rot = [list(r) for r in one.rotation] + [[u + n for u in r] for r in one.rotation]
    g = Graph.from_edges(2 * n, edges, rotation=rot)
    d = uniform_division(g, LIPTON_TARJAN, 32)
    assert verify_division(g, d, uniform=True).valid


def test_uniform_path_1000():
    g = path(1000)
    d = uniform_division(g, LIPTON_TARJAN, 40)
    rep = verify_division(g, d, uniform=True)
    assert rep.valid, rep.violations
    n_star = g.n - len(d.boundary)
    assert d.t == -(-n_star // 40)


def test_t_in_range():
    g = triangulated_grid(30)
    for r in (16, 32):
        d = uniform_division(g, LIPTON_TARJAN, r)
        lo, hi = t_range(g.n - len(d.boundary), r)
        assert lo <= d.t <= hi


def test_base_order_non_increasing():
    d = uniform_division(grid(20), LIPTON_TARJAN, 16)
    seq = base_order(d)
    assert seq and all(a >= b for a, b in zip(seq, seq[1:]))


def test_uniform_window():
    g = grid(8)
    with pytest.raises(ParameterOutOfWindow) as err:
        uniform_division(g, LIPTON_TARJAN, 64)
    assert err.value.bound == "upper"
    with pytest.raises(ParameterOutOfWindow) as err:
        uniform_division(g, LIPTON_TARJAN, 4)
    assert err.value.bound == "lower"


def test_tiny_graph_trivial_uniform():
    d = uniform_division(path(5), LIPTON_TARJAN, 16)
    assert d.t == 1 and d.boundary == frozenset()


def test_equal_sizes_all_placed_in_step_one():
    # 40 base parts of size 2 and r = 16: every group ends at exactly n*/t
    groups = regroup([2] * 40, 16)
    t = -(-80 // 16)
    assert len(groups) == t
    sizes = [2 * len(gr) for gr in groups]
    assert all(s == Fraction(80, t) for s in sizes)


@settings(max_examples=200, deadline=None)
@given(st.integers(8, 64), st.lists(st.integers(1, 8), min_size=1, max_size=400))
def test_regroup_bounds(r, raw):
    cap = r // 8
    sizes = sorted((min(s, cap) for s in raw), reverse=True)
    n_star = sum(sizes)
    if 3 * r > n_star:
        return
    groups = regroup(sizes, r)
    flat = sorted(j for gr in groups for j in gr)
    assert flat == list(range(len(sizes)))
    for gr in groups:
        total = sum(sizes[j] for j in gr)
        assert 2 * total >= r and total <= 2 * r


def test_determinism():
    g = triangulated_grid(24, 24, make_rng(5))
    assert uniform_division(g, LIPTON_TARJAN, 16) == uniform_division(g, LIPTON_TARJAN, 16)


@pytest.mark.slow
def test_uniform_on_random_triangulated_grids():
    for seed in range(100):
        rng = make_rng(seed)
        w = int(rng.integers(16, 32))
        g = triangulated_grid(w, w, rng)
        d = uniform_division(g, LIPTON_TARJAN, 16)
        rep = verify_division(g, d, uniform=True)
        assert rep.valid, (seed, rep.violations[:3])


@settings(max_examples=25, deadline=None)
@given(st.integers(6, 16), st.integers(6, 16), st.integers(0, 99_999))
def test_rf_division_on_grid_subgraphs(w, h, seed):
    g = grid_subgraph(w, h, 0.8, make_rng(seed), triangulated=True, connected=False)
    for r in (4, 10):
        d = rf_division(g, LIPTON_TARJAN, r)
        assert verify_division(g, d).valid
        d = rf_division(g, LIPTON_TARJAN, r, mode="interior")
        assert verify_division(g, d).valid


def test_division_roundtrip():
    g = grid(12)
    d = uniform_division(g, LIPTON_TARJAN, 16)
    back = parse_division(format_division(d), g)
    assert back.boundary == d.boundary and back.parts == d.parts
    assert back.part_boundary == d.part_boundary
    assert format_division(back) == format_division(d)

from fractions import Fraction as F
import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rational_cycles
from flatcycle.cycles import RATIONAL, boundary, combine, make_cycle, mass
from flatcycle.errors import ChiNonZero, DimensionMismatch, SizeOverflow
from flatcycle.generators import grid_random
from flatcycle.grid import (
    GridSpec,
    fill_constant,
    grid_edges,
    grid_points,
    line_fill,
    make_grid_cycle,
    min_projected_separation,
    separating_direction,
    snap,
    snap_grid,
    verify_grid_mass,
)
from flatcycle.transport import gnorm, gnorm_1d


def test_grid_points():
    assert grid_points(GridSpec(1, 1)) == [(-1,), (0,), (1,)]
    assert len(grid_points(GridSpec(2, 1))) == 9
    assert len(grid_points(GridSpec(3, 2))) == 125
    assert grid_points(GridSpec(2, 2))[:2] == [(-1, -1), (-1, F(-1, 2))]


def test_grid_size_cap():
    with pytest.raises(SizeOverflow):
        grid_points(GridSpec(3, 10), cap=1000)
    with pytest.raises(SizeOverflow):
        grid_edges(GridSpec(3, 10), cap=1000)


def test_grid_edges_counts():
    assert len(grid_edges(GridSpec(1, 1))) == 2
    assert len(grid_edges(GridSpec(1, 3))) == 6
    edges = grid_edges(GridSpec(2, 1))
    # direct enumeration: unordered pairs of vertices at distance 1/k
    pts = list(itertools.product(range(-1, 2), repeat=2))
    adjacent = [(a, b) for a, b in itertools.combinations(pts, 2) if sum(abs(x - y) for x, y in zip(a, b)) == 1]
    assert len(edges) == len(adjacent) == 12 == 2 * 2 * 1 * 3
    for n, k in [(1, 4), (2, 3), (3, 2)]:
        assert len(grid_edges(GridSpec(n, k))) == n * 2 * k * (2 * k + 1) ** (n - 1)


def test_snap_examples():
    spec = GridSpec(1, 1)
    t = make_cycle(1, [((1,), 1), ((0,), -1)], RATIONAL)
    g, bound = snap(t, spec)
    assert g.to_cycle() == t and bound == 0
    g, bound = snap(make_cycle(1, [((0.4,), 1), ((1.0,), -1)]), spec)
    assert dict(g.theta) == {(0,): 1.0, (1,): -1.0} and bound == pytest.approx(0.4)
    t = make_cycle(2, [((0.3, 0.3), 1), ((-0.3, -0.3), -1)])
    g, bound = snap(t, GridSpec(2, 2))
    assert dict(g.theta) == {(1, 1): 1.0, (-1, -1): -1.0}
    assert bound == pytest.approx(0.4 * math.sqrt(2), rel=1e-12)
    assert gnorm(combine(1, t, -1, g.to_cycle())).value <= bound + 1e-12


def test_snap_ties_go_down():
    g, _ = snap(make_cycle(1, [((F(1, 2),), 1), ((F(-1, 2),), -1)], RATIONAL), GridSpec(1, 1))
    assert dict(g.theta) == {(0,): 1, (-1,): -1}


def test_separating_direction_examples():
    sd = separating_direction(GridSpec(1, 3))
    assert sd.u == (1.0,) and sd.rho == pytest.approx(1 / 3)
    sd = separating_direction(GridSpec(2, 1))
    assert sd.alpha_k == pytest.approx(0.2)
    norm = math.hypot(1, 0.2)
    assert sd.u == pytest.approx((1 / norm, 0.2 / norm), rel=1e-15)
    assert sd.rho == pytest.approx(1 / (10 * math.sqrt(2)), rel=1e-15)


def _pairwise_min(spec, u):
    pts = [tuple(c / spec.k for c in i) for i in itertools.product(range(-spec.k, spec.k + 1), repeat=spec.n)]
    return min(abs(sum((a - b) * w for a, b, w in zip(x, y, u))) for x, y in itertools.permutations(pts, 2))


def test_separation_exhaustive_two_routes():
    spec = GridSpec(2, 1)
    sd = separating_direction(spec)
    assert sum(1 for _ in itertools.permutations(range(9), 2)) == 72
    brute = _pairwise_min(spec, sd.u)
    assert brute >= sd.rho
    assert brute == pytest.approx(min_projected_separation(spec, sd.u), rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_separation_claim(n, k):
    spec = GridSpec(n, k)
    sd = separating_direction(spec)
    assert abs(math.fsum(c * c for c in sd.u) - 1) <= 1e-12
    assert min_projected_separation(spec, sd.u) >= sd.rho


def test_line_fill_examples():
    t = make_cycle(1, [((1,), 1), ((-1,), -1)], RATIONAL)
    s = line_fill(t)
    assert s.mass == 2 and boundary(s) == t
    t = make_cycle(1, [((-1,), 1), ((0,), -2), ((1,), 1)], RATIONAL)
    s = line_fill(t)
    assert [seg.coef for seg in s.segments] == [-1, 1]
    assert s.mass == 2 == gnorm_1d(t) and boundary(s) == t
    assert len(line_fill(make_cycle(1, [], RATIONAL))) == 0
    with pytest.raises(DimensionMismatch):
        line_fill(make_cycle(2, []))


def test_line_fill_accepts_grid_cycle():
    g = make_grid_cycle(GridSpec(1, 2), {(-2,): F(1, 2), (1,): F(-1, 2)}, RATIONAL)
    assert boundary(line_fill(g)) == g.to_cycle()


def test_grid_cycle_chi_checked():
    with pytest.raises(ChiNonZero):
        make_grid_cycle(GridSpec(1, 1), {(0,): 1}, RATIONAL)
    with pytest.raises(DimensionMismatch):
        make_grid_cycle(GridSpec(1, 1), {(2,): 1, (0,): -1}, RATIONAL)


def test_grid_mass_examples():
    rep = verify_grid_mass(make_grid_cycle(GridSpec(1, 1), {(1,): 1, (-1,): -1}, RATIONAL))
    assert rep.passed
    assert (rep.values["G"], rep.values["M"], rep.values["upper"]) == (2.0, 2.0, 6.0)
    rep = verify_grid_mass(make_grid_cycle(GridSpec(2, 1), {}, RATIONAL))
    assert rep.passed and rep.values["G"] == 0 == rep.values["M"]


def test_fill_constant_values():
    assert fill_constant(1) == 3
    assert fill_constant(2) == pytest.approx(2 * math.sqrt(2) * 5 * 9)


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 10), st.integers(0, 2**32))
def test_sandwich_on_random_grid_cycles(n, k, atoms, seed):
    assert verify_grid_mass(grid_random(n, k, atoms, seed)).passed


@given(rational_cycles(max_atoms=8), st.integers(1, 4))
def test_snap_idempotent_and_bounded(t, k):
    spec = GridSpec(t.n, k)
    g, bound = snap(t, spec)
    assert snap_grid(g) == g
    assert bound <= float(mass(t)) * math.sqrt(t.n) / (2 * k) + 1e-12
    assert gnorm(combine(1, t, -1, g.to_cycle())).value <= bound + 1e-9


@given(rational_cycles(n=1, max_atoms=10))
def test_line_fill_is_optimal(t):
    s = line_fill(t)
    assert boundary(s) == t
    assert abs(s.mass - gnorm(t).value) <= 1e-12

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cycle_pairs, rational_cycles
from flatcycle.cycles import (
    FLOAT,
    RATIONAL,
    Segment,
    boundary,
    chi,
    clamp,
    combine,
    cone,
    embed_free,
    make_chain,
    make_cycle,
    mass,
)
from flatcycle.errors import ChiNonZero, DimensionMismatch, OutOfCube


def test_empty_cycle_has_zero_mass():
    t = make_cycle(1, [])
    assert len(t) == 0 and mass(t) == 0


def test_cancelling_atoms_give_zero_cycle():
    assert len(make_cycle(1, [((0.5,), 1), ((0.5,), -1)])) == 0


def test_dipole_on_the_line():
    t = make_cycle(1, [((1,), 1), ((-1,), -1)])
    assert len(t) == 2 and mass(t) == 2


def test_make_cycle_errors():
    with pytest.raises(ChiNonZero):
        make_cycle(1, [((0.2,), 1)])
    with pytest.raises(OutOfCube):
        make_cycle(1, [((1.5,), 1), ((0,), -1)])
    with pytest.raises(DimensionMismatch):
        make_cycle(2, [((0.1,), 1), ((0.2, 0.1), -1)])


def test_cube_slack_is_clamped():
    t = make_cycle(1, [((1 + 1e-13,), 1), ((0,), -1)])
    assert t.points[-1] == (1.0,)


def test_float_chi_tolerance():
    t = make_cycle(1, [((0.1,), 0.1), ((0.2,), 0.2), ((0.3,), -0.30000000000000004)])
    assert len(t) == 3


def test_embed_free():
    x = (F(1, 2), F(-1, 4))
    t = embed_free(2, [(x, 1)], RATIONAL)
    assert t.as_dict() == {x: 1, (0, 0): -1}
    assert len(embed_free(2, [], RATIONAL)) == 0
    a, b = (F(1, 2), F(0)), (F(0), F(1, 3))
    assert embed_free(2, [(a, 1), (b, -1)], RATIONAL).as_dict() == {a: 1, b: -1}


def test_chi_values():
    assert chi(make_cycle(1, [])) == 0
    assert chi(embed_free(1, [((F(1, 2),), 1)], RATIONAL)) == 0
    assert chi([((0.3,), 3)]) == 3


def test_mass_values():
    assert mass([]) == 0
    assert mass(make_cycle(1, [((1,), 1), ((-1,), -1)])) == 2
    assert mass([((0, 0), 2), ((1, 0), -1), ((0, 1), -1)]) == 4


def test_combine_examples():
    x, y = (F(1, 2),), (F(-1, 3),)
    t = make_cycle(1, [(x, 1), ((0,), -1)], RATIONAL)
    assert len(combine(1, t, -1, t)) == 0
    assert combine(2, t, 0, t).as_dict() == {x: 2, (0,): -2}
    s = make_cycle(1, [((0,), 1), (y, -1)], RATIONAL)
    assert combine(1, t, 1, s).as_dict() == {x: 1, y: -1}
    with pytest.raises(DimensionMismatch):
        combine(1, t, 1, make_cycle(2, []))


def test_clamp_examples():
    assert clamp([((1.5, 0), 1)]) == [((1, 0), 1)]
    assert clamp([((0.2, -0.3), 1)]) == [((0.2, -0.3), 1)]
    assert clamp([((-2, -2), 1)]) == [((-1, -1), 1)]


def test_boundary_examples():
    a, b, c = (F(0), F(0)), (F(1), F(0)), (F(0), F(1))
    assert boundary(make_chain(2, [(a, b, 1)], RATIONAL)).as_dict() == {b: 1, a: -1}
    assert len(boundary(make_chain(2, [], RATIONAL))) == 0
    loop = make_chain(2, [(a, b, 1), (b, c, 1), (c, a, 1)], RATIONAL)
    assert len(boundary(loop)) == 0


def test_boundary_outside_cube():
    with pytest.raises(OutOfCube):
        boundary(make_chain(1, [((0,), (2,), 1)]))


def test_segment_rejects_degenerate():
    with pytest.raises(ValueError):
        Segment((0.0,), (0.0,), 1)
    Segment((0.0,), (0.0,), 0)


def test_cone_examples():
    x = (F(1, 2), F(1, 2))
    t = make_cycle(2, [(x, 1), ((0, 0), -1)], RATIONAL)
    s = cone(t, (0, 0))
    assert len(s) == 1 and s.segments[0].coef == 1
    assert s.mass == pytest.approx(2**-0.5)
    assert len(cone(make_cycle(2, [], RATIONAL), (0, 0))) == 0
    d = make_cycle(1, [((1,), 1), ((-1,), -1)], RATIONAL)
    s = cone(d, (0,))
    assert sorted((seg.b, seg.coef) for seg in s.segments) == [((-1,), -1), ((1,), 1)]
    assert s.mass == 2 and boundary(s) == d


@given(rational_cycles(), st.tuples(*[st.integers(-4, 4).map(lambda i: F(i, 4))] * 3))
def test_cone_fills_and_obeys_mass_bound(t, apex):
    a = apex[: t.n]
    s = cone(t, a)
    assert boundary(s) == t
    from flatcycle.cycles import dist

    radius = max((dist(p, a) for p in t.points), default=0.0)
    assert s.mass <= radius * float(mass(t)) + 1e-12


@given(cycle_pairs(), st.integers(-3, 3), st.integers(-3, 3))
def test_combine_mass_is_subadditive(pair, alpha, beta):
    t1, t2 = pair
    c = combine(alpha, t1, beta, t2)
    assert chi(c) == 0
    assert mass(c) <= abs(alpha) * mass(t1) + abs(beta) * mass(t2)


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), max_size=6))
def test_clamp_idempotent_and_lipschitz(points):
    raw = [(p, 1) for p in points]
    once = clamp(raw)
    assert clamp(once) == once
    for (p, _), (q, _) in zip(raw, once):
        assert all(-1 <= c <= 1 for c in q)
    for (p1, _), (q1, _) in zip(raw, once):
        for (p2, _), (q2, _) in zip(raw, once):
            assert all(abs(a - b) <= abs(c - d) + 1e-15 for a, b, c, d in zip(q1, q2, p1, p2))


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(-3, 3)), max_size=6))
def test_boundary_is_always_a_cycle(triples):
    segs = [((F(a, 4),), (F(b, 4),), c) for a, b, c in triples if a != b]
    s = make_chain(1, segs, RATIONAL)
    assert chi(boundary(s)) == 0


def test_float_mode_boundary():
    s = make_chain(2, [((0.1, 0.2), (0.3, -0.4), 0.7)], FLOAT)
    b = boundary(s)
    assert b.mode == FLOAT and abs(chi(b)) == 0

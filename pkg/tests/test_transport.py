from fractions import Fraction as F
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import cycle_pairs, lp_w1, rational_cycles
from flatcycle.cycles import FLOAT, RATIONAL, boundary, combine, cone, dist, make_cycle
from flatcycle.errors import ChiNonZero, DimensionMismatch, SolverStall
from flatcycle.generators import random_cycle
from flatcycle.transport import (
    TransportSolution,
    certify,
    gnorm,
    gnorm_1d,
    isoperimetric_check,
    plan_to_chain,
    solve_transport,
)


def test_dipole_value_and_potential():
    a, b = (F(-1, 2), F(1, 4)), (F(1, 2), F(-1, 2))
    t = make_cycle(2, [(b, 1), (a, -1)], RATIONAL)
    sol = gnorm(t)
    assert sol.value == pytest.approx(dist(a, b), rel=1e-15)
    # u(x) = <x, (b - a)/|b - a|> up to an additive constant
    d = np.subtract([float(c) for c in b], [float(c) for c in a])
    d /= np.linalg.norm(d)
    diff = sol.potentials[b] - sol.potentials[a]
    assert diff == pytest.approx(float(np.dot([float(c) for c in b], d) - np.dot([float(c) for c in a], d)))


def test_three_point_example_value():
    t = make_cycle(1, [((1,), 2), ((0,), -1), ((-1,), -1)], RATIONAL)
    sol = gnorm(t)
    # both unit sources must travel to the single sink: 1 * 1 + 1 * 2
    assert sol.value == 3 == lp_w1(t) == gnorm_1d(t)
    assert sol.gap <= 1e-12


def test_zero_cycle():
    sol = gnorm(make_cycle(2, []))
    assert sol.value == 0 and sol.plan == []


def test_one_signed_measure_rejected():
    from flatcycle.cycles import ZeroCycle

    bad = ZeroCycle(1, (((0.5,), 1.0),), FLOAT)
    with pytest.raises(ChiNonZero):
        gnorm(bad)


def test_certify_valid_and_injected_faults():
    t = random_cycle(2, 10, seed=3, mode=RATIONAL)
    sol = gnorm(t)
    rep = certify(t, sol)
    assert rep.passed
    assert all(c.residual <= 1e-12 for c in rep.checks if c.name in ("lipschitz", "marginals"))
    s, d, f = sol.plan[0]
    bumped = TransportSolution(sol.value, [(s, d, f + F(1, 10))] + sol.plan[1:], sol.potentials, sol.gap, sol.dual_value, sol.n, sol.mode)
    assert not certify(t, bumped)["marginals"].passed
    scaled = TransportSolution(sol.value, sol.plan, {p: 2 * v for p, v in sol.potentials.items()}, sol.gap, sol.dual_value, sol.n, sol.mode)
    assert not certify(t, scaled)["lipschitz"].passed


def test_gnorm_1d_examples():
    assert gnorm_1d(make_cycle(1, [((1,), 1), ((-1,), -1)], RATIONAL)) == 2
    t = make_cycle(1, [((-1,), 1), ((0,), -2), ((1,), 1)], RATIONAL)
    assert gnorm_1d(t) == 2 == lp_w1(t)
    assert gnorm_1d(make_cycle(1, [((1,), 2), ((0,), -1), ((-1,), -1)], RATIONAL)) == 3


def test_gnorm_1d_needs_line():
    with pytest.raises(DimensionMismatch):
        gnorm_1d(make_cycle(2, []))


def test_isoperimetric_examples():
    x = (F(1, 2), F(1, 3))
    g, bound, ok = isoperimetric_check(make_cycle(2, [(x, 1), ((0, 0), -1)], RATIONAL), (0, 0))
    assert ok and g == pytest.approx(dist(x, (0, 0))) and bound == pytest.approx(2 * g)
    assert isoperimetric_check(make_cycle(2, []), (0, 0)) == (0.0, 0.0, True)
    t = random_cycle(3, 10, seed=8)
    g, bound, ok = isoperimetric_check(t, (0, 0, 0))
    assert ok and g == pytest.approx(lp_w1(t), rel=1e-9)


def test_plan_to_chain_examples():
    t = make_cycle(1, [((F(1, 2),), 1), ((0,), -1)], RATIONAL)
    s = plan_to_chain(gnorm(t))
    assert len(s) == 1 and boundary(s) == t
    assert len(plan_to_chain(gnorm(make_cycle(1, [])))) == 0
    t = make_cycle(2, [((1, 0), 1), ((0, 1), 1), ((-1, 0), -1), ((0, -1), -1)], RATIONAL)
    sol = gnorm(t)
    s = plan_to_chain(sol)
    assert len(s) <= 4 and boundary(s) == t and s.mass == pytest.approx(sol.value)


def test_iteration_cap_raises_stall():
    t = random_cycle(2, 30, seed=1)
    with pytest.raises(SolverStall):
        gnorm(t, max_iter=0)


def test_degenerate_problem_terminates():
    # equal masses on a symmetric configuration produce many degenerate pivots
    pts = [(math.cos(2 * math.pi * i / 12) * 0.9, math.sin(2 * math.pi * i / 12) * 0.9) for i in range(12)]
    t = make_cycle(2, [(p, 1 if i % 2 else -1) for i, p in enumerate(pts)])
    sol = gnorm(t)
    assert certify(t, sol).passed
    assert sol.value == pytest.approx(lp_w1(t), rel=1e-9)


def test_solve_transport_direct():
    flows, u, v, _ = solve_transport([F(1), F(2)], [F(2), F(1)], np.array([[1.0, 2.0], [3.0, 1.0]]))
    assert sum(flows.values()) == 3
    assert all(isinstance(f, F) for f in flows.values())


@given(rational_cycles(max_atoms=10))
def test_matches_independent_lp(t):
    sol = gnorm(t)
    assert sol.value == pytest.approx(lp_w1(t), rel=1e-9, abs=1e-12)
    assert certify(t, sol).passed


@given(cycle_pairs())
def test_triangle_inequality(pair):
    t1, t2 = pair
    assert gnorm(combine(1, t1, 1, t2)).value <= gnorm(t1).value + gnorm(t2).value + 1e-9


@given(rational_cycles(), st.integers(-5, 5).filter(bool), st.integers(1, 4))
def test_homogeneity(t, num, den):
    lam = F(num, den)
    sol = gnorm(combine(lam, t, 0, t))
    assert sol.value == pytest.approx(abs(float(lam)) * gnorm(t).value, rel=1e-12, abs=1e-15)
    # the plan flows scale exactly
    assert sum(f for _, _, f in sol.plan) == abs(lam) * sum(f for _, _, f in gnorm(t).plan)


@given(rational_cycles(n=1, max_atoms=12))
def test_line_agreement(t):
    assert abs(gnorm(t).value - float(gnorm_1d(t))) <= 1e-12


@given(rational_cycles(), st.tuples(*[st.integers(-2, 2).map(lambda i: F(i, 2))] * 3))
def test_cone_is_a_competitor(t, apex):
    assert gnorm(t).value <= cone(t, apex[: t.n]).mass + 1e-12


@given(rational_cycles(max_atoms=10))
def test_weak_duality(t):
    sol = gnorm(t)
    assert sol.dual_value <= sol.value + 1e-12
    assert sol.gap <= 1e-9 * max(1.0, sol.value)
    assert boundary(plan_to_chain(sol)) == t

from __future__ import annotations

import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from flatcycle.cycles import RATIONAL, dist, make_cycle

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def coords(denom: int = 8):
    return st.integers(-denom, denom).map(lambda i: Fraction(i, denom))


@st.composite
def rational_cycles(draw, n=None, max_atoms: int = 8, min_atoms: int = 0):
    n = draw(st.integers(1, 3)) if n is None else n
    size = draw(st.integers(min_atoms, max_atoms))
    pts = draw(st.lists(st.tuples(*[coords()] * n), min_size=size, max_size=size, unique=True))
    if len(pts) < 2:
        return make_cycle(n, (), RATIONAL)
    ws = draw(st.lists(st.integers(-12, 12).map(lambda j: Fraction(j, 6)), min_size=len(pts) - 1, max_size=len(pts) - 1))
    ws.append(-sum(ws, Fraction(0)))
    return make_cycle(n, list(zip(pts, ws)), RATIONAL)


@st.composite
def cycle_pairs(draw, max_atoms: int = 6):
    n = draw(st.integers(1, 3))
    return draw(rational_cycles(n=n, max_atoms=max_atoms)), draw(rational_cycles(n=n, max_atoms=max_atoms))


def lp_w1(t, metric=dist) -> float:
    """Flat norm by a dense transportation LP in scipy: an oracle independent of the in-repo simplex."""
    src = [(p, -float(w)) for p, w in t.atoms if w < 0]
    snk = [(p, float(w)) for p, w in t.atoms if w > 0]
    if not src:
        return 0.0
    m, n = len(src), len(snk)
    cost = np.array([[metric(a, b) for b, _ in snk] for a, _ in src]).ravel()
    a_eq = []
    b_eq = []
    for i in range(m):
        row = np.zeros(m * n)
        row[i * n : (i + 1) * n] = 1
        a_eq.append(row)
        b_eq.append(src[i][1])
    for j in range(n):
        row = np.zeros(m * n)
        row[j::n] = 1
        a_eq.append(row)
        b_eq.append(snk[j][1])
    res = linprog(cost, A_eq=np.array(a_eq), b_eq=b_eq, bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)

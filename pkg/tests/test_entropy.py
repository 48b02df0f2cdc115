from fractions import Fraction as F
import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatcycle.entropy import (
    BoundednessCertificate,
    CountInstance,
    card_pnk,
    count_bruteforce,
    count_exact,
    count_upper,
    covering_bound,
    greedy_net,
    ln_bound_pnk,
    ln_int,
    pnk_params,
)
from flatcycle.cycles import combine
from flatcycle.errors import BadEps, BadParams, SizeOverflow
from flatcycle.generators import dipoles
from flatcycle.quantize import ConstantsTable
from flatcycle.transport import gnorm


def count_by_product(p, q) -> int:
    return sum(1 for f in itertools.product(range(-p, p + 1), repeat=q) if sum(f) == 0 and sum(map(abs, f)) <= p)


@pytest.mark.parametrize("p,q,want", [(1, 1, 1), (2, 2, 3), (4, 2, 5), (3, 3, 7), (6, 3, 37), (20, 5, 35751), (8, 8, 33111)])
def test_count_examples(p, q, want):
    assert count_exact(CountInstance(p, q)).exact == want


@pytest.mark.parametrize("p,q", [(p, q) for p in range(1, 7) for q in range(1, min(p, 4) + 1)])
def test_count_against_product_enumeration(p, q):
    assert count_exact(CountInstance(p, q)).exact == count_by_product(p, q)


def test_bruteforce_sweep():
    pairs = [(p, q) for p in range(1, 9) for q in range(1, p + 1)] + [(10, 3), (12, 4)]
    for p, q in pairs:
        inst = CountInstance(p, q)
        assert count_bruteforce(inst).exact == count_exact(inst).exact


def test_bad_instances():
    for p, q in ((0, 0), (2, 3), (3, 0), (2.0, 1)):
        with pytest.raises(BadParams):
            CountInstance(p, q)


def test_caps_raise():
    with pytest.raises(SizeOverflow):
        count_exact(CountInstance(10_000, 5_000))
    with pytest.raises(SizeOverflow):
        count_bruteforce(CountInstance(30, 10), cap=1000)


@pytest.mark.parametrize("p,q", [(p, q) for p in range(1, 41) for q in range(1, p + 1)][::7])
def test_upper_bounds(p, q):
    inst = CountInstance(p, q)
    exact = count_exact(inst)
    bf, bg = count_upper(inst)
    assert exact.exact <= bf
    assert exact.ln_value <= bg


def test_ln_int_of_huge_integer():
    x = 7**4000
    assert ln_int(x) == pytest.approx(4000 * math.log(7), rel=1e-14)
    with pytest.raises(ValueError):
        ln_int(0)


def test_pnk_matches_class_size():
    assert pnk_params(1, 1) == CountInstance(6, 3)
    assert card_pnk(1, 1).result.exact == 37
    assert card_pnk(1, 2).result.exact == 35751


@pytest.mark.parametrize("n,k", [(1, k) for k in range(1, 6)] + [(2, 1), (2, 2), (2, 3), (3, 1)])
def test_card_pnk_log_bound(n, k):
    res = card_pnk(n, k)
    assert res.holds
    assert res.ln_bound == pytest.approx((2 * k + 1) ** n * math.log(22 * n * k))


def test_card_pnk_oversized():
    with pytest.raises(SizeOverflow):
        card_pnk(4, 6, term_cap=1000)
    res = card_pnk(4, 6, term_cap=1000, strict=False)
    assert res.result is None and res.holds is None
    assert res.ln_bound == ln_bound_pnk(4, 6)


def test_covering_bound_example():
    k, ln_n = covering_bound(1, BoundednessCertificate.constant(F(1)), F(1))
    # c_cond(1) = 4: need 4 < k / 6
    assert k == 25
    assert ln_n == pytest.approx(51 * math.log(550))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_covering_bound_tiny_gamma(n):
    k, ln_n = covering_bound(n, BoundednessCertificate.constant(F(1, 10**12)), F(1))
    assert k == 1
    assert ln_n == pytest.approx(3**n * math.log(22 * n))


def test_covering_bound_is_strict():
    # Gamma chosen so that c_cond Gamma equals 25 eps / 6 exactly
    gamma = F(25, 24)
    k, _ = covering_bound(1, BoundednessCertificate.constant(gamma), F(1))
    assert ConstantsTable(1).c_cond * gamma == F(k - 1, 6)


@given(st.fractions(F(1, 100), 5), st.fractions(F(1, 100), 5), st.fractions(F(1, 50), 1))
def test_covering_bound_monotone(g1, g2, eps):
    lo, hi = sorted((g1, g2))
    assert covering_bound(2, BoundednessCertificate.constant(lo), eps)[0] <= covering_bound(2, BoundednessCertificate.constant(hi), eps)[0]
    assert covering_bound(2, BoundednessCertificate.constant(lo), eps)[0] <= covering_bound(2, BoundednessCertificate.constant(lo), eps / 2)[0]


def test_certificate_table():
    cert = BoundednessCertificate(F(2), ((F(1, 10), F(3)), (F(1, 2), F(1))))
    assert cert.kappa_at(F(1, 8)) == 3
    assert cert.kappa_at(F(1)) == 1
    with pytest.raises(BadParams):
        cert.kappa_at(F(1, 20))
    with pytest.raises(BadParams):
        BoundednessCertificate(F(2), ((F(1, 10), F(1)), (F(1, 2), F(3))))
    with pytest.raises(BadParams):
        BoundednessCertificate(0)
    with pytest.raises(BadEps):
        covering_bound(1, cert, F(2))


def test_greedy_net_is_separated():
    family = dipoles(2, 40, seed=5)
    net = greedy_net(family, 0.3)
    assert 1 <= len(net) <= len(family)
    for a, b in itertools.combinations(net, 2):
        assert gnorm(combine(1, a, -1, b)).value >= 0.3 - 1e-9


def test_greedy_net_respects_covering_bound():
    family = dipoles(1, 30, seed=1)
    gamma = max(gnorm(t).value for t in family)
    net = greedy_net(family, 0.5, BoundednessCertificate.constant(gamma))
    assert len(net) >= 2


def test_greedy_net_large_eps_keeps_one():
    family = dipoles(1, 10, seed=2)
    assert len(greedy_net(family, 10.0)) == 1
    assert greedy_net([], 0.5) == []

"""Exact counting of bounded zero-sum lattice vectors and entropy bounds.

``E(p, q)`` is the set of integer vectors ``f`` of length ``q`` with
``sum f = 0`` and ``sum |f| <= p``.  Its cardinality has the closed form

    c(p, q) = 1 + sum_{r=1}^{q-1} C(q, r) sum_{s >= r, 2s <= p} C(s-1, r-1) C(q-r+s-1, s)

(``r`` positive entries carrying total ``s``, balanced by negative entries
on the remaining ``q - r`` slots) and the upper bounds
``c(p, q) <= 2^q (p+q)^q / q!`` and ``ln c(p, q) <= q ln(11 p / q)``.
A quantized class on the grid of step ``1/k`` in dimension ``n`` is exactly
``E(2nk(2k+1)^n, (2k+1)^n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .cycles import combine
from .errors import BadEps, BadParams, SizeOverflow
from .quantize import ConstantsTable
from .transport import DEFAULT_TOL, gnorm

DEFAULT_NODE_CAP = 50_000_000
#: the double sum of the closed form has about q * p / 2 terms
DEFAULT_TERM_CAP = 10_000_000


@dataclass(frozen=True)
class CountInstance:
    p: int
    q: int

    def __post_init__(self):
        if not (isinstance(self.p, int) and isinstance(self.q, int)) or not 1 <= self.q <= self.p:
            raise BadParams(f"need integers 1 <= q <= p, got p={self.p!r}, q={self.q!r}")


@dataclass(frozen=True)
class CountResult:
    exact: int
    ln_value: float


def ln_int(x: int) -> float:
    """Natural log of a positive integer of any size (``math.log`` handles big ints)."""
    if x <= 0:
        raise ValueError("ln_int needs a positive integer")
    return math.log(x)


def count_exact(inst: CountInstance, term_cap: int = DEFAULT_TERM_CAP) -> CountResult:
    p, q = inst.p, inst.q
    if (q * (p // 2 + 1)) > term_cap:
        raise SizeOverflow(f"about {q * (p // 2 + 1)} terms exceed the cap of {term_cap}")
    total = 1
    for r in range(1, q):
        inner = 0
        # a = C(s-1, r-1), b = C(q-r+s-1, s), advanced by exact ratios in s
        a, b = 1, comb(q - 1, r)
        for s in range(r, p // 2 + 1):
            inner += a * b
            a = a * s // (s - r + 1)
            b = b * (q - r + s) // (s + 1)
        total += comb(q, r) * inner
    return CountResult(total, ln_int(total))


def count_bruteforce(inst: CountInstance, cap: int = DEFAULT_NODE_CAP) -> CountResult:
    """Enumerate ``E(p, q)`` coordinate by coordinate.

    Branches that can no longer return to zero sum within the mass budget
    are cut, and the last coordinate is forced by ``sum f = 0``.  ``cap``
    bounds the number of visited search nodes.
    """
    p, q = inst.p, inst.q
    visited = 0
    count = 0
    # stack of (position, mass used, running sum)
    stack = [(0, 0, 0)]
    while stack:
        pos, used, total = stack.pop()
        visited += 1
        if visited > cap:
            raise SizeOverflow(f"brute-force search for E({p},{q}) exceeded {cap} nodes")
        if pos == q - 1:
            if used + abs(total) <= p:
                count += 1
            continue
        room = p - used
        for v in range(-room, room + 1):
            left = room - abs(v)
            if abs(total + v) <= left:
                stack.append((pos + 1, used + abs(v), total + v))
    return CountResult(count, ln_int(count))


def count_upper(inst: CountInstance, check: bool = True):
    """Return ``(bound_F, bound_G_ln)``: ``2^q (p+q)^q / q!`` exactly and ``q ln(11 p / q)``."""
    p, q = inst.p, inst.q
    bound_f = Fraction(2**q * (p + q) ** q, math.factorial(q))
    bound_g_ln = q * math.log(11 * p / q)
    if check:
        c = count_exact(inst)
        if c.exact > bound_f or c.ln_value > bound_g_ln:
            raise AssertionError(f"counting bound violated at p={p}, q={q}")
    return bound_f, bound_g_ln


def pnk_params(n: int, k: int) -> CountInstance:
    q = (2 * k + 1) ** n
    return CountInstance(2 * n * k * q, q)


def ln_bound_pnk(n: int, k: int) -> float:
    """``(2k+1)^n ln(22 n k)``."""
    return (2 * k + 1) ** n * math.log(22 * n * k)


@dataclass(frozen=True)
class PnkCount:
    n: int
    k: int
    result: CountResult | None
    ln_bound: float

    @property
    def holds(self) -> bool | None:
        return None if self.result is None else self.result.ln_value <= self.ln_bound


def card_pnk(n: int, k: int, term_cap: int = DEFAULT_TERM_CAP, strict: bool = True) -> PnkCount:
    """Cardinality of the quantized class for grid step ``1/k`` (independent of eps).

    With ``strict=False`` an oversized instance returns ``result=None``
    together with the log bound instead of raising :class:`SizeOverflow`.
    """
    bound = ln_bound_pnk(n, k)
    try:
        res = count_exact(pnk_params(n, k), term_cap)
    except SizeOverflow:
        if strict:
            raise
        return PnkCount(n, k, None, bound)
    return PnkCount(n, k, res, bound)


@dataclass
class BoundednessCertificate:
    """A uniform bound ``Gamma`` on G and a tabulated non-increasing kappa bound.

    ``table`` holds ``(eps, bound)`` pairs.  Between tabulated scales the
    bound is taken from the largest tabulated ``eps' <= eps`` (valid for a
    non-increasing function); below the smallest scale it is unknown.
    """

    Gamma: float
    table: tuple = ()

    def __post_init__(self):
        if not self.Gamma > 0:
            raise BadParams("Gamma must be positive")
        self.table = tuple(sorted((e, v) for e, v in self.table))
        for (e1, v1), (e2, v2) in zip(self.table, self.table[1:]):
            if v2 > v1:
                raise BadParams(f"kappa bound increases between eps={e1} and eps={e2}")

    def kappa_at(self, eps):
        best = None
        for e, v in self.table:
            if e <= eps:
                best = v
        if best is None:
            raise BadParams(f"no kappa bound tabulated at or below eps={eps}")
        return best

    @classmethod
    def constant(cls, Gamma, value=0):
        return cls(Gamma, ((0, value),))


def covering_bound(n: int, cert: BoundednessCertificate, eps):
    """Least k with ``c_cond(n) (Gamma + kappa(eps/6)) < k eps/6`` and ``ln N = (2k+1)^n ln(22nk)``."""
    if not 0 < eps <= 1:
        raise BadEps(f"eps must lie in (0, 1], got {eps!r}")
    c_cond = ConstantsTable(n).c_cond
    exact = all(isinstance(x, (int, Fraction)) for x in (cert.Gamma, cert.kappa_at(eps / 6), eps))
    if exact:
        lhs = c_cond * (Fraction(cert.Gamma) + Fraction(cert.kappa_at(Fraction(eps) / 6)))
        step = Fraction(eps) / 6
    else:
        lhs = c_cond * (float(cert.Gamma) + float(cert.kappa_at(eps / 6)))
        step = float(eps) / 6
    k = max(1, math.floor(lhs / step) + 1)
    while not lhs < k * step:
        k += 1
    return k, ln_bound_pnk(n, k)


def greedy_net(family, eps, cert: BoundednessCertificate | None = None, tol: float = DEFAULT_TOL) -> list:
    """Greedy eps-separated subfamily under the G-metric.

    A cycle is kept when the certified dual lower bound on its distance to
    every kept cycle is at least ``eps``.  With a certificate, the size of
    the net is checked against the covering bound.
    """
    kept = []
    for t in family:
        ok = True
        for s in kept:
            sol = gnorm(combine(1, t, -1, s), tol)
            if sol.dual_value < eps:
                ok = False
                break
        if ok:
            kept.append(t)
    if cert is not None and kept:
        _, ln_n = covering_bound(kept[0].n, cert, eps)
        if math.log(len(kept)) > ln_n:
            raise AssertionError(f"net of size {len(kept)} exceeds the covering bound exp({ln_n})")
    return kept

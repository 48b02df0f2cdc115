"""Quantized grid cycles and the T -> P quantization pipeline.

A member of the class ``P(n, k, eps)`` lives on the grid of step ``1/k``,
has every weight in ``eps_hat * Z`` with ``eps_hat = eps / (2n (2k+1)^n)``,
sums to zero and has mass at most ``k * eps``.  Weights are stored as
integer multiples ``m`` of ``eps_hat``; the mass cap is then the integer
bound ``sum |m| <= 2 n k (2k+1)^n``, which does not depend on ``eps``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cycles import FLOAT, RATIONAL, ZeroCycle, combine, make_cycle
from .errors import BadEps, DimensionMismatch, MembershipFail
from .grid import GridCycle, GridSpec, fill_constant, grid_edges, grid_indices, make_grid_cycle, snap
from .kappa import KappaEstimate, kappa
from .report import Report
from .transport import DEFAULT_TOL, gnorm


def _as_eps(eps):
    if isinstance(eps, str):
        eps = Fraction(eps)
    if isinstance(eps, float):
        if not math.isfinite(eps):
            raise BadEps(f"eps must be finite, got {eps!r}")
        eps = Fraction(eps)
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise BadEps(f"eps must lie in (0, 1], got {eps}")
    return eps


def eps_hat(n: int, k: int, eps) -> Fraction:
    """Lattice step ``eps / (2n (2k+1)^n)``, exact."""
    return _as_eps(eps) / (2 * n * (2 * k + 1) ** n)


@dataclass(frozen=True)
class ConstantsTable:
    n: int

    @property
    def c_def(self) -> int:
        return 2 * self.n**4

    @property
    def c_cond(self) -> int:
        return 4 * self.n**4

    @property
    def c_fill(self) -> float:
        return fill_constant(self.n)

    @property
    def c_sep(self) -> float:
        return 1.0 / (2 * self.n * 3**self.n * self.c_fill)


@dataclass(frozen=True)
class QuantLattice:
    n: int
    k: int
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", _as_eps(self.eps))
        if self.n < 1 or self.k < 1:
            raise ValueError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")

    @property
    def eps_hat(self) -> Fraction:
        return self.eps / (2 * self.n * (2 * self.k + 1) ** self.n)

    @property
    def spec(self) -> GridSpec:
        return GridSpec(self.n, self.k)

    @property
    def mass_cap(self) -> int:
        """Largest admissible ``sum |m|``: ``k eps / eps_hat``."""
        return 2 * self.n * self.k * (2 * self.k + 1) ** self.n

    @property
    def separation(self) -> float:
        """Lower bound on G(P1 - P2) for distinct members."""
        return float(self.eps) * ConstantsTable(self.n).c_sep / self.k ** (3 * self.n)


@dataclass(frozen=True)
class QuantizedCycle:
    """Grid cycle with weights ``m * eps_hat``; ``m`` is a sorted tuple of ``(index, int)``."""

    lattice: QuantLattice
    m: tuple = ()

    @property
    def chi_m(self) -> int:
        return sum(v for _, v in self.m)

    @property
    def mass_m(self) -> int:
        return sum(abs(v) for _, v in self.m)

    @property
    def mass(self) -> Fraction:
        return self.mass_m * self.lattice.eps_hat

    @property
    def is_member(self) -> bool:
        return self.chi_m == 0 and self.mass_m <= self.lattice.mass_cap

    def weights(self) -> dict:
        h = self.lattice.eps_hat
        return {i: v * h for i, v in self.m}

    def to_grid_cycle(self) -> GridCycle:
        return make_grid_cycle(self.lattice.spec, self.weights(), mode=RATIONAL, check_chi=False)

    def to_cycle(self, mode: str = RATIONAL) -> ZeroCycle:
        spec = self.lattice.spec
        return make_cycle(self.lattice.n, [(spec.point(i, mode), w) for i, w in self.weights().items()], mode=mode)

    def __len__(self) -> int:
        return len(self.m)


def make_quantized(lattice: QuantLattice, m) -> QuantizedCycle:
    items = m.items() if hasattr(m, "items") else m
    acc = {}
    for idx, v in items:
        idx = tuple(int(i) for i in idx)
        if not lattice.spec.contains(idx):
            raise DimensionMismatch(f"index {idx} is not a vertex of the grid")
        if int(v) != v:
            raise ValueError(f"multiplicity {v!r} is not an integer")
        acc[idx] = acc.get(idx, 0) + int(v)
    return QuantizedCycle(lattice, tuple(sorted((i, v) for i, v in acc.items() if v)))


def _round_half_to_zero(q: Fraction) -> int:
    r = math.ceil(abs(q) - Fraction(1, 2))
    return r if q >= 0 else -r


def quantize_multiplicities(r, lattice: QuantLattice, x0=None) -> QuantizedCycle:
    """Round every weight of ``r`` to the nearest lattice multiple, then fix chi at ``x0``.

    ``r`` is a :class:`GridCycle` (any total weight) or a mapping
    ``index -> weight``.  Rounding ties go toward zero.  ``x0`` defaults to
    the lexicographically smallest occupied index; the correction subtracts
    the integer total from the multiplicity there, so the result sums to
    zero exactly.
    """
    items = r.theta if isinstance(r, GridCycle) else tuple(sorted(r.items()))
    h = lattice.eps_hat
    m = {}
    for idx, w in items:
        q = Fraction(w) / h
        v = _round_half_to_zero(q)
        if v:
            m[tuple(idx)] = v
    if x0 is None:
        x0 = min((tuple(i) for i, _ in items), default=None)
    total = sum(m.values())
    if total and x0 is not None:
        x0 = tuple(x0)
        m[x0] = m.get(x0, 0) - total
    return make_quantized(lattice, m)


def rounding_report(r, p: QuantizedCycle) -> Report:
    """Exact rounding bounds: per-step mass ``<= eps/(2n)`` and ``M(P - R) <= eps/n`` when chi(R) = 0."""
    lat = p.lattice
    items = dict(r.theta if isinstance(r, GridCycle) else r)
    pw = p.weights()
    keys = set(items) | set(pw)
    diff = sum((abs(Fraction(pw.get(i, 0)) - Fraction(items.get(i, 0))) for i in keys), Fraction(0))
    chi_r = sum((Fraction(w) for w in items.values()), Fraction(0))
    rep = Report("rounding")
    rep.add("chi_zero", p.chi_m == 0)
    rep.leq("mass_P_minus_R", diff, lat.eps / lat.n + abs(chi_r), 0.0)
    rep.values.update({"mass_diff": diff, "chi_R": chi_r})
    return rep


def as_quantized(t: ZeroCycle, lattice: QuantLattice):
    """The quantized cycle equal to ``t`` if ``t`` already is a class member, else None."""
    if t.n != lattice.n:
        return None
    h, k = lattice.eps_hat, lattice.k
    m = {}
    for p, w in t.atoms:
        idx = []
        for c in p:
            ci = Fraction(c) * k
            if ci.denominator != 1:
                return None
            idx.append(int(ci))
        q = Fraction(w) / h
        if q.denominator != 1:
            return None
        m[tuple(idx)] = int(q)
    cand = make_quantized(lattice, m)
    return cand if cand.is_member else None


def check_condition_A(t: ZeroCycle, k: int, eps, kappa_value, g_value=None) -> bool:
    """``c_cond(n) (G(T) + kappa) < k eps``."""
    g = gnorm(t).value if g_value is None else g_value
    return ConstantsTable(t.n).c_cond * (g + float(kappa_value)) < k * float(eps)


def minimal_k(t: ZeroCycle, eps, kappa_value, g_value=None) -> int:
    """Least positive k satisfying condition A (strict)."""
    g = gnorm(t).value if g_value is None else g_value
    lhs = ConstantsTable(t.n).c_cond * (g + float(kappa_value))
    k = max(1, math.floor(lhs / float(eps)) + 1)
    while not lhs < k * float(eps):
        k += 1
    return k


@dataclass
class DeformResult:
    P: QuantizedCycle
    error: float
    member: bool
    condition_A: bool
    stages: dict = field(default_factory=dict)
    kappa: KappaEstimate | None = None

    @property
    def stage_bound(self) -> float:
        return math.fsum(self.stages.get(s, 0.0) for s in ("reduce", "snap", "round"))


def deform(t: ZeroCycle, k: int, eps, tol: float = DEFAULT_TOL, strict: bool = False) -> DeformResult:
    """Quantize ``t`` into the class ``P(n, k, eps)`` with G(T - P) < 3 eps under condition A.

    Stages: replace T by a mass-reduced cycle within G-distance eps (the
    kappa witness), snap that to the grid and round its weights into the
    lattice.  ``error`` is a certified value of G(T - P); ``stages`` holds
    the per-stage bounds whose sum also controls it.  A failed membership
    is reported through ``member`` or, with ``strict=True``, raised.
    """
    lattice = QuantLattice(t.n, k, eps)
    eps_f = float(lattice.eps)
    g = gnorm(t, tol).value
    est = kappa(t, eps_f, tol=tol)
    cond = check_condition_A(t, k, eps_f, est.value, g_value=g)
    same = as_quantized(t, lattice)
    if same is not None:
        return DeformResult(same, 0.0, True, cond, {"reduce": 0.0, "snap": 0.0, "round": 0.0}, est)

    t_hat = est.witness
    spec = lattice.spec
    r, snap_bound = snap(t_hat, spec)
    p = quantize_multiplicities(r, lattice)

    p_cyc = p.to_cycle(FLOAT)
    round_mass = math.fsum(abs(float(p.weights().get(i, 0)) - float(dict(r.theta).get(i, 0))) for i in set(p.weights()) | set(dict(r.theta)))
    stages = {
        "reduce": est.distance,
        "snap": snap_bound,
        # grid cycles satisfy G <= sqrt(n) M
        "round": math.sqrt(t.n) * round_mass,
        "round_mass": round_mass,
        "mass_reduced": est.value,
    }
    error = gnorm(combine(1, t, -1, p_cyc), tol).value
    member = p.is_member
    if strict and not member:
        raise MembershipFail(f"mass {float(p.mass)} exceeds k*eps = {k * eps_f}")
    return DeformResult(p, error, member, cond, stages, est)


def check_B_implies_C(t: ZeroCycle, k: int, eps, p: QuantizedCycle | None = None, tol: float = DEFAULT_TOL) -> Report:
    """Evaluate the consequence of having a class member within 3 eps of T.

    If ``G(T - P) < 3 eps`` for some member ``P`` then
    ``G(T) < (sqrt(n) + 3) k eps`` and ``kappa(T, 3 eps) <= M(P) <= k eps``,
    hence ``G(T) + kappa(T, 3 eps) < (sqrt(n) + 4) k eps``; that is the
    ``holds`` check.  The stronger form ``(sqrt(n) + 4)(G + kappa) < k eps``
    is reported as ``strong_form`` for information only: it is false in
    general (a half dipole across the line at k = 1 is a counterexample).
    """
    eps_f = float(_as_eps(eps))
    n = t.n
    rep = Report("B_implies_C")
    g = gnorm(t, tol).value
    kap = kappa(t, 3 * eps_f, tol=tol).value
    if p is not None:
        dist_tp = gnorm(combine(1, t, -1, p.to_cycle(FLOAT)), tol).value
        rep.leq("premise_G_T_minus_P_lt_3eps", dist_tp, 3 * eps_f, 0.0)
        rep.add("premise_member", p.is_member)
        rep.leq("kappa_3eps_le_mass_P", kap, float(p.mass), 1e-9 * max(1.0, float(p.mass)))
        rep.values["G_T_minus_P"] = dist_tp
    lhs = g + kap
    rhs = (math.sqrt(n) + 4) * k * eps_f
    rep.add("holds", lhs < rhs, lhs - rhs, 0.0, f"G + kappa(T,3eps) = {lhs!r} < (sqrt n + 4) k eps = {rhs!r}")
    strong = (math.sqrt(n) + 4) * lhs < k * eps_f
    rep.values.update({"G": g, "kappa_3eps": kap, "lhs": lhs, "rhs": rhs, "strong_form": strong, "boundary_margin": rhs - lhs})
    return rep


def _sample_member(lattice: QuantLattice, rng: random.Random, max_atoms: int | None = None) -> QuantizedCycle:
    idx = grid_indices(lattice.spec)
    cap = lattice.mass_cap
    top = max_atoms or min(len(idx), 6)
    while True:
        s = rng.randint(2, max(2, min(top, len(idx))))
        chosen = sorted(rng.sample(idx, s))
        bound = max(1, cap // s)
        m = {i: rng.randint(-bound, bound) for i in chosen[1:]}
        m[chosen[0]] = -sum(m.values())
        q = make_quantized(lattice, m)
        if q.m and q.is_member:
            return q


def sample_members(lattice: QuantLattice, count: int, seed: int = 0, max_atoms: int | None = None) -> list:
    """Random nonzero class members by rejection under the mass cap."""
    rng = random.Random(seed)
    return [_sample_member(lattice, rng, max_atoms) for _ in range(count)]


def verify_class_geometry(lattice: QuantLattice, samples: int = 50, pairs: int = 200, seed: int = 0, tol: float = DEFAULT_TOL) -> Report:
    """Mass cap, G <= sqrt(n) k eps and pairwise separation on sampled members."""
    rep = Report("class_geometry")
    n, k = lattice.n, lattice.k
    eps = lattice.eps
    rng = random.Random(seed)
    members = [_sample_member(lattice, rng) for _ in range(samples)]
    worst_mass = max((m.mass - k * eps for m in members), default=Fraction(-1))
    rep.add("mass_cap", worst_mass <= 0, float(worst_mass), 0.0, "M(P) <= k eps, exact")
    g_bound = math.sqrt(n) * k * float(eps)
    worst_g = max((gnorm(m.to_cycle(), tol).value - g_bound for m in members), default=-g_bound)
    rep.add("G_bound", worst_g <= 1e-9, worst_g, 1e-9, "G(P) <= sqrt(n) k eps")

    sep = lattice.separation
    h = lattice.eps_hat
    zero = make_quantized(lattice, {})
    test_pairs = []
    # the smallest differences: one lattice step moved across one grid edge
    for a, b in grid_edges(lattice.spec)[:20]:
        test_pairs.append((zero, make_quantized(lattice, {a: 1, b: -1})))
    while len(test_pairs) < pairs + min(20, lattice.spec.num_edges):
        p1 = _sample_member(lattice, rng)
        if rng.random() < 0.5:
            # a near neighbour of p1 differing by a single lattice step
            i, j = rng.sample(grid_indices(lattice.spec), 2)
            d = dict(p1.m)
            d[i] = d.get(i, 0) + 1
            d[j] = d.get(j, 0) - 1
            p2 = make_quantized(lattice, d)
            if not p2.is_member:
                continue
        else:
            p2 = _sample_member(lattice, rng)
        if p1.m != p2.m:
            test_pairs.append((p1, p2))
    worst = math.inf
    for p1, p2 in test_pairs:
        g = gnorm(combine(1, p1.to_cycle(), -1, p2.to_cycle()), tol).value
        worst = min(worst, g)
    rep.add("separation", worst >= sep - 1e-9, sep - worst, 1e-9, f"min G(P1-P2) = {worst!r} >= {sep!r}")
    rep.values.update({"eps_hat": h, "separation_bound": sep, "min_pair_distance": worst, "pairs": len(test_pairs), "samples": samples})
    return rep


def iter_class(lattice: QuantLattice):
    """Every member's multiplicity vector over the grid, in lexicographic order.

    Yields tuples of length ``(2k+1)^n`` aligned with :func:`grid_indices`.
    """
    q = lattice.spec.num_points
    cap = lattice.mass_cap

    def rec(prefix: list, used: int, total: int):
        pos = len(prefix)
        if pos == q - 1:
            last = -total
            if used + abs(last) <= cap:
                yield tuple(prefix) + (last,)
            return
        room = cap - used
        for v in range(-room, room + 1):
            # the remaining coordinates must be able to cancel the running total
            if abs(total + v) <= cap - used - abs(v):
                prefix.append(v)
                yield from rec(prefix, used + abs(v), total + v)
                prefix.pop()

    if q == 1:
        yield (0,)
        return
    yield from rec([], 0, 0)


def enumerate_class(lattice: QuantLattice, as_cycles: bool = False):
    """All members of the class, as multiplicity tuples or :class:`QuantizedCycle` values."""
    idx = grid_indices(lattice.spec)
    for vec in iter_class(lattice):
        if as_cycles:
            yield make_quantized(lattice, {i: v for i, v in zip(idx, vec) if v})
        else:
            yield vec

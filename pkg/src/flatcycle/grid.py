"""Uniform grids on the cube, vertex snapping and the grid mass/norm sandwich.

The grid of step ``1/k`` has vertices ``i/k`` for integer index vectors
``i`` in ``{-k, ..., k}^n``.  For cycles supported on it, mass and flat norm
are comparable::

    G(P) / sqrt(n)  <=  M(P)  <=  c(n) * k^(2n) * G(P)

with ``c(1) = 3`` and ``c(n) = 2 sqrt(2) 5^(n-1) 3^n``.  The right-hand
inequality comes from projecting onto a direction that separates all grid
vertices (:func:`separating_direction`) and filling on the line
(:func:`line_fill`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cycles import (
    FLOAT,
    RATIONAL,
    OneChain,
    Segment,
    ZeroCycle,
    coerce,
    dist,
    make_cycle,
)
from .errors import ChiNonZero, DimensionMismatch, SizeOverflow
from .report import Report
from .transport import DEFAULT_TOL, gnorm

DEFAULT_CAP = 2_000_000


@dataclass(frozen=True)
class GridSpec:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")

    @property
    def eps_k(self) -> Fraction:
        return Fraction(1, self.k)

    @property
    def num_points(self) -> int:
        return (2 * self.k + 1) ** self.n

    @property
    def num_edges(self) -> int:
        return self.n * 2 * self.k * (2 * self.k + 1) ** (self.n - 1)

    def point(self, index, mode: str = RATIONAL) -> tuple:
        if mode == RATIONAL:
            return tuple(Fraction(i, self.k) for i in index)
        return tuple(i / self.k for i in index)

    def contains(self, index) -> bool:
        return len(index) == self.n and all(-self.k <= i <= self.k for i in index)


def _guard(count: int, cap: int) -> None:
    if count > cap:
        raise SizeOverflow(f"{count} items exceed the cap of {cap}")


def grid_indices(spec: GridSpec, cap: int = DEFAULT_CAP) -> list:
    _guard(spec.num_points, cap)
    return list(itertools.product(range(-spec.k, spec.k + 1), repeat=spec.n))


def grid_points(spec: GridSpec, mode: str = RATIONAL, cap: int = DEFAULT_CAP) -> list:
    """All ``(2k+1)^n`` vertices in lexicographic index order."""
    return [spec.point(i, mode) for i in grid_indices(spec, cap)]


def grid_edges(spec: GridSpec, cap: int = DEFAULT_CAP) -> list:
    """Pairs of adjacent vertex indices (differ by one in exactly one coordinate)."""
    _guard(spec.num_edges, cap)
    edges = []
    for idx in grid_indices(spec, cap):
        for axis in range(spec.n):
            if idx[axis] < spec.k:
                nxt = idx[:axis] + (idx[axis] + 1,) + idx[axis + 1 :]
                edges.append((idx, nxt))
    return edges


@dataclass(frozen=True)
class GridCycle:
    """Cycle supported on grid vertices, stored by integer index.

    ``theta`` is a sorted tuple of ``(index, weight)`` pairs without zero
    weights.  Use :func:`make_grid_cycle`.
    """

    spec: GridSpec
    theta: tuple = ()
    mode: str = FLOAT

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def k(self) -> int:
        return self.spec.k

    def as_dict(self) -> dict:
        return dict(self.theta)

    @property
    def mass(self):
        return sum((abs(w) for _, w in self.theta), coerce(0, self.mode))

    @property
    def chi(self):
        return sum((w for _, w in self.theta), coerce(0, self.mode))

    def to_cycle(self) -> ZeroCycle:
        return make_cycle(self.n, [(self.spec.point(i, self.mode), w) for i, w in self.theta], mode=self.mode)

    def __len__(self) -> int:
        return len(self.theta)


def make_grid_cycle(spec: GridSpec, theta, mode: str = FLOAT, check_chi: bool = True) -> GridCycle:
    """Build a grid cycle from a mapping or pairs ``index -> weight``.

    ``check_chi=False`` admits grid measures of non-zero total weight (the
    rounding step of the quantizer starts from such measures).
    """
    items = theta.items() if hasattr(theta, "items") else theta
    acc = {}
    zero = coerce(0, mode)
    for idx, w in items:
        idx = tuple(int(i) for i in idx)
        if not spec.contains(idx):
            raise DimensionMismatch(f"index {idx} is not a vertex of the grid n={spec.n}, k={spec.k}")
        acc[idx] = acc.get(idx, zero) + coerce(w, mode)
    pairs = tuple(sorted((i, w) for i, w in acc.items() if w != 0))
    out = GridCycle(spec, pairs, mode)
    if check_chi:
        total = out.chi
        ok = total == 0 if mode == RATIONAL else abs(total) <= 1e-12 * max(float(out.mass), 1e-300)
        if not ok:
            raise ChiNonZero(f"grid weights sum to {float(total)!r}")
    return out


def _snap_index(x, k: int) -> int:
    # nearest multiple of 1/k, ties toward -infinity
    t = x * k
    if isinstance(t, Fraction):
        i = math.ceil(t - Fraction(1, 2))
    else:
        i = math.ceil(t - 0.5)
    return max(-k, min(k, i))


def snap(t: ZeroCycle, spec: GridSpec):
    """Move every atom to its nearest grid vertex and merge weights.

    Returns ``(grid_cycle, bound)`` where ``bound = sum |theta_i| dist(x_i, snapped x_i)``
    is the cost of transporting every atom to its target, hence an upper
    bound on G(T - snapped).  Ties go toward -infinity per coordinate.
    """
    if t.n != spec.n:
        raise DimensionMismatch(f"cycle in dimension {t.n}, grid in {spec.n}")
    theta = {}
    zero = coerce(0, t.mode)
    moved = []
    for p, w in t.atoms:
        idx = tuple(_snap_index(c, spec.k) for c in p)
        theta[idx] = theta.get(idx, zero) + w
        moved.append(abs(float(w)) * dist(p, spec.point(idx, t.mode)))
    g = make_grid_cycle(spec, theta, mode=t.mode, check_chi=False)
    return g, math.fsum(moved)


def snap_grid(g: GridCycle) -> GridCycle:
    """Snapping a grid cycle onto its own grid is the identity."""
    out, _ = snap(g.to_cycle(), g.spec)
    return out


@dataclass(frozen=True)
class SeparatingDirection:
    u: tuple
    alpha_k: float
    rho: float
    v: tuple = ()


def separating_direction(spec: GridSpec) -> SeparatingDirection:
    """Unit vector whose projection keeps all grid vertices ``rho`` apart.

    For ``n >= 2`` the direction is ``v / |v|`` with ``v_j = alpha^(j-1)`` and
    ``alpha = eps_k / (4 + eps_k)``; then every pair of distinct vertices
    satisfies ``|<x - y, u>| >= eps_k^n / (2 sqrt(2) 5^(n-1))``.  On the line
    the vertices are ``eps_k`` apart and ``u = (1,)``.
    """
    n, eps = spec.n, 1.0 / spec.k
    if n == 1:
        return SeparatingDirection(u=(1.0,), alpha_k=eps / (4 + eps), rho=eps, v=(1.0,))
    alpha = eps / (4 + eps)
    v = np.array([alpha**j for j in range(n)])
    u = v / np.linalg.norm(v)
    rho = eps**n / (2 * math.sqrt(2) * 5 ** (n - 1))
    return SeparatingDirection(u=tuple(u.tolist()), alpha_k=alpha, rho=rho, v=tuple(v.tolist()))


def min_projected_separation(spec: GridSpec, u=None, cap: int = 200_000) -> float:
    """Exhaustive minimum of ``|<x - y, u>|`` over all pairs of distinct vertices."""
    if u is None:
        u = separating_direction(spec).u
    _guard(spec.num_points**2, cap**2)
    pts = np.array(grid_indices(spec), dtype=float) / spec.k
    proj = pts @ np.asarray(u, dtype=float)
    diff = np.abs(proj[:, None] - proj[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def line_fill(p) -> OneChain:
    """The unique compactly supported filling of a cycle on the line.

    With the support sorted as ``x_1 < ... < x_N`` it is
    ``sum_i gamma_i [[x_i, x_{i+1}]]`` with ``gamma_i = -sum_{j<=i} theta_j``;
    its mass is G(P).  Accepts a 1D :class:`ZeroCycle` or :class:`GridCycle`.
    """
    if isinstance(p, GridCycle):
        p = p.to_cycle()
    if p.n != 1:
        raise DimensionMismatch("line_fill needs n = 1")
    zero = coerce(0, p.mode)
    if p.mode == RATIONAL and sum(p.weights, zero) != 0:
        raise ChiNonZero("cycle weights do not sum to zero")
    atoms = sorted(p.atoms)
    segs = []
    gamma = zero
    for (x, w), (x_next, _) in zip(atoms, atoms[1:]):
        gamma -= w
        if gamma != 0:
            segs.append(Segment(x, x_next, gamma))
    return OneChain(n=1, segments=tuple(segs), mode=p.mode)


def fill_constant(n: int) -> float:
    return 3.0 if n == 1 else 2 * math.sqrt(2) * 5 ** (n - 1) * 3**n


def verify_grid_mass(p: GridCycle, tol: float = DEFAULT_TOL) -> Report:
    """Check ``G/sqrt(n) <= M <= c(n) k^(2n) G`` for a grid cycle, with margins."""
    n, k = p.n, p.k
    rep = Report("grid_mass")
    g = gnorm(p.to_cycle(), tol).value
    m = float(p.mass)
    upper = fill_constant(n) * k ** (2 * n) * g
    rep.values.update({"G": g, "M": m, "lower": g / math.sqrt(n), "upper": upper, "n": n, "k": k})
    slack = 1e-9 * max(1.0, m)
    rep.leq("lower_G_over_sqrt_n_le_M", g / math.sqrt(n), m, slack)
    rep.leq("upper_M_le_cfill_k2n_G", m, upper, slack)
    rep.values["margin_lower_abs"] = m - g / math.sqrt(n)
    rep.values["margin_upper_abs"] = upper - m
    rep.values["margin_upper_rel"] = (upper - m) / upper if upper > 0 else 0.0
    return rep

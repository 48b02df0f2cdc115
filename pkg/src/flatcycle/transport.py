"""Exact flat norm G of atomic cycles via the transportation problem.

For a finite cycle ``T = sum_j b_j [[y_j]] - sum_i a_i [[x_i]]`` the least
mass of a 1-chain with boundary ``T`` equals the optimal cost of shipping
the negative part onto the positive part along straight segments, and the
best 1-Lipschitz test function is an optimal dual potential of that linear
program.  :func:`gnorm` solves it with a transportation simplex (spanning
tree basis, node potentials from the tree) and returns both certificates.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
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
    dist_l1,
    mass,
)
from .errors import ChiNonZero, DimensionMismatch, SolverStall
from .report import Report

DEFAULT_TOL = 1e-9
#: float-mode imbalance that gnorm absorbs into the largest atom
CHI_ABSORB_RTOL = 1e-9

METRICS = {"euclidean": dist, "l1": dist_l1}


@dataclass
class TransportSolution:
    """Optimal plan, dual potentials and duality gap certifying G(T).

    ``plan`` holds ``(source, sink, flow)`` triples: the flow leaves a
    negative atom and arrives at a positive one, so the chain
    ``sum flow * [[source, sink]]`` has boundary ``T``.  ``potentials`` maps
    every support point to the value of a 1-Lipschitz function whose pairing
    with ``T`` is ``dual_value``.
    """

    value: float
    plan: list
    potentials: dict
    gap: float
    dual_value: float
    n: int
    mode: str = FLOAT
    metric: str = "euclidean"
    iterations: int = 0
    extra: dict = field(default_factory=dict)


def _cost_matrix(xs, ys, metric: str) -> np.ndarray:
    if not xs or not ys:
        return np.zeros((len(xs), len(ys)))
    X = np.array([[float(c) for c in p] for p in xs])
    Y = np.array([[float(c) for c in p] for p in ys])
    diff = X[:, None, :] - Y[None, :, :]
    if metric == "euclidean":
        return np.sqrt((diff**2).sum(axis=-1))
    if metric == "l1":
        return np.abs(diff).sum(axis=-1)
    raise ValueError(f"unknown metric {metric!r}")


def _least_cost_basis(supply, demand, cost):
    """Initial basic feasible solution by the least-cost rule.

    Exactly one row or column is retired per allocation, which yields
    ``m + n - 1`` basic cells forming a spanning tree (degenerate cells carry
    zero flow).
    """
    m, n = cost.shape
    ra, rb = list(supply), list(demand)
    row_on, col_on = [True] * m, [True] * n
    rows_left, cols_left = m, n
    basis = {}
    order = np.argsort(cost, axis=None, kind="stable")
    for flat in order:
        if len(basis) == m + n - 1:
            break
        i, j = divmod(int(flat), n)
        if not (row_on[i] and col_on[j]):
            continue
        x = min(ra[i], rb[j])
        basis[(i, j)] = x
        ra[i] -= x
        rb[j] -= x
        if ra[i] == 0 and rows_left > 1:
            row_on[i] = False
            rows_left -= 1
        elif rb[j] == 0 and cols_left > 1:
            col_on[j] = False
            cols_left -= 1
        elif rows_left > 1:
            row_on[i] = False
            rows_left -= 1
        else:
            col_on[j] = False
            cols_left -= 1
    return basis


def _potentials(basis, m, n, cost):
    adj = [[] for _ in range(m + n)]
    for i, j in basis:
        adj[i].append(m + j)
        adj[m + j].append(i)
    pot = np.full(m + n, np.nan)
    pot[0] = 0.0
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if np.isnan(pot[b]):
                if a < m:  # a row, b column: u_i + v_j = c_ij
                    pot[b] = cost[a, b - m] - pot[a]
                else:
                    pot[b] = cost[b, a - m] - pot[a]
                queue.append(b)
    if np.isnan(pot).any():
        raise SolverStall("transport basis is not a spanning tree")
    return pot[:m], pot[m:], adj


def _tree_path(adj, m, start, goal):
    """Node path in the basis tree from ``start`` to ``goal`` (node ids: rows 0..m-1, columns m..)."""
    parent = {start: None}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        if a == goal:
            break
        for b in adj[a]:
            if b not in parent:
                parent[b] = a
                queue.append(b)
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def solve_transport(supply, demand, cost, max_iter=None, degenerate_patience=50):
    """Balanced transportation simplex.

    ``supply`` and ``demand`` may hold Fractions (flows then stay exact) or
    floats; ``cost`` is an ``(m, n)`` float array.  Pricing is Dantzig's
    most-negative reduced cost; after ``degenerate_patience`` consecutive
    degenerate pivots it switches for good to Bland's smallest-index rule,
    which cannot cycle.

    Returns ``(flows, u, v, iterations)`` with ``flows`` a dict over the
    final basic cells and ``u_i + v_j <= c_ij`` (up to rounding) at optimum.
    """
    m, n = cost.shape
    if max_iter is None:
        max_iter = 50 * (m + n) * max(m, n) + 1000
    flows = _least_cost_basis(supply, demand, cost)
    scale = float(cost.max()) if cost.size else 1.0
    thresh = -1e-12 * max(1.0, scale)
    bland = False
    streak = 0
    for it in range(max_iter + 1):
        u, v, adj = _potentials(flows, m, n, cost)
        reduced = cost - u[:, None] - v[None, :]
        flat_red = reduced.ravel()
        if bland:
            cand = np.flatnonzero(flat_red < thresh)
            if cand.size == 0:
                return flows, u, v, it
            flat = int(cand[0])
        else:
            flat = int(np.argmin(flat_red))
            if flat_red[flat] >= thresh:
                return flows, u, v, it
        if it == max_iter:
            break
        ei, ej = divmod(flat, n)
        path = _tree_path(adj, m, ei, m + ej)
        cells = []
        for a, b in zip(path, path[1:]):
            cells.append((a, b - m) if a < m else (b, a - m))
        minus = cells[0::2]
        plus = cells[1::2]
        theta = min(flows[c] for c in minus)
        leaving = min((c for c in minus if flows[c] == theta), key=lambda c: c[0] * n + c[1])
        for c in plus:
            flows[c] += theta
        for c in minus:
            flows[c] -= theta
        del flows[leaving]
        flows[(ei, ej)] = theta
        if theta == 0:
            streak += 1
            if streak >= degenerate_patience:
                bland = True
        else:
            streak = 0
    primal = float(sum(float(f) * cost[c] for c, f in flows.items()))
    raise SolverStall(f"transport simplex hit the iteration cap ({max_iter})", primal=primal)


def _balance(srcs, snks, mode):
    """Absorb a float-mode imbalance (within CHI_ABSORB_RTOL) into the largest atom."""
    sa = math.fsum(float(w) for _, w in srcs)
    sb = math.fsum(float(w) for _, w in snks)
    drift = sb - sa
    if mode == RATIONAL:
        if sum((w for _, w in snks), Fraction(0)) != sum((w for _, w in srcs), Fraction(0)):
            raise ChiNonZero("cycle weights do not sum to zero")
        return srcs, snks, 0.0
    if abs(drift) > CHI_ABSORB_RTOL * (sa + sb):
        raise ChiNonZero(f"cycle weights sum to {drift!r}, not 0")
    if drift == 0:
        return srcs, snks, 0.0
    if drift > 0:
        j = max(range(len(snks)), key=lambda t: snks[t][1])
        snks = list(snks)
        snks[j] = (snks[j][0], snks[j][1] - drift)
    else:
        i = max(range(len(srcs)), key=lambda t: srcs[t][1])
        srcs = list(srcs)
        srcs[i] = (srcs[i][0], srcs[i][1] + drift)
    return srcs, snks, drift


def _lipschitz_repair(srcs, phi_src, points, metric):
    """Inf-convolution ``z -> min_i phi(x_i) + d(z, x_i)`` over the sources.

    This is 1-Lipschitz for the chosen metric everywhere, never larger than
    ``phi`` at the sources and, by dual feasibility, never smaller than the
    sink potentials, so the dual objective can only improve.
    """
    d = METRICS[metric]
    out = {}
    for z in points:
        out[z] = min(p + d(z, x) for (x, _), p in zip(srcs, phi_src))
    return out


def gnorm(t: ZeroCycle, tol: float = DEFAULT_TOL, metric: str = "euclidean", max_iter=None) -> TransportSolution:
    """Compute G(T) with a primal plan, dual potentials and the duality gap.

    ``metric="l1"`` replaces Euclidean segment lengths by l1 lengths (used for
    grid-path routing); the default is the Euclidean flat norm.

    Raises
    ------
    ChiNonZero
        the weights do not sum to zero.
    SolverStall
        the simplex hit its iteration cap, or the gap could not be
        certified below ``tol`` relative.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    srcs = t.negative_part()
    snks = t.positive_part()
    if not srcs and not snks:
        return TransportSolution(0.0, [], {}, 0.0, 0.0, t.n, t.mode, metric)
    if not srcs or not snks:
        raise ChiNonZero("a one-signed measure is not a cycle")
    srcs, snks, drift = _balance(srcs, snks, t.mode)
    cost = _cost_matrix([p for p, _ in srcs], [p for p, _ in snks], metric)
    flows, u, v, iters = solve_transport([w for _, w in srcs], [w for _, w in snks], cost, max_iter=max_iter)

    plan = []
    for (i, j), f in sorted(flows.items()):
        if f > 0:
            plan.append((srcs[i][0], snks[j][0], f))
    primal = math.fsum(float(f) * cost[i, j] for (i, j), f in flows.items() if f > 0)

    phi_src = [-float(ui) for ui in u]
    pot = _lipschitz_repair(srcs, phi_src, t.points, metric)
    dual = math.fsum(float(w) * pot[p] for p, w in t.atoms)
    raw_gap = primal - dual
    if raw_gap > tol * max(1.0, primal):
        raise SolverStall(f"duality gap {raw_gap!r} above tolerance {tol!r}", primal=primal, dual=dual)
    return TransportSolution(
        value=primal,
        plan=plan,
        potentials=pot,
        gap=max(raw_gap, 0.0),
        dual_value=dual,
        n=t.n,
        mode=t.mode,
        metric=metric,
        iterations=iters,
        extra={"absorbed_drift": drift},
    )


def gnorm_value(t: ZeroCycle, tol: float = DEFAULT_TOL) -> float:
    return gnorm(t, tol).value


def certify(t: ZeroCycle, sol: TransportSolution, tol: float = DEFAULT_TOL, rtol: float = 1e-12) -> Report:
    """Re-verify a :class:`TransportSolution` from scratch.

    Distances are recomputed with :func:`math.dist` (the solver uses numpy),
    marginals are summed in the cycle's own arithmetic, and the Lipschitz
    condition is checked over every pair of support points.  Failures are
    report entries, never exceptions.
    """
    rep = Report("certify")
    d = METRICS[sol.metric]
    weights = t.as_dict()
    scale = max(1.0, float(mass(t)))
    zero = coerce(0, t.mode)

    outside = [(s, k) for s, k, _ in sol.plan if weights.get(s, zero) >= 0 or weights.get(k, zero) <= 0]
    rep.add("plan_support", not outside, float(len(outside)), 0.0, "sources negative, sinks positive atoms of T")
    neg = [f for _, _, f in sol.plan if f < 0]
    rep.add("nonnegative_flow", not neg, -float(min(neg)) if neg else 0.0, 0.0)

    acc = {}
    for s, k, f in sol.plan:
        acc[s] = acc.get(s, zero) - f
        acc[k] = acc.get(k, zero) + f
    pts = set(weights) | set(acc)
    if t.mode == RATIONAL and all(isinstance(f, Fraction) for _, _, f in sol.plan):
        resid = max((abs(Fraction(acc.get(p, 0)) - weights.get(p, 0)) for p in pts), default=Fraction(0))
        rep.add("marginals", resid == 0, float(resid), 0.0, "exact rational marginals")
    else:
        resid = max((abs(float(acc.get(p, 0)) - float(weights.get(p, 0))) for p in pts), default=0.0)
        rep.add("marginals", resid <= rtol * scale, resid, rtol * scale)

    primal = math.fsum(float(f) * d(s, k) for s, k, f in sol.plan)
    rep.close("primal_value", primal, sol.value, rtol * max(1.0, primal))

    missing = [p for p in weights if p not in sol.potentials]
    rep.add("potentials_defined", not missing, float(len(missing)), 0.0)
    if not missing:
        dual = math.fsum(float(w) * sol.potentials[p] for p, w in weights.items())
        rep.close("dual_value", dual, sol.dual_value, rtol * max(1.0, primal))
        worst = 0.0
        for x, y in itertools.combinations(weights, 2):
            worst = max(worst, abs(sol.potentials[x] - sol.potentials[y]) - d(x, y))
        rep.add("lipschitz", worst <= rtol, worst, rtol, "max |u(x)-u(y)| - |x-y| over support pairs")
        gap = primal - dual
        rep.add("weak_duality", gap >= -rtol * max(1.0, primal), -gap, rtol * max(1.0, primal))
        rep.add("gap", gap <= tol * max(1.0, primal), gap, tol * max(1.0, primal))
    return rep


def gnorm_1d(t: ZeroCycle):
    """Closed-form G(T) on the line: ``sum |gamma_i| (x_{i+1} - x_i)``, ``gamma_i = -sum_{j<=i} theta_j``.

    Exact (a Fraction) in rational mode.
    """
    if t.n != 1:
        raise DimensionMismatch("gnorm_1d needs a cycle on the line (n = 1)")
    atoms = sorted(t.atoms)
    zero = coerce(0, t.mode)
    if sum((w for _, w in atoms), zero) != 0 and t.mode == RATIONAL:
        raise ChiNonZero("cycle weights do not sum to zero")
    total = zero
    gamma = zero
    for (x, w), (x_next, _) in zip(atoms, atoms[1:]):
        gamma -= w
        total += abs(gamma) * (x_next[0] - x[0])
    return total


def isoperimetric_check(t: ZeroCycle, a, tol: float = DEFAULT_TOL):
    """Compare G(T) with the cone bound ``max_i |x_i - a| * M(T)``.

    Returns ``(G, bound, passed)``.
    """
    g = gnorm(t, tol).value
    if not t.atoms:
        return g, 0.0, True
    apex = tuple(a)
    radius = max(dist(p, apex) for p in t.points)
    bound = radius * float(mass(t))
    return g, bound, g <= bound + 1e-9


def plan_to_chain(sol: TransportSolution) -> OneChain:
    """The optimal filling: one segment ``source -> sink`` per plan entry."""
    segs = tuple(Segment(s, k, f) for s, k, f in sol.plan if f != 0)
    return OneChain(n=sol.n, segments=segs, mode=sol.mode)

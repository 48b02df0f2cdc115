"""Mass at scale: the functional kappa(T, eps), grid divergence fields and osc_1.

``kappa(T, eps)`` is the least mass of a cycle ``T_hat`` with
``G(T - T_hat) <= eps``.  Restricting ``T_hat`` to a finite candidate
support ``S`` turns it into one linear program: with ``T_hat = sum (a_i - b_i) [[x_i]]``
and a nonnegative flow ``f`` on the complete directed graph over ``S``,

    minimize   sum (a_i + b_i)
    subject to inflow_v - outflow_v + a_v - b_v = theta_v   for every v in S
               sum_ij |x_i - x_j| f_ij <= eps

The flow is a transport plan from ``T_hat`` to ``T``, so the budget row is
exactly ``G(T - T_hat) <= eps`` on ``S``.  The optimum is an upper bound on
the unrestricted kappa and decreases as ``S`` is refined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from .cycles import FLOAT, ZeroCycle, coerce, combine, make_cycle, mass
from .errors import BadEps, ChiNonZero, DimensionMismatch, SolverStall
from .grid import GridSpec, grid_points, snap
from .report import Report
from .transport import DEFAULT_TOL, gnorm

SUPPORT = "support"
SUPPORT_GRID = "support+grid"
POLICIES = (SUPPORT, SUPPORT_GRID)

_LP_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
    "presolve": True,
}


@dataclass
class KappaEstimate:
    eps: float
    value: float
    witness: ZeroCycle
    support_policy: str = SUPPORT
    distance: float = 0.0
    lp_value: float = 0.0
    support_size: int = 0

    @property
    def feasible(self) -> bool:
        return self.distance <= self.eps * (1 + 1e-9) + 1e-12


def _candidate_support(t: ZeroCycle, policy: str, k, extra_support) -> list:
    pts = [tuple(float(c) for c in p) for p in t.points]
    if policy == SUPPORT_GRID:
        if k is None:
            raise ValueError("support policy 'support+grid' needs a grid resolution k")
        pts += [tuple(float(c) for c in p) for p in grid_points(GridSpec(t.n, k), FLOAT)]
    elif policy != SUPPORT:
        raise ValueError(f"unknown support policy {policy!r}; expected one of {POLICIES}")
    for p in extra_support or ():
        p = tuple(float(c) for c in p)
        if len(p) != t.n:
            raise DimensionMismatch(f"extra support point {p} is not in dimension {t.n}")
        pts.append(p)
    return sorted(set(pts))


def _solve_lp(pts: list, theta: np.ndarray, eps: float):
    n_pts = len(pts)
    X = np.asarray(pts, dtype=float)
    C = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(axis=2))
    src, dst = np.nonzero(~np.eye(n_pts, dtype=bool))
    n_f = len(src)
    n_var = 2 * n_pts + n_f
    # a, b blocks then flows; every flow column has -1 at its tail and +1 at its head
    rows = np.concatenate([np.arange(n_pts), np.arange(n_pts), src, dst])
    cols = np.concatenate([np.arange(n_pts), n_pts + np.arange(n_pts), 2 * n_pts + np.arange(n_f), 2 * n_pts + np.arange(n_f)])
    vals = np.concatenate([np.ones(n_pts), -np.ones(n_pts), -np.ones(n_f), np.ones(n_f)])
    a_eq = coo_matrix((vals, (rows, cols)), shape=(n_pts, n_var)).tocsr()
    a_ub = np.zeros((1, n_var))
    a_ub[0, 2 * n_pts :] = C[src, dst]
    c = np.zeros(n_var)
    c[: 2 * n_pts] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=[eps], A_eq=a_eq, b_eq=theta, bounds=(0, None), method="highs-ds", options=_LP_OPTIONS)
    if res.status != 0:
        raise SolverStall(f"kappa LP did not solve: {res.message}")
    a = res.x[:n_pts]
    b = res.x[n_pts : 2 * n_pts]
    return a - b, float(res.fun)


def _fix_chi(weights: np.ndarray) -> np.ndarray:
    w = weights.copy()
    scale = np.abs(w).sum()
    w[np.abs(w) <= 1e-14 * max(scale, 1e-300)] = 0.0
    if np.count_nonzero(w):
        j = int(np.argmax(np.abs(w)))
        w[j] -= math.fsum(w.tolist())
    return w


def kappa(
    t: ZeroCycle,
    eps,
    support_policy: str = SUPPORT,
    k: int | None = None,
    extra_support=None,
    tol: float = DEFAULT_TOL,
) -> KappaEstimate:
    """Upper bound on kappa(T, eps) from the LP over a candidate support.

    ``support_policy`` is ``"support"`` (the atoms of T) or ``"support+grid"``
    (atoms plus every vertex of the grid of step ``1/k``); ``extra_support``
    adds arbitrary points, which is how several estimates are put on a common
    support.  The witness is re-certified with :func:`gnorm`.
    """
    eps = float(eps)
    if not eps > 0:
        raise BadEps(f"eps must be positive, got {eps!r}")
    chi_t = float(sum(t.weights, coerce(0, t.mode)))
    if abs(chi_t) > 1e-12 * max(float(mass(t)), 1e-300):
        raise ChiNonZero("kappa needs a cycle")
    zero = make_cycle(t.n, (), FLOAT)
    pts = _candidate_support(t, support_policy, k, extra_support)
    g = gnorm(t, tol).value
    if g <= eps:
        return KappaEstimate(eps, 0.0, zero, support_policy, g, 0.0, len(pts))

    index = {p: i for i, p in enumerate(pts)}
    theta = np.zeros(len(pts))
    for p, w in t.atoms:
        theta[index[tuple(float(c) for c in p)]] += float(w)
    w, lp_value = _solve_lp(pts, theta, eps)
    w = _fix_chi(w)
    witness = make_cycle(t.n, [(p, x) for p, x in zip(pts, w.tolist()) if x != 0], FLOAT)
    m_t = float(mass(t))
    if float(mass(witness)) >= m_t:
        witness = t if t.mode == FLOAT else t.as_mode(FLOAT)
    distance = gnorm(combine(1, t, -1, witness), tol).value
    return KappaEstimate(eps, float(mass(witness)), witness, support_policy, distance, lp_value, len(pts))


def kappa_curve(t: ZeroCycle, eps_list, support_policy: str = SUPPORT, k=None, extra_support=None, tol=DEFAULT_TOL) -> list:
    """kappa at every scale of ``eps_list``, all on the same candidate support."""
    return [kappa(t, e, support_policy, k, extra_support, tol) for e in eps_list]


def curve_report(curve: list, tol: float = 1e-7) -> Report:
    """Monotonicity and midpoint convexity of a kappa curve on its own samples."""
    rep = Report("kappa_curve")
    pts = sorted((c.eps, c.value) for c in curve)
    worst = max((b[1] - a[1] for a, b in zip(pts, pts[1:])), default=0.0)
    rep.add("non_increasing", worst <= tol, worst, tol)
    worst_c = -math.inf
    for i, (e1, v1) in enumerate(pts):
        for e2, v2 in pts[i + 1 :]:
            mid = (e1 + e2) / 2
            for e, v in pts:
                if math.isclose(e, mid, rel_tol=1e-12, abs_tol=1e-15):
                    worst_c = max(worst_c, v - (v1 + v2) / 2)
    rep.add("midpoint_convex", worst_c <= tol, max(worst_c, 0.0), tol)
    # chords through non-midpoints too: a convex function lies below every chord
    worst_ch = -math.inf
    for i in range(len(pts)):
        for j in range(i + 2, len(pts)):
            (e1, v1), (e2, v2) = pts[i], pts[j]
            for e, v in pts[i + 1 : j]:
                lam = (e2 - e) / (e2 - e1)
                worst_ch = max(worst_ch, v - (lam * v1 + (1 - lam) * v2))
    rep.add("convex_chords", worst_ch <= tol, max(worst_ch, 0.0), tol)
    return rep


def verify_kappa_rules(t1: ZeroCycle, t2: ZeroCycle, eps1, eps2, lam, tol: float = 1e-9, extra_support=None) -> Report:
    """Subadditivity, positive homogeneity and the comparison rule on a common support.

    All estimates use the candidate support ``supp T1 u supp T2`` (plus
    ``extra_support``), so both sides of every inequality are restricted in
    the same way.
    """
    rep = Report("kappa_rules")
    eps1, eps2, lam = float(eps1), float(eps2), float(lam)
    common = sorted({tuple(float(c) for c in p) for p in (*t1.points, *t2.points)} | {tuple(map(float, p)) for p in extra_support or ()})

    def kap(t, e):
        return kappa(t, e, SUPPORT, extra_support=common)

    k1 = kap(t1, eps1)
    k2 = kap(t2, eps2)
    k12 = kap(combine(1, t1, 1, t2), eps1 + eps2)
    scale = max(1.0, k1.value + k2.value)
    rep.leq("subadditive", k12.value, k1.value + k2.value, tol * scale)

    if lam != 0:
        ks = kap(combine(lam, t1, 0, t1), abs(lam) * eps1)
        rep.close("scaling", ks.value, abs(lam) * k1.value, tol * max(1.0, abs(lam) * k1.value))
    else:
        rep.add("scaling", True, 0.0, 0.0, "lambda = 0: both sides vanish")

    # comparison: T_hat is the witness of kappa(T1, eps1), so G(T1 - T_hat) <= eps1
    t_hat = k1.witness
    lhs = kap(t1, eps1 + eps2)
    rhs = kap(t_hat, eps2)
    rep.leq("comparison", lhs.value, rhs.value, tol * max(1.0, rhs.value))
    for name, est in (("k1", k1), ("k2", k2), ("k12", k12)):
        rep.leq(f"witness_{name}_distance", est.distance, est.eps, tol * max(1.0, est.eps))
    rep.values.update({"kappa1": k1.value, "kappa2": k2.value, "kappa12": k12.value, "kappa_cmp_lhs": lhs.value, "kappa_cmp_rhs": rhs.value})
    return rep


def certify_kappa(t: ZeroCycle, est: KappaEstimate, tol: float = DEFAULT_TOL) -> Report:
    """Independent re-check of a kappa estimate: feasibility and the mass bound."""
    rep = Report("kappa")
    d = gnorm(combine(1, t, -1, est.witness), tol).value
    rep.leq("witness_distance", d, est.eps, tol * max(1.0, est.eps))
    rep.close("witness_mass", float(mass(est.witness)), est.value, 1e-12 * max(1.0, est.value))
    rep.leq("value_le_mass", est.value, float(mass(t)), 1e-12 * max(1.0, float(mass(t))))
    g = gnorm(t, tol).value
    rep.add("zero_iff_close", (est.value <= tol) == (g <= est.eps + tol) or abs(g - est.eps) <= 1e-7, est.value, tol)
    return rep


# grid divergence fields


@dataclass
class GridVectorField:
    """Signed edge flows on the grid.

    ``flow`` maps ``(index, axis)`` to the flow along the edge from ``index``
    to ``index + e_axis``; positive values run in the +axis direction.
    """

    spec: GridSpec
    flow: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return math.fsum(abs(float(f)) for f in self.flow.values()) / self.spec.k

    def divergence(self) -> dict:
        """Boundary of the field as ``index -> weight`` (head minus tail)."""
        out = {}
        for (idx, axis), f in self.flow.items():
            head = idx[:axis] + (idx[axis] + 1,) + idx[axis + 1 :]
            out[idx] = out.get(idx, 0) - f
            out[head] = out.get(head, 0) + f
        return {i: w for i, w in out.items() if w != 0}


def _route(field_acc: dict, a: tuple, b: tuple, f) -> None:
    # axis-ordered staircase from a to b
    cur = list(a)
    for axis in range(len(a)):
        step = 1 if b[axis] > cur[axis] else -1
        while cur[axis] != b[axis]:
            if step > 0:
                key = (tuple(cur), axis)
                field_acc[key] = field_acc.get(key, 0) + f
            else:
                lower = cur[:axis] + [cur[axis] - 1] + cur[axis + 1 :]
                key = (tuple(lower), axis)
                field_acc[key] = field_acc.get(key, 0) - f
            cur[axis] += step


def beckmann(t: ZeroCycle, spec: GridSpec, tol: float = DEFAULT_TOL):
    """Least-L1 edge flow on the grid whose divergence is the snapped cycle.

    The grid graph's path metric is the l1 distance scaled by ``k``, so the
    optimal flow is an l1-optimal transport plan between the snapped
    positive and negative parts, routed along monotone staircases.  Returns
    ``(field, value, snapped)``.
    """
    if t.n != spec.n:
        raise DimensionMismatch(f"cycle in dimension {t.n}, grid in {spec.n}")
    snapped, _ = snap(t, spec)
    cyc = snapped.to_cycle()
    if t.mode == FLOAT and not cyc.atoms:
        return GridVectorField(spec), 0.0, snapped
    sol = gnorm(cyc, tol, metric="l1")
    to_index = {spec.point(i, snapped.mode): i for i, _ in snapped.theta}
    acc = {}
    for s, d, f in sol.plan:
        _route(acc, to_index[s], to_index[d], f)
    flow = {key: f for key, f in sorted(acc.items()) if f != 0}
    fld = GridVectorField(spec, flow)
    return fld, fld.value, snapped


def divergence_matches(fld: GridVectorField, snapped, rtol: float = 1e-12) -> bool:
    div = fld.divergence()
    want = dict(snapped.theta)
    keys = set(div) | set(want)
    scale = max(1.0, float(snapped.mass))
    return all(abs(float(div.get(i, 0)) - float(want.get(i, 0))) <= rtol * scale for i in keys)


# L1 modulus of smoothness


@dataclass
class ModulusCurve:
    samples: list

    def is_monotone(self, tol: float = 1e-9) -> bool:
        s = sorted(self.samples)
        return all(b[1] >= a[1] - tol for a, b in zip(s, s[1:]))

    def is_subadditive(self, tol: float = 1e-9) -> bool:
        for r1, v1 in self.samples:
            for r2, v2 in self.samples:
                for r, v in self.samples:
                    if math.isclose(r, r1 + r2, rel_tol=1e-12, abs_tol=1e-15) and v > v1 + v2 + tol:
                        return False
        return True


def _component_cells(eta: GridVectorField) -> dict:
    """Per axis, the density of that component on the dual cell of each edge."""
    k, n = eta.spec.k, eta.spec.n
    density = k ** (n - 1)
    comps = {}
    for (idx, axis), f in eta.flow.items():
        comps.setdefault(axis, {})[idx] = float(f) * density
    return comps


def _shift_l1(cells: dict, axis: int, j: int, k: int, n: int) -> float:
    # integral of |eta_c - eta_{c + j e_axis}| over the cell lattice, zero outside
    if j == 0:
        return 0.0
    total = []
    for c, val in cells.items():
        nb = c[:axis] + (c[axis] + j,) + c[axis + 1 :]
        total.append(abs(val - cells.get(nb, 0.0)))
    for c, val in cells.items():
        nb = c[:axis] + (c[axis] - j,) + c[axis + 1 :]
        if nb not in cells:
            total.append(abs(val))
    return math.fsum(total) / k**n


def osc1_value(eta: GridVectorField, r: float) -> float:
    """``sup { int |eta - eta o tau_h| : h = t e_b, |t| <= r }`` for the cell-wise constant field.

    Shifting by ``t = (j + s)/k`` along an axis splits every cell into a part
    that lands on cell ``c + j`` and a part that lands on ``c + j + 1``, so the
    L1 difference is linear in ``s`` between integer shifts; the supremum is
    attained at a breakpoint or at ``r`` itself.
    """
    if r <= 0 or not eta.flow:
        return 0.0
    k, n = eta.spec.k, eta.spec.n
    comps = _component_cells(eta)
    steps = r * k
    j_max = math.floor(steps)
    s = steps - j_max
    best = 0.0
    for b in range(n):
        d = [math.fsum(_shift_l1(cells, b, j, k, n) for cells in comps.values()) for j in range(j_max + 2)]
        cand = max(d[: j_max + 1])
        cand = max(cand, (1 - s) * d[j_max] + s * d[j_max + 1])
        best = max(best, cand)
    return best


def osc1(eta: GridVectorField, r_list) -> ModulusCurve:
    """osc_1 sampled at every radius in ``r_list`` (translations along the axes)."""
    return ModulusCurve([(float(r), osc1_value(eta, float(r))) for r in r_list])

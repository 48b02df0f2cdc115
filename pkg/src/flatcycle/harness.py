"""Property-suite runner behind ``flatcycle verify``.

Each suite draws its instances from one integer seed and returns a
:class:`RunReport`.  Reports carry no wall-clock data unless timings are
requested, so the same seed and parameters give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cycles import FLOAT, RATIONAL, boundary, combine, mass
from .entropy import (
    BoundednessCertificate,
    CountInstance,
    card_pnk,
    count_bruteforce,
    count_exact,
    count_upper,
    covering_bound,
    greedy_net,
)
from .generators import grid_random, harmonic, random_cycle
from .grid import GridSpec, line_fill, min_projected_separation, separating_direction, verify_grid_mass
from .kappa import beckmann, curve_report, divergence_matches, kappa, kappa_curve, verify_kappa_rules
from .quantize import QuantLattice, check_B_implies_C, deform, enumerate_class, minimal_k, verify_class_geometry
from .report import Check, Report
from .transport import DEFAULT_TOL, TransportSolution, certify, gnorm, gnorm_1d

SUITES = ("gnorm", "grid92", "quant94", "deform95", "kappa80", "count10")


def worker_count() -> int:
    raw = os.environ.get("FLATCYCLE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn, items) -> list:
    """``map`` over a thread pool capped by FLATCYCLE_THREADS; results keep input order."""
    items = list(items)
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class RunReport:
    command: str
    params: dict
    seed: int
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        blob = json.dumps({"command": self.command, "params": self.params, "seed": self.seed}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def absorb(self, rep: Report, prefix: str = "") -> None:
        for c in rep.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.residual, c.bound, c.detail))

    def summarize(self, name: str, checks: list) -> Check:
        """Collapse many checks into one entry carrying the worst residual."""
        bad = [c for c in checks if not c.passed]
        worst = max(checks, key=lambda c: c.residual - c.bound, default=Check(name, True))
        shown = bad[0] if bad else worst
        c = Check(name, not bad, shown.residual, shown.bound, f"{len(checks) - len(bad)}/{len(checks)} pass; worst: {shown.name}: {shown.detail}")
        self.checks.append(c)
        return c

    def to_dict(self, timings: bool = False) -> dict:
        out = {
            "command": self.command,
            "inputs_digest": self.digest,
            "params": {k: _plain(v) for k, v in sorted(self.params.items())},
            "seed": self.seed,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "values": {k: _plain(v) for k, v in sorted(self.values.items())},
        }
        if timings:
            out["timings"] = self.timings
        return out


def _plain(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v if abs(v) < 2**53 else str(v)
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return str(v)


def _timed(rep: RunReport, key: str):
    class _T:
        def __enter__(self):
            self.t = time.perf_counter()

        def __exit__(self, *exc):
            rep.timings[key] = time.perf_counter() - self.t

    return _T()


def _inject(sol: TransportSolution) -> TransportSolution:
    bad = {p: 2 * v for p, v in sol.potentials.items()}
    return TransportSolution(sol.value, sol.plan, bad, sol.gap, 2 * sol.dual_value, sol.n, sol.mode, sol.metric)


def suite_gnorm(seed: int = 0, count: int = 200, max_atoms: int = 40, mode: str = RATIONAL, tol: float = DEFAULT_TOL, fault: bool = False) -> RunReport:
    rep = RunReport("verify gnorm", {"count": count, "max_atoms": max_atoms, "mode": mode, "tol": tol, "fault": fault}, seed)
    rng = np.random.default_rng(seed)
    jobs = [(int(rng.integers(1, 4)), int(rng.integers(2, max_atoms + 1)), int(rng.integers(2**63))) for _ in range(count)]

    def one(job):
        n, atoms, s = job
        t = random_cycle(n, atoms, s, mode)
        sol = gnorm(t, tol)
        if fault:
            sol = _inject(sol)
        r = certify(t, sol, tol)
        rel = abs(sol.value - sol.dual_value) / sol.value if sol.value > 0 else abs(sol.dual_value)
        return r, rel

    with _timed(rep, "gnorm"):
        results = ordered_map(one, jobs)
    for name in ("marginals", "lipschitz", "weak_duality", "gap", "primal_value", "dual_value", "plan_support"):
        rep.summarize(name, [next(c for c in r.checks if c.name == name) for r, _ in results])
    worst = max(rel for _, rel in results)
    rep.checks.append(Check("primal_dual_rel", worst <= 1e-9, worst, 1e-9, "max |primal - dual| / primal"))
    rep.values["instances"] = count
    return rep


def suite_line(seed: int = 0, count: int = 100, max_atoms: int = 20) -> RunReport:
    rep = RunReport("verify line", {"count": count, "max_atoms": max_atoms}, seed)
    rng = np.random.default_rng(seed)
    err, err_m, exact = 0.0, 0.0, True
    for _ in range(count):
        t = random_cycle(1, int(rng.integers(2, max_atoms + 1)), int(rng.integers(2**63)), RATIONAL)
        g1 = gnorm_1d(t)
        err = max(err, abs(gnorm(t).value - float(g1)))
        s = line_fill(t)
        exact = exact and boundary(s) == t
        err_m = max(err_m, abs(float(mass(s)) - float(g1)))
    rep.checks.append(Check("gnorm_vs_closed_form", err <= 1e-12, err, 1e-12))
    rep.checks.append(Check("line_fill_boundary_exact", exact))
    rep.checks.append(Check("line_fill_mass", err_m <= 1e-12, err_m, 1e-12))
    return rep


def suite_grid_mass(seed: int = 0, samples: int = 500, n: int | None = None, k: int | None = None, tol: float = DEFAULT_TOL) -> RunReport:
    rep = RunReport("verify grid92", {"samples": samples, "n": n, "k": k}, seed)
    rng = np.random.default_rng(seed)
    reports = []
    worst_rel = 1.0
    for _ in range(samples):
        nn = n or int(rng.integers(1, 4))
        kk = k or int(rng.integers(1, 4))
        g = grid_random(nn, kk, int(rng.integers(2, 12)), int(rng.integers(2**63)))
        r = verify_grid_mass(g, tol)
        reports.append(r)
        if r.values["upper"] > 0:
            worst_rel = min(worst_rel, r.values["margin_upper_rel"])
    for name in ("lower_G_over_sqrt_n_le_M", "upper_M_le_cfill_k2n_G"):
        rep.summarize(name, [r[name] for r in reports])
    rep.values["min_upper_margin_rel"] = worst_rel
    rep.values["min_lower_margin_abs"] = min(r.values["margin_lower_abs"] for r in reports)
    return rep


def suite_separation(n_max: int = 3, k_max: int = 4) -> RunReport:
    rep = RunReport("verify separating-direction", {"n_max": n_max, "k_max": k_max}, 0)
    for n in range(1, n_max + 1):
        for k in range(1, k_max + 1):
            spec = GridSpec(n, k)
            sd = separating_direction(spec)
            got = min_projected_separation(spec, sd.u)
            rep.checks.append(Check(f"n{n}_k{k}", got >= sd.rho, sd.rho - got, 0.0, f"min |<x-y,u>| = {got!r} >= {sd.rho!r}"))
            norm = math.sqrt(sum(c * c for c in sd.u))
            rep.checks.append(Check(f"n{n}_k{k}_unit", abs(norm - 1) <= 1e-12, abs(norm - 1), 1e-12))
    return rep


def suite_quant_class(seed: int = 0, samples: int = 100, pairs: int = 200, n_max: int = 2, k_max: int = 2, eps=1) -> RunReport:
    rep = RunReport("verify quant94", {"samples": samples, "pairs": pairs, "n_max": n_max, "k_max": k_max, "eps": str(eps)}, seed)
    for n in range(1, n_max + 1):
        for k in range(1, k_max + 1):
            r = verify_class_geometry(QuantLattice(n, k, Fraction(eps)), samples, pairs, seed=seed + 97 * n + k)
            rep.absorb(r, prefix=f"n{n}_k{k}_")
    return rep


def deform_instances(count: int, seed: int):
    """Finite-mass cycles for the quantization suite: random small cycles and harmonic truncations."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        if i % 5 == 4:
            out.append(harmonic(int(rng.integers(1, 6)), int(rng.integers(1, 3)), FLOAT))
        else:
            n = int(rng.integers(1, 3))
            out.append(random_cycle(n, int(rng.integers(2, 9)), int(rng.integers(2**63)), FLOAT))
    return out


def suite_deform(seed: int = 0, count: int = 50, tol: float = DEFAULT_TOL) -> RunReport:
    rep = RunReport("verify deform95", {"count": count}, seed)
    rng = np.random.default_rng(seed + 1)
    entries = {"member": [], "error_lt_3eps": [], "stage_bound_lt_3eps": [], "mass_le_k_eps": [], "condition_A": [], "B_implies_C": []}
    worst_ratio = 0.0
    for i, t in enumerate(deform_instances(count, seed)):
        eps = float(rng.choice([1.0, 0.5, 0.25]))
        g = gnorm(t, tol).value
        kap = kappa(t, eps, tol=tol).value
        k = minimal_k(t, eps, kap, g_value=g)
        res = deform(t, k, eps, tol)
        lat = res.P.lattice
        tag = f"#{i} n={t.n} k={k} eps={eps}"
        entries["member"].append(Check(tag, res.member and res.P.is_member))
        entries["error_lt_3eps"].append(Check(tag, res.error < 3 * eps, res.error - 3 * eps, 0.0, f"G(T-P) = {res.error!r} < {3 * eps!r}"))
        entries["stage_bound_lt_3eps"].append(Check(tag, res.stage_bound < 3 * eps, res.stage_bound - 3 * eps, 0.0))
        entries["mass_le_k_eps"].append(Check(tag, res.P.mass <= k * lat.eps, float(res.P.mass - k * lat.eps), 0.0))
        entries["condition_A"].append(Check(tag, res.condition_A))
        bc = check_B_implies_C(t, k, eps, res.P, tol)
        entries["B_implies_C"].append(Check(tag, bc.passed, bc["holds"].residual, 0.0, bc["holds"].detail))
        worst_ratio = max(worst_ratio, res.error / (3 * eps))
    for name, checks in entries.items():
        rep.summarize(name, checks)
    rep.values["max_error_over_3eps"] = worst_ratio
    return rep


def suite_kappa(seed: int = 0, pairs: int = 50, curves: int = 20, tol: float = 1e-9) -> RunReport:
    rep = RunReport("verify kappa80", {"pairs": pairs, "curves": curves}, seed)
    rng = np.random.default_rng(seed)
    curve_checks = {"non_increasing": [], "midpoint_convex": [], "convex_chords": []}
    le_mass, zero_iff = [], []
    for i in range(curves):
        n = int(rng.integers(1, 4))
        t = random_cycle(n, int(rng.integers(2, 9)), int(rng.integers(2**63)), FLOAT)
        g = gnorm(t).value
        top = max(g * 1.2, 1e-3)
        eps_grid = [top * (j + 1) / 8 for j in range(8)]
        curve = kappa_curve(t, eps_grid)
        cr = curve_report(curve, 1e-7)
        for c in cr.checks:
            curve_checks[c.name].append(Check(f"#{i}", c.passed, c.residual, c.bound))
        m = float(mass(t))
        for est in curve:
            le_mass.append(Check(f"#{i} eps={est.eps:.4g}", est.value <= m + 1e-12 * m, est.value - m, 1e-12 * m))
            zero = est.value <= tol
            close = g <= est.eps + tol
            zero_iff.append(Check(f"#{i} eps={est.eps:.4g}", zero == close or abs(g - est.eps) <= tol, est.value, tol, f"G={g!r}"))
    for name, checks in curve_checks.items():
        rep.summarize(name, checks)
    rep.summarize("kappa_le_mass", le_mass)
    rep.summarize("zero_iff_G_le_eps", zero_iff)

    fam = {"subadditive": [], "scaling": [], "comparison": []}
    for i in range(pairs):
        n = int(rng.integers(1, 3))
        t1 = random_cycle(n, int(rng.integers(2, 7)), int(rng.integers(2**63)), FLOAT)
        t2 = random_cycle(n, int(rng.integers(2, 7)), int(rng.integers(2**63)), FLOAT)
        e1, e2 = float(rng.uniform(0.05, 1.0)), float(rng.uniform(0.05, 1.0))
        lam = float(rng.choice([-2.0, -0.5, 0.5, 1.0, 3.0]))
        r = verify_kappa_rules(t1, t2, e1, e2, lam, tol)
        for name in fam:
            c = r[name]
            fam[name].append(Check(f"#{i}", c.passed, c.residual, c.bound, c.detail))
    for name, checks in fam.items():
        rep.summarize(name, checks)
    return rep


def suite_beckmann(seed: int = 0, count: int = 100, tol: float = 1e-9) -> RunReport:
    rep = RunReport("verify beckmann", {"count": count}, seed)
    rng = np.random.default_rng(seed)
    lower, upper, div = [], [], []
    for i in range(count):
        n, k = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        t = random_cycle(n, int(rng.integers(2, 12)), int(rng.integers(2**63)), FLOAT)
        fld, value, snapped = beckmann(t, GridSpec(n, k))
        g = gnorm(snapped.to_cycle()).value if snapped.theta else 0.0
        lower.append(Check(f"#{i}", g <= value * (1 + tol) + 1e-12, g - value, tol * value))
        upper.append(Check(f"#{i}", value <= math.sqrt(n) * g * (1 + tol) + 1e-12, value - math.sqrt(n) * g, tol * value))
        div.append(Check(f"#{i}", divergence_matches(fld, snapped)))
    rep.summarize("G_snap_le_value", lower)
    rep.summarize("value_le_sqrt_n_G_snap", upper)
    rep.summarize("divergence_equals_snap", div)
    return rep


def suite_count(seed: int = 0, p_max: int = 8, k_max: int = 5, net_eps: float | None = None) -> RunReport:
    rep = RunReport("verify count10", {"p_max": p_max, "k_max": k_max}, seed)
    agree, ln_g, ln_f = [], [], []
    sweep = [(p, q) for p in range(1, p_max + 1) for q in range(1, p + 1)] + [(10, 3), (12, 4)]
    for p, q in sweep:
        inst = CountInstance(p, q)
        a, b = count_exact(inst), count_bruteforce(inst)
        bf, bg = count_upper(inst, check=False)
        agree.append(Check(f"({p},{q})", a.exact == b.exact, abs(a.exact - b.exact), 0.0, f"{a.exact} vs {b.exact}"))
        ln_g.append(Check(f"({p},{q})", a.ln_value <= bg, a.ln_value - bg, 0.0))
        ln_f.append(Check(f"({p},{q})", a.exact <= bf, float(a.exact - bf), 0.0))
    rep.summarize("exact_equals_bruteforce", agree)
    rep.summarize("ln_exact_le_G_bound", ln_g)
    rep.summarize("exact_le_F_bound", ln_f)

    pnk = []
    for k in range(1, k_max + 1):
        c = card_pnk(1, k)
        pnk.append(Check(f"n1_k{k}", bool(c.holds), c.result.ln_value - c.ln_bound, 0.0))
    rep.summarize("ln_card_pnk_le_bound", pnk)

    lat = QuantLattice(1, 1, 1)
    members = sum(1 for _ in enumerate_class(lat))
    ref = count_exact(CountInstance(6, 3)).exact
    rep.checks.append(Check("enumeration_n1_k1", members == ref, abs(members - ref), 0.0, f"{members} enumerated vs count {ref}"))

    eps = net_eps if net_eps is not None else lat.separation
    fam = [m.to_cycle(FLOAT) for m in enumerate_class(lat, as_cycles=True)]
    net = greedy_net(fam, eps)
    worst = math.inf
    for i in range(len(net)):
        for j in range(i + 1, len(net)):
            worst = min(worst, gnorm(combine(1, net[i], -1, net[j])).dual_value)
    rep.checks.append(Check("greedy_net_separated", worst >= eps, eps - worst, 0.0, f"{len(net)} kept, min certified distance {worst!r}"))
    rep.values.update({"net_size": len(net), "family_size": len(fam)})
    k, ln_n = covering_bound(1, BoundednessCertificate(1, ((0, 0),)), 1)
    rep.checks.append(Check("covering_bound_example", k == 25 and abs(ln_n - 51 * math.log(550)) <= 1e-12, 0.0, 0.0, f"k={k}, ln N={ln_n!r}"))
    return rep


def run_suite(name: str, seed: int = 0, fault: bool = False, **params) -> RunReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    fn = {
        "gnorm": suite_gnorm,
        "grid92": suite_grid_mass,
        "quant94": suite_quant_class,
        "deform95": suite_deform,
        "kappa80": suite_kappa,
        "count10": suite_count,
    }[name]
    if name == "gnorm":
        params["fault"] = fault
    rep = fn(seed=seed, **params)
    if fault and name != "gnorm":
        rep.checks.append(Check("injected_fault", False, 1.0, 0.0, "harness self-test"))
    return rep

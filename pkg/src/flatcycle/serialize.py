"""JSON encodings for cycles, chains and solver outputs.

Rationals are written as ``"p/q"`` strings and floats as JSON numbers, so
every object re-parses to an equal value in its own arithmetic mode.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cycles import FLOAT, RATIONAL, OneChain, Segment, ZeroCycle, coerce, make_cycle
from .errors import BadParams
from .grid import GridCycle, GridSpec, make_grid_cycle
from .kappa import GridVectorField, KappaEstimate
from .quantize import QuantizedCycle, QuantLattice, make_quantized
from .transport import TransportSolution


def num(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return x
    return float(x)


def _point(p):
    return [num(c) for c in p]


def _mode_of(obj: dict) -> str:
    mode = obj.get("mode", FLOAT)
    if mode not in (RATIONAL, FLOAT):
        raise BadParams(f"unknown mode {mode!r}")
    return mode


def cycle_to_obj(t: ZeroCycle) -> dict:
    return {"n": t.n, "mode": t.mode, "atoms": [{"x": _point(p), "w": num(w)} for p, w in t.atoms]}


def cycle_from_obj(obj: dict) -> ZeroCycle:
    try:
        n = int(obj["n"])
        mode = _mode_of(obj)
        atoms = [(a["x"], a["w"]) for a in obj.get("atoms", [])]
    except (KeyError, TypeError) as exc:
        raise BadParams(f"malformed cycle object: {exc}") from exc
    return make_cycle(n, atoms, mode=mode)


def chain_to_obj(s: OneChain) -> dict:
    return {
        "n": s.n,
        "mode": s.mode,
        "segments": [{"a": _point(g.a), "b": _point(g.b), "c": num(g.coef)} for g in s.segments],
    }


def chain_from_obj(obj: dict) -> OneChain:
    mode = _mode_of(obj)
    n = int(obj["n"])
    segs = []
    for g in obj.get("segments", []):
        a = tuple(coerce(c, mode) for c in g["a"])
        b = tuple(coerce(c, mode) for c in g["b"])
        segs.append(Segment(a, b, coerce(g["c"], mode)))
    return OneChain(n=n, segments=tuple(segs), mode=mode)


def solution_to_obj(sol: TransportSolution) -> dict:
    return {
        "n": sol.n,
        "mode": sol.mode,
        "metric": sol.metric,
        "value": sol.value,
        "dual_value": sol.dual_value,
        "gap": sol.gap,
        "plan": [{"from": _point(s), "to": _point(d), "f": num(f)} for s, d, f in sol.plan],
        "u": [{"x": _point(p), "v": v} for p, v in sorted(sol.potentials.items())],
    }


def solution_from_obj(obj: dict) -> TransportSolution:
    mode = _mode_of(obj)

    def pt(c):
        return tuple(coerce(x, mode) for x in c)

    plan = [(pt(e["from"]), pt(e["to"]), coerce(e["f"], mode)) for e in obj["plan"]]
    pot = {pt(e["x"]): float(e["v"]) for e in obj["u"]}
    return TransportSolution(
        value=float(obj["value"]),
        plan=plan,
        potentials=pot,
        gap=float(obj["gap"]),
        dual_value=float(obj.get("dual_value", obj["value"])),
        n=int(obj["n"]),
        mode=mode,
        metric=obj.get("metric", "euclidean"),
    )


def grid_cycle_to_obj(g: GridCycle) -> dict:
    return {"n": g.n, "k": g.k, "mode": g.mode, "theta": [{"i": list(i), "w": num(w)} for i, w in g.theta]}


def grid_cycle_from_obj(obj: dict, check_chi: bool = True) -> GridCycle:
    spec = GridSpec(int(obj["n"]), int(obj["k"]))
    mode = _mode_of(obj)
    return make_grid_cycle(spec, [(tuple(e["i"]), e["w"]) for e in obj["theta"]], mode=mode, check_chi=check_chi)


def quantized_to_obj(p: QuantizedCycle) -> dict:
    lat = p.lattice
    out = {"n": lat.n, "k": lat.k, "mode": RATIONAL}
    out["theta"] = [{"i": list(i), "w": num(w)} for i, w in sorted(p.weights().items())]
    out["eps"] = num(lat.eps)
    out["eps_hat"] = f"{lat.eps_hat.numerator}/{lat.eps_hat.denominator}"
    out["m"] = [v for _, v in p.m]
    return out


def quantized_from_obj(obj: dict) -> QuantizedCycle:
    lat = QuantLattice(int(obj["n"]), int(obj["k"]), Fraction(str(obj["eps"])))
    idx = [tuple(e["i"]) for e in obj["theta"]]
    return make_quantized(lat, dict(zip(idx, (int(v) for v in obj["m"]))))


def kappa_to_obj(est: KappaEstimate) -> dict:
    return {
        "eps": est.eps,
        "value": est.value,
        "distance": est.distance,
        "support_policy": est.support_policy,
        "support_size": est.support_size,
        "witness": cycle_to_obj(est.witness),
    }


def kappa_from_obj(obj: dict) -> KappaEstimate:
    return KappaEstimate(
        eps=float(obj["eps"]),
        value=float(obj["value"]),
        witness=cycle_from_obj(obj["witness"]),
        support_policy=obj.get("support_policy", "support"),
        distance=float(obj.get("distance", 0.0)),
        support_size=int(obj.get("support_size", 0)),
    )


def field_to_obj(fld: GridVectorField) -> dict:
    edges = [{"from": list(i), "axis": a, "f": num(f)} for (i, a), f in sorted(fld.flow.items())]
    return {"n": fld.spec.n, "k": fld.spec.k, "edges": edges}


def field_from_obj(obj: dict, mode: str = FLOAT) -> GridVectorField:
    spec = GridSpec(int(obj["n"]), int(obj["k"]))
    flow = {(tuple(e["from"]), int(e["axis"])): coerce(e["f"], mode) for e in obj["edges"]}
    return GridVectorField(spec, flow)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def loads(text: str):
    """Parse JSON, turning syntax errors into :class:`BadParams`."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadParams(f"malformed JSON: {exc}") from exc

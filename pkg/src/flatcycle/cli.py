"""Command line front end: ``flatcycle <command> ...``.

Exit codes: 0 on success, 1 when a computed invariant fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

from . import serialize as ser
from .cycles import FLOAT, MODES, RATIONAL
from .entropy import (
    BoundednessCertificate,
    CountInstance,
    count_exact,
    count_upper,
    covering_bound,
)
from .errors import FlatCycleError, SolverStall
from .generators import FAMILIES, dipoles, grid_random, harmonic
from .harness import SUITES, run_suite
from .kappa import POLICIES, SUPPORT, certify_kappa, kappa
from .quantize import deform
from .transport import DEFAULT_TOL, certify, gnorm

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _number(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    return ser.loads(text)


def _read_cycle(path: str, mode: str | None):
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise InputError("expected a JSON object describing a cycle")
    if mode is not None:
        obj = dict(obj, mode=mode)
    return ser.cycle_from_obj(obj)


def _emit(obj) -> None:
    sys.stdout.write(ser.dumps(obj) + "\n")


def cmd_gnorm(args) -> int:
    t = _read_cycle(args.file, args.mode)
    sol = gnorm(t, args.tol)
    rep = certify(t, sol, args.tol)
    out = ser.solution_to_obj(sol)
    out["certified"] = rep.passed
    _emit(out)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_gen(args) -> int:
    mode = args.mode or (RATIONAL if args.family != "dipoles" else FLOAT)
    if args.family == "dipoles":
        items = [ser.cycle_to_obj(t) for t in dipoles(args.n, args.count, args.seed, mode)]
    elif args.family == "harmonic":
        items = [ser.cycle_to_obj(harmonic(args.J, args.n, mode))]
    else:
        items = [ser.grid_cycle_to_obj(grid_random(args.n, args.k, args.atoms, args.seed + i, mode)) for i in range(args.count)]
    for obj in items:
        _emit(obj)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite == "grid92":
        params = {"samples": args.samples or 500, "n": args.n, "k": args.k}
    elif args.suite == "gnorm":
        params = {"count": args.count or 200, "tol": args.tol}
    elif args.suite == "quant94":
        params = {"samples": args.samples or 100, "pairs": args.pairs or 200}
    elif args.suite == "deform95":
        params = {"count": args.count or 50}
    elif args.suite == "kappa80":
        params = {"pairs": args.pairs or 50}
    else:
        params = {}
    rep = run_suite(args.suite, seed=args.seed, fault=args.fault, **params)
    _emit(rep.to_dict(timings=args.timings))
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_bound(args) -> int:
    cert = BoundednessCertificate(args.gamma, ((Fraction(0), args.kappa),))
    k, ln_n = covering_bound(args.n, cert, args.eps)
    _emit({"n": args.n, "Gamma": ser.num(args.gamma), "kappa": ser.num(args.kappa), "eps": ser.num(args.eps), "k": k, "ln_N": ln_n})
    return EXIT_OK


def cmd_kappa(args) -> int:
    t = _read_cycle(args.file, args.mode)
    est = kappa(t, float(args.eps), args.policy, k=args.k, tol=args.tol)
    rep = certify_kappa(t, est, args.tol)
    out = ser.kappa_to_obj(est)
    out["certified"] = rep.passed
    _emit(out)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_deform(args) -> int:
    t = _read_cycle(args.file, args.mode)
    res = deform(t, args.k, args.eps, args.tol)
    eps = float(args.eps)
    ok = res.member and (not res.condition_A or res.error < 3 * eps)
    _emit(
        {
            "P": ser.quantized_to_obj(res.P),
            "error": res.error,
            "member": res.member,
            "condition_A": res.condition_A,
            "stages": res.stages,
        }
    )
    return EXIT_OK if ok else EXIT_VIOLATION


CSV_COLUMNS = ("p", "q", "exact", "ln_exact", "bound_F", "bound_G_ln", "pass")


def _count_row(p: int, q: int, cap: int) -> dict:
    inst = CountInstance(p, q)
    res = count_exact(inst, term_cap=cap)
    bound_f, bound_g = count_upper(inst, check=False)
    ok = res.exact <= bound_f and res.ln_value <= bound_g
    return {"p": p, "q": q, "exact": res.exact, "ln_exact": res.ln_value, "bound_F": float(bound_f), "bound_G_ln": bound_g, "pass": ok}


def cmd_count(args) -> int:
    if args.sweep is not None:
        pairs = [(p, q) for p in range(1, args.sweep + 1) for q in range(1, p + 1)]
    else:
        if args.p is None or args.q is None:
            raise InputError("count needs p and q, or --sweep P")
        pairs = [(args.p, args.q)]
    rows = [_count_row(p, q, args.cap) for p, q in pairs]
    out = args.out or ("csv" if args.sweep is not None else "text")
    if out == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({**r, "ln_exact": repr(r["ln_exact"]), "bound_F": repr(r["bound_F"]), "bound_G_ln": repr(r["bound_G_ln"]), "pass": str(r["pass"]).lower()})
        sys.stdout.write(buf.getvalue())
    elif out == "json":
        for r in rows:
            _emit(r)
    else:
        for r in rows:
            sys.stdout.write(f"{r['exact']}\n")
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="duality-gap tolerance (relative)")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--mode", choices=MODES, default=None, help="arithmetic mode of parsed cycles")
    common.add_argument("--out", choices=("json", "csv", "text"), default=None)
    common.add_argument("--cap", type=int, default=10_000_000, help="size cap for enumerations and closed-form sums")

    parser = argparse.ArgumentParser(prog="flatcycle", description="Certified flat norms, quantization and entropy counts for 0-cycles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gnorm", parents=[common], help="flat norm of a cycle with certificate")
    p.add_argument("file", nargs="?", default="-")
    p.set_defaults(fn=cmd_gnorm)

    p = sub.add_parser("gen", parents=[common], help="generate instances as JSON lines")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--J", type=int, default=3)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--atoms", type=int, default=4)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--samples", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--pairs", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--fault", action="store_true", help="inject a fault (harness self-test)")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("bound", parents=[common], help="grid size and log covering number for a bounded family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma", type=_number, required=True)
    p.add_argument("--kappa", type=_number, default=Fraction(0))
    p.add_argument("--eps", type=_number, required=True)
    p.set_defaults(fn=cmd_bound)

    p = sub.add_parser("kappa", parents=[common], help="mass at scale eps")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--eps", type=_number, required=True)
    p.add_argument("--policy", choices=POLICIES, default=SUPPORT)
    p.add_argument("--k", type=int)
    p.set_defaults(fn=cmd_kappa)

    p = sub.add_parser("deform", parents=[common], help="quantize a cycle into the lattice class")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=_number, required=True)
    p.set_defaults(fn=cmd_deform)

    p = sub.add_parser("count", parents=[common], help="exact size of E(p, q)")
    p.add_argument("p", type=int, nargs="?")
    p.add_argument("q", type=int, nargs="?")
    p.add_argument("--sweep", type=int, help="all 1 <= q <= p <= SWEEP as CSV")
    p.set_defaults(fn=cmd_count)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (FlatCycleError, InputError, ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"flatcycle: {type(exc).__name__}: {exc}\n")
        return EXIT_VIOLATION if isinstance(exc, SolverStall) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

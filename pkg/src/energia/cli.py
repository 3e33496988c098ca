"""Command-line surface: parse or generate sets, run the computations,
emit deterministic JSON reports.

Reports are byte-identical for identical (command, input, seed): counts
are decimal strings, key order is sorted, and wall-time is only included
when --timing is passed.  Exit codes: 0 ok, 1 failed mandatory check,
2 parse error, 3 guard violation.
"""

import argparse
import csv
import hashlib
import json
import random
import sys
import time
from fractions import Fraction

import mpmath

from . import __version__, precision
from .bsg import CALIBRATED, SUBSET_BRANCH, kp_pipeline, kp_verify
from .checks import (
    check_csref,
    check_holder_mixed,
    check_mixed_cs,
    check_pluennecke,
    check_union_bound,
    check_war2,
    check_young,
)
from .constants import bta_eta, eric_params, gemn_params, rtp_constants, thrt_trace
from .decomposer import (
    DecomposeConfig,
    com2_budget,
    com2_simulate,
    decompose,
    minimal_adversary,
)
from .energy import ADDITIVE, MULTIPLICATIVE, energy, energy_oracle, mixed_energy
from .errors import EnergiaError, PrecisionError, TooLargeError, OverflowGuardError
from .sets import GENERATORS, IntSet, generate, iterated_product_set, iterated_sumset

_MODES = {"add": ADDITIVE, "additive": ADDITIVE, "mult": MULTIPLICATIVE, "multiplicative": MULTIPLICATIVE}


class ParseFailure(Exception):
    pass


def _read_input(path) -> IntSet:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseFailure(str(exc))
    text = text.strip()
    if not text:
        raise ParseFailure("empty input")
    try:
        if text.startswith("["):
            vals = json.loads(text)
            if not isinstance(vals, list):
                raise ParseFailure("JSON input must be an array")
            return IntSet(int(v) for v in vals)
        return IntSet(int(tok) for tok in text.split())
    except (ValueError, TypeError) as exc:
        raise ParseFailure(f"cannot parse input: {exc}")


def _digest(A: IntSet) -> str:
    return hashlib.sha256(repr(list(A)).encode()).hexdigest()[:16]


def _report(args, results, seed=None) -> dict:
    rep = {
        "schema": 1,
        "command": args._command_echo,
        "engine": __version__,
        "precision_bits": precision.precision_bits(),
        "results": results,
    }
    if seed is not None:
        rep["seed"] = seed
    if getattr(args, "timing", False):
        rep["wall_time_s"] = round(time.monotonic() - args._t0, 3)
    return rep


def _emit(args, results, seed=None):
    print(json.dumps(_report(args, results, seed), sort_keys=True, default=str))


def _check_dict(r) -> dict:
    return {
        "name": r.name,
        "lhs": str(r.lhs),
        "rhs": str(r.rhs),
        "holds": r.holds,
        "slack": str(r.slack) if r.slack is not None else None,
        "inputs": r.inputs_digest,
    }


def _write_csv(path, rows, header):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# -- subcommands -------------------------------------------------------------


def cmd_energy(args):
    A = _read_input(args.input)
    mode = _MODES[args.mode]
    e = energy(A, args.s, mode)
    results = {
        "input_digest": _digest(A),
        "count": str(e.count),
        "s": args.s,
        "mode": mode,
        "exponent": mpmath.nstr(e.exponent, 20) if e.exponent is not None else None,
    }
    if args.oracle:
        o = energy_oracle(A, args.s, mode, guard=args.guard_max_tuples)
        results["oracle_count"] = str(o.count)
        results["oracle_agrees"] = o.count == e.count
        if o.count != e.count:  # pragma: no cover - would be a library bug
            _emit(args, results)
            return 1
    _emit(args, results)
    return 0


def cmd_sumset(args):
    A = _read_input(args.input)
    if _MODES[args.mode] == ADDITIVE:
        out = iterated_sumset(A, args.m, args.n)
        values = [str(v) for v in out]
    else:
        out = iterated_product_set(A, args.m, args.n)
        values = [str(v) for v in out]
    _emit(args, {"input_digest": _digest(A), "m": args.m, "n": args.n, "size": len(out), "values": values})
    return 0


def _random_set(rng, max_size=8, lo=-50, hi=50, positive=False):
    size = rng.randint(2, max_size)
    vals = set()
    while len(vals) < size:
        v = rng.randint(1 if positive else lo, hi)
        if not positive or v > 0:
            vals.add(v)
    return IntSet(vals)


_SUITES = ("csref", "yoc", "yoc2", "mlpain", "hld3", "pr21", "zidt", "war2")


def _run_suite(name, rng, cases):
    reports = []
    for _ in range(cases):
        if name == "csref":
            A = _random_set(rng)
            reports.append(check_csref(A, rng.choice([2, 3]), ADDITIVE))
        elif name == "yoc":
            A = _random_set(rng)
            reports.extend(check_young(A, 4, rng.choice([1, 2, 3])))
        elif name == "yoc2":
            s = 2
            reports.append(check_holder_mixed([_random_set(rng, 6) for _ in range(2 * s)], ADDITIVE))
        elif name == "mlpain":
            s = 2
            reports.append(
                check_holder_mixed([_random_set(rng, 6, positive=True) for _ in range(2 * s)], MULTIPLICATIVE)
            )
        elif name == "hld3":
            A = _random_set(rng)
            elems = list(A)
            cut = rng.randint(1, len(elems) - 1)
            parts = [IntSet(elems[:cut]), IntSet(elems[cut:])]
            reports.append(check_union_bound(parts, 2, ADDITIVE))
        elif name == "pr21":
            A = _random_set(rng)
            reports.append(check_pluennecke(A, rng.choice([1, 2]), rng.choice([0, 1])))
        elif name == "zidt":
            reports.append(check_mixed_cs(_random_set(rng, 6), _random_set(rng, 6), 2, ADDITIVE))
        elif name == "war2":
            reports.append(check_war2(rng.choice([1, 2]), 2, rng.randint(4, 12)))
    return reports


def cmd_check(args):
    if args.suite != "all" and args.suite not in _SUITES:
        print(f"unknown suite {args.suite!r}", file=sys.stderr)
        return 2
    rng = random.Random(args.seed)
    suites = _SUITES if args.suite == "all" else (args.suite,)
    all_reports = []
    for name in suites:
        all_reports.extend(_run_suite(name, rng, args.cases))
    failures = [r for r in all_reports if not r.holds]
    _emit(
        args,
        {
            "suite": args.suite,
            "cases": args.cases,
            "total": len(all_reports),
            "failures": len(failures),
            "reports": [_check_dict(r) for r in all_reports],
        },
        seed=args.seed,
    )
    return 1 if failures else 0


def cmd_kp(args):
    A = _read_input(args.input)
    res = kp_pipeline(A, args.s, args.delta, mode=args.mode, energy_mode=_MODES[args.energy_mode])
    results = {
        "input_digest": _digest(A),
        "branch": res.branch,
        "nu": mpmath.nstr(res.nu, 20),
        "delta": args.delta,
        "stage_stats": {k: str(v) for k, v in res.stage_stats.items()},
        "checks": [_check_dict(c) for c in res.checks],
    }
    if res.branch == SUBSET_BRANCH:
        results["A_prime"] = [str(v) for v in res.A_prime]
        results["anchor_sum"] = str(res.anchor_sum)
        if args.verify:
            pairs = [(1, 1), (2, 1), (2, 2)]
            results["verify"] = [_check_dict(c) for c in kp_verify(res, A, pairs)]
    if args.csv:
        _write_csv(args.csv, res.trace, ("stage", "cardinality", "threshold"))
    _emit(args, results)
    return 0


def cmd_decompose(args):
    A = _read_input(args.input)
    cfg = DecomposeConfig(
        k=Fraction(str(args.k)), s=args.s, q=args.q, mode=args.mode, extractor=args.extractor
    )
    d = decompose(A, cfg)
    exp = 2 * cfg.s - cfg.k
    certs = {}
    for label, part, mode in (("B", d.B, ADDITIVE), ("C", d.C, MULTIPLICATIVE)):
        if len(part) == 0:
            certs[label] = {"count": "0", "holds": True, "size": 0}
            continue
        e = energy(part, cfg.s, mode).count
        certs[label] = {
            "count": str(e),
            "size": len(part),
            "exponent": str(exp),
            "holds": precision.cmp_count_power(e, len(part), exp) <= 0,
        }
    results = {
        "input_digest": _digest(A),
        "B": [str(v) for v in d.B],
        "C": [str(v) for v in d.C],
        "iterations_used": d.iterations_used,
        "budget": d.budget,
        "failed": d.failed,
        "certificates": certs,
        "stop_report": _check_dict(d.stop_report) if d.stop_report else None,
        "trace": [
            {"D": [str(v) for v in (D or [])], "report": _check_dict(r), "threshold": str(t)}
            for D, r, t in d.trace
        ],
    }
    if args.csv:
        _write_csv(
            args.csv,
            [(i, len(D or []), r.name, r.holds, t) for i, (D, r, t) in enumerate(d.trace)],
            ("iteration", "size", "report", "holds", "threshold"),
        )
    _emit(args, results)
    return 0 if not d.failed else 1


def cmd_constants(args):
    name = args.formula
    if name == "rtp":
        c = rtp_constants(args.k_int)
        out = {"T_k": str(c["T_k"]), "eta_k": mpmath.nstr(c["eta_k"], 30)}
    elif name == "gemn":
        g = gemn_params(Fraction(str(args.k)), args.q)
        out = {
            "Lambda": str(g["Lambda"].exact() or g["Lambda"].value()),
            "l": str(g["l"].exact() or g["l"].value()),
            "log2_m": str(g["log2_m"].exact() or g["log2_m"].value()),
            "log2_U": mpmath.nstr(g["log2_U"].value(), 30),
            "log2_s": mpmath.nstr(g["log2_s"].value(), 30),
        }
    elif name == "eric":
        e = eric_params(Fraction(str(args.b)), args.m)
        out = {
            "k": str(e["k"]),
            "log2_s2": str(e["log2_s2"].exact() or e["log2_s2"].value()),
            "log2_U1": mpmath.nstr(e["log2_U1"].value(), 30),
            "log2_s1": mpmath.nstr(e["log2_s1"].value(), 30),
        }
    elif name == "thrt":
        t = thrt_trace(args.k_int, Fraction(str(args.lambda0)), args.s)
        out = {
            "growth": str(t.growth),
            "crossing_index": t.crossing_index,
            "values": [str(v) for v in t.values],
        }
    elif name == "bta":
        b = bta_eta(precision.mpf(args.log2_s))
        out = {"k": str(b["k"]), "certificate": {k: str(v) for k, v in b["certificate"].items()}}
    elif name == "com2":
        budget = com2_budget(args.n_int, Fraction(str(args.c)), Fraction(str(args.Cc)))
        steps = com2_simulate(
            args.n_int, Fraction(str(args.c)), Fraction(str(args.Cc)),
            minimal_adversary(Fraction(str(args.c)), Fraction(str(args.Cc))),
        )
        out = {"budget": budget, "simulated": steps, "within_budget": steps <= budget}
    else:  # pragma: no cover - argparse restricts choices
        return 2
    _emit(args, {"formula": name, "values": out})
    return 0


def cmd_gen(args):
    params = {}
    for key in ("start", "step", "ratio", "k", "n"):
        v = getattr(args, f"g_{key}", None)
        if v is not None:
            params[key] = v
    try:
        A = generate(args.kind, **params)
    except TypeError as exc:
        raise ParseFailure(str(exc))
    print(json.dumps([int(v) for v in A]))
    return 0


def cmd_experiment(args):
    name = args.name
    if name == "warren-squares":
        r = check_war2(2, 2, 20)
        results = {"experiment": name, "report": _check_dict(r)}
        ok = r.holds
    elif name == "ap-gp-mix":
        A = IntSet(list(range(1, 33)) + [3**i for i in range(16)])
        cfg = DecomposeConfig(k=Fraction(6, 5), s=2, q=4, mode=CALIBRATED)
        d = decompose(A, cfg)
        exp = Fraction(14, 5)
        eb = energy(d.B, 2, ADDITIVE).count if len(d.B) else 0
        mc = energy(d.C, 2, MULTIPLICATIVE).count if len(d.C) else 0
        ok = (
            d.iterations_used <= d.budget
            and (eb == 0 or precision.cmp_count_power(eb, len(d.B), exp) <= 0)
            and (mc == 0 or precision.cmp_count_power(mc, len(d.C), exp) <= 0)
        )
        results = {
            "experiment": name,
            "B_size": len(d.B),
            "C_size": len(d.C),
            "iterations_used": d.iterations_used,
            "budget": d.budget,
            "E2_B": str(eb),
            "M2_C": str(mc),
            "holds": ok,
        }
    elif name == "zero-obstruction":
        A = IntSet(range(0, 11))
        cross = mixed_energy([A, A, A, A], MULTIPLICATIVE).count
        try:
            check_holder_mixed([A, A, A, A], MULTIPLICATIVE)
            guard_fired = False
        except EnergiaError:
            guard_fired = True
        ok = cross >= 121 and guard_fired
        results = {
            "experiment": name,
            "mixed_mult_energy": str(cross),
            "guard_fired": guard_fired,
            "holds": ok,
        }
    else:
        print(f"unknown experiment {name!r}", file=sys.stderr)
        return 2
    _emit(args, results)
    return 0 if ok else 1


# -- argument wiring ---------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="energia", description=__doc__)
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_input(sp):
        sp.add_argument("input", nargs="?", default="-", help="file of integers or '-' for stdin")

    sp = sub.add_parser("energy")
    add_input(sp)
    sp.add_argument("--s", type=int, default=2)
    sp.add_argument("--mode", choices=sorted(_MODES), default="add")
    sp.add_argument("--oracle", action="store_true", help="cross-check against brute force")
    sp.add_argument("--guard-max-tuples", type=int, default=10**8, dest="guard_max_tuples")
    sp.set_defaults(fn=cmd_energy)

    sp = sub.add_parser("sumset")
    add_input(sp)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--mode", choices=sorted(_MODES), default="add")
    sp.set_defaults(fn=cmd_sumset)

    sp = sub.add_parser("check")
    sp.add_argument("--suite", default="all")
    sp.add_argument("--cases", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("kp")
    add_input(sp)
    sp.add_argument("--s", type=int, default=4)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--mode", choices=("paper", "calibrated"), default="calibrated")
    sp.add_argument("--energy-mode", choices=sorted(_MODES), default="add", dest="energy_mode")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--csv", help="write the stage trace to this CSV file")
    sp.set_defaults(fn=cmd_kp)

    sp = sub.add_parser("decompose")
    add_input(sp)
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--s", type=int, default=2)
    sp.add_argument("--q", type=int, default=4)
    sp.add_argument("--mode", choices=("paper", "calibrated"), default="calibrated")
    sp.add_argument("--extractor", default="kp-multiplicative")
    sp.add_argument("--csv", help="write the extraction trace to this CSV file")
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("constants")
    sp.add_argument("formula", choices=("rtp", "gemn", "eric", "thrt", "bta", "com2"))
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--k-int", type=int, default=2, dest="k_int")
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--b", type=float, default=30.0)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--s", type=int, default=8)
    sp.add_argument("--lambda0", type=float, default=0.5)
    sp.add_argument("--log2-s", type=float, default=64.0, dest="log2_s")
    sp.add_argument("--n-int", type=int, default=16, dest="n_int")
    sp.add_argument("--c", type=float, default=0.5)
    sp.add_argument("--Cc", type=float, default=1.0)
    sp.set_defaults(fn=cmd_constants)

    sp = sub.add_parser("gen")
    sp.add_argument("kind", choices=sorted(GENERATORS))
    sp.add_argument("--start", type=int, dest="g_start")
    sp.add_argument("--step", type=int, dest="g_step")
    sp.add_argument("--ratio", type=int, dest="g_ratio")
    sp.add_argument("--k", type=int, dest="g_k")
    sp.add_argument("--n", type=int, dest="g_n")
    sp.set_defaults(fn=cmd_gen)

    sp = sub.add_parser("experiment")
    sp.add_argument("name", choices=("warren-squares", "ap-gp-mix", "zero-obstruction"))
    sp.set_defaults(fn=cmd_experiment)

    return p


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._command_echo = " ".join(["energia"] + argv)
    args._t0 = time.monotonic()
    try:
        return args.fn(args)
    except ParseFailure as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (TooLargeError, OverflowGuardError, PrecisionError) as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return 3
    except EnergiaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

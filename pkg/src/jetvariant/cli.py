"""``jetvariant`` command line.

Every command prints a plain table; ``--json`` prints a single JSON object
instead, always carrying ``schema_version`` (currently 1) and ``command``.
Expressions inside JSON are canonical strings that reparse to the same value
in the scenario's context.

Exit status: 0 on success, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence, Tuple

from .corpus import _algebra, data_dir, run_check, run_corpus, run_scenario
from .errors import JetError
from .invariants import (
    NotInSpan,
    commutator,
    decompose_commutator,
    tresse_derivatives,
)
from .orbitdim import HilbertProfile, hilbert_function, poincare_fit
from .parse import format_expr
from .prolong import prolong_field
from .scenario import Scenario, load_scenario

SCHEMA_VERSION = 1
COMMANDS = ("check", "find", "prolong", "reduce", "tresse", "commutators", "hilbert", "poincare", "corpus")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _range(text: str) -> Tuple[int, int]:
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError("range must have lo <= hi")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("scenario", help="scenario file (JSON) or bundled case name")

    onq = argparse.ArgumentParser(add_help=False)
    onq.add_argument("--off-equation", action="store_true", help="ignore the scenario's equation")
    onq.add_argument("--generators", nargs="+", metavar="NAME", help="restrict the algebra to these fields/families")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--max-order", type=int, required=True)
    sampling.add_argument("--trials", type=int)
    sampling.add_argument("--seed", type=int)
    sampling.add_argument("--range", type=_range, metavar="LO:HI")

    p = argparse.ArgumentParser(prog="jetvariant", description="Exact differential invariants on jet spaces.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    c = sub.add_parser("check", parents=[common, scen, onq], help="run one check, or all checks in a scenario")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--invariant", metavar="EXPR")
    mode.add_argument("--symmetry", action="store_true", help="every generator preserves the equation")
    mode.add_argument("--first-integral", metavar="EXPR")
    mode.add_argument("--derivation", metavar="NAME")
    mode.add_argument("--operator", metavar="NAME")
    mode.add_argument("--id", metavar="CHECK", help="run the scenario check with this id")
    c.add_argument("--probes", nargs="+", metavar="EXPR")
    c.add_argument("--order", type=int)
    c.add_argument("--fast", action="store_true", help="skip extended checks")

    f = sub.add_parser("find", parents=[common, scen, onq], help="invariants of the form poly/den by linear algebra")
    f.add_argument("--order", type=int, required=True)
    f.add_argument("--num-degree", type=int, required=True)
    f.add_argument("--den", default="1", metavar="EXPR")
    f.add_argument("--variables", nargs="+", metavar="NAME")

    pr = sub.add_parser("prolong", parents=[common, scen], help="prolonged coefficients of the generators")
    pr.add_argument("--max-order", type=int, required=True)
    pr.add_argument("--field", action="append", metavar="NAME")

    r = sub.add_parser("reduce", parents=[common, scen], help="normal forms modulo the equation")
    r.add_argument("exprs", nargs="+", metavar="EXPR")
    r.add_argument("--max-order", type=int)

    t = sub.add_parser("tresse", parents=[common, scen], help="Tresse derivatives of n functions")
    t.add_argument("--functions", nargs="+", required=True, metavar="EXPR")
    t.add_argument("--off-equation", action="store_true")

    cm = sub.add_parser("commutators", parents=[common, scen], help="pairwise commutators of named derivations")
    cm.add_argument("--derivations", nargs="+", metavar="NAME")
    cm.add_argument("--off-equation", action="store_true")

    for name, extra in (("hilbert", "Hilbert profile by exact rank"), ("poincare", "rational fit of the Poincare series")):
        h = sub.add_parser(name, parents=[common, scen, onq, sampling], help=extra)
        if name == "poincare":
            h.add_argument("--tail", type=int, default=2)

    co = sub.add_parser("corpus", parents=[common], help="run the bundled example corpus")
    co.add_argument("--filter", metavar="PATTERN")
    co.add_argument("--fast", action="store_true")
    co.add_argument("--jobs", type=int, default=1)
    return p


# -- helpers --------------------------------------------------------------------


def _fmt(scen: Scenario, f) -> str:
    return format_expr(f, scen.ctx)


def _base_check(args, kind: str, **kw) -> dict:
    c = {"id": kind, "kind": kind, **kw}
    if getattr(args, "off_equation", False):
        c["on_equation"] = False
    if getattr(args, "generators", None):
        c["generators"] = args.generators
    if getattr(args, "order", None) is not None:
        c["order"] = args.order
    return c


def _status_code(rows: Sequence[dict]) -> int:
    return EXIT_FAIL if any(r["status"] == "FAIL" for r in rows) else EXIT_OK


def _rows_table(rows: Sequence[dict], prefix: str = "") -> List[str]:
    out = []
    for r in rows:
        line = f"{prefix}{r['status']:4s}  {r['id']}"
        if r.get("detail"):
            line += f"  ({r['detail']})"
        out.append(line)
    return out


# -- commands -------------------------------------------------------------------


def cmd_check(args, scen: Scenario):
    if args.id:
        found = [c for c in scen.checks if c.get("id") == args.id]
        if not found:
            raise InputError(f"no check with id {args.id!r}")
        rows = [run_check(scen, found[0], args.fast)]
    elif args.invariant:
        rows = [run_check(scen, _base_check(args, "invariant", expr=args.invariant))]
    elif args.symmetry:
        rows = [run_check(scen, _base_check(args, "symmetry"))]
    elif args.first_integral:
        rows = [run_check(scen, _base_check(args, "first_integral", expr=args.first_integral))]
    elif args.derivation or args.operator:
        if not args.probes:
            raise InputError("--probes is required")
        if args.derivation:
            c = _base_check(args, "derivation_invariant", derivation=args.derivation, probes=args.probes)
        else:
            c = _base_check(args, "operator_commutes", operator=args.operator, probes=args.probes)
        rows = [run_check(scen, c)]
    else:
        rows = run_scenario(scen, args.fast)["checks"]
    report = {"scenario": scen.name, "checks": rows}
    return report, _rows_table(rows), _status_code(rows)


def cmd_find(args, scen: Scenario):
    c = _base_check(args, "find", degree=args.num_degree, denominator=args.den)
    if args.variables:
        c["variables"] = args.variables
    row = run_check(scen, c)
    res = row.get("result", {})
    lines = [f"dimension {res.get('dimension', 0)}"] + [f"  {b}" for b in res.get("basis", [])]
    if row["status"] == "FAIL":
        lines.insert(0, f"FAIL  {row.get('detail', '')}")
    return {"scenario": scen.name, **res, "status": row["status"]}, lines, _status_code([row])


def cmd_prolong(args, scen: Scenario):
    k = args.max_order
    gens = scen.algebra.generators(k)
    if args.field:
        gens = [scen.field_named(n) for n in args.field]
    out, lines = [], []
    for X in gens:
        Xk = prolong_field(X, k, scen.ctx)
        coeffs = {scen.ctx.name(v): _fmt(scen, c) for v, c in Xk.items()}
        out.append({"field": X.name, "coefficients": coeffs})
        lines.append(f"{X.name}:")
        lines += [f"  {v}: {c}" for v, c in coeffs.items()]
    return {"scenario": scen.name, "order": k, "fields": out}, lines, EXIT_OK


def cmd_reduce(args, scen: Scenario):
    if scen.equation is None:
        raise InputError("scenario has no equation")
    exprs = [scen.expr(e) for e in args.exprs]
    k = args.max_order
    if k is None:
        k = max([scen.equation.order] + [e.max_order() for e in exprs])
    table = scen.equation.table(k)
    out = [{"input": src, "normal_form": _fmt(scen, table.reduce(e))} for src, e in zip(args.exprs, exprs)]
    return {"scenario": scen.name, "order": k, "results": out}, [f"{o['input']}  ->  {o['normal_form']}" for o in out], EXIT_OK


def cmd_tresse(args, scen: Scenario):
    eq = None if args.off_equation else scen.equation
    fs = [scen.expr(f) for f in args.functions]
    ders = tresse_derivatives(fs, scen.ctx, eq)
    out = [[_fmt(scen, c) for c in d.coeffs] for d in ders]
    names = list(scen.ctx.independents)
    lines = []
    for src, coeffs in zip(args.functions, out):
        terms = " + ".join(f"({c})*D_{n}" for c, n in zip(coeffs, names) if c != "0") or "0"
        lines.append(f"d/d[{src}] = {terms}")
    return {"scenario": scen.name, "functions": args.functions, "derivations": out}, lines, EXIT_OK


def cmd_commutators(args, scen: Scenario):
    eq = None if args.off_equation else scen.equation
    names = args.derivations or sorted(scen.derivations)
    for n in names:
        if n not in scen.derivations:
            raise InputError(f"unknown derivation {n!r}")
    basis = [scen.derivations[n] for n in names]
    out, lines = [], []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            c = commutator(scen.derivations[a], scen.derivations[b], eq)
            rho = decompose_commutator(c, basis, eq)
            dec = "not_in_span" if isinstance(rho, NotInSpan) else [_fmt(scen, x) for x in rho]
            out.append({"a": a, "b": b, "commutator": [_fmt(scen, x) for x in c.coeffs], "decomposition": dec})
            text = dec if isinstance(dec, str) else " + ".join(f"({x})*{n}" for x, n in zip(dec, names) if x != "0") or "0"
            lines.append(f"[{a}, {b}] = {text}")
    return {"scenario": scen.name, "basis": names, "commutators": out}, lines, EXIT_OK


def _profile(args, scen: Scenario) -> HilbertProfile:
    s = scen.sampling
    c = _base_check(args, "hilbert")
    eq = None if args.off_equation else scen.equation
    return hilbert_function(
        _algebra(scen, c), eq, args.max_order,
        args.trials if args.trials is not None else s.trials,
        args.seed if args.seed is not None else s.seed,
        args.range if args.range is not None else s.range,
        s.exclude,
    )


def cmd_hilbert(args, scen: Scenario):
    prof = _profile(args, scen)
    lines = [
        "d:     " + " ".join(map(str, prof.d)),
        "orbit: " + " ".join(map(str, prof.orbit)),
        "dim:   " + " ".join(map(str, prof.dims)),
    ]
    return {"scenario": scen.name, **prof.as_dict()}, lines, EXIT_OK


def cmd_poincare(args, scen: Scenario):
    prof = _profile(args, scen)
    fit = poincare_fit(prof, tail=args.tail)
    lines = ["d:      " + " ".join(map(str, prof.d)), f"status: {fit.status}"]
    if fit.status == "fits":
        lines += [f"degree: {fit.d}", "R:      " + " ".join(map(str, fit.R))]
    return {"scenario": scen.name, "profile": prof.d, **fit.as_dict()}, lines, EXIT_OK


def cmd_corpus(args):
    report = run_corpus(args.filter, args.fast, jobs=args.jobs)
    lines = []
    for case in report["cases"]:
        lines.append(case["name"])
        lines += _rows_table(case["checks"], "  ")
    s = report["summary"]
    lines.append(f"pass {s['pass']}  fail {s['fail']}  skip {s['skip']}")
    return report, lines, EXIT_FAIL if s["fail"] else EXIT_OK


HANDLERS = {
    "check": cmd_check, "find": cmd_find, "prolong": cmd_prolong, "reduce": cmd_reduce,
    "tresse": cmd_tresse, "commutators": cmd_commutators, "hilbert": cmd_hilbert, "poincare": cmd_poincare,
}


def _resolve(name: str) -> str:
    """A path that exists wins; otherwise try the bundled case of that name."""
    if os.path.exists(name):
        return name
    bundled = data_dir() / f"{name}.json"
    return str(bundled) if bundled.exists() else name


def dispatch(args) -> Tuple[dict, List[str], int]:
    if args.command == "corpus":
        report, lines, code = cmd_corpus(args)
    else:
        scen = load_scenario(_resolve(args.scenario))
        report, lines, code = HANDLERS[args.command](args, scen)
        report = {"schema_version": SCHEMA_VERSION, "command": args.command, **report}
    report.setdefault("schema_version", SCHEMA_VERSION)
    return report, lines, code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, lines, code = dispatch(args)
    except (JetError, InputError, OSError, KeyError, ValueError) as exc:
        msg = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
        if args.json:
            print(json.dumps({"schema_version": SCHEMA_VERSION, "command": args.command,
                              "error": {"type": type(exc).__name__, "message": msg}}, sort_keys=True))
        print(f"jetvariant: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())

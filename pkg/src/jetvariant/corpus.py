"""Golden cases: bundled scenario files whose ``checks`` are run against the engine.

Every check has an ``id``, a ``kind``, a ``provenance`` tag (PAPER, DERIVED
or TRIVIAL) and optionally ``extended: true`` (skipped by ``--fast``).
"""

from __future__ import annotations

import fnmatch
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, List, Optional

from .equation import is_symmetry
from .errors import ExpressionSyntaxError, JetError, NonIntegerExponent, SchemaError, UnknownVariable
from .invariants import (
    Ansatz,
    LieAlgebraSpec,
    NotInSpan,
    apply_derivation,
    check_first_integral,
    check_operator_commutes,
    commutator,
    decompose_commutator,
    find_invariants_linear,
    is_invariant,
    tresse_derivatives,
    verify_invariant_derivation,
)
from .linalg import bareiss_rank
from .orbitdim import generic_orbit_dimension, hilbert_function, poincare_fit
from .parse import format_expr
from .prolong import prolong_point_map, pullback
from .ratfun import ONE, RatFun, _common_den, _lift
from .scenario import Scenario, load_scenario

PROVENANCE = ("PAPER", "DERIVED", "TRIVIAL")


def data_dir() -> Path:
    return Path(str(resources.files("jetvariant") / "data"))


def corpus_files() -> List[Path]:
    return sorted(data_dir().glob("*.json"))


def _fmt(scen: Scenario, f: RatFun) -> str:
    return format_expr(f, scen.ctx)


def _algebra(scen: Scenario, check: dict) -> LieAlgebraSpec:
    names = check.get("generators")
    if names is None:
        return scen.algebra
    fields = [X for X in scen.algebra.fields + scen.auxiliary if X.name in names]
    fams = [F for F in scen.algebra.families if F.name in names]
    missing = set(names) - {X.name for X in fields} - {F.name for F in fams}
    if missing:
        raise SchemaError(f"unknown generators {sorted(missing)}")
    return LieAlgebraSpec(scen.ctx, fields, fams)


def _eq(scen: Scenario, check: dict):
    return scen.equation if check.get("on_equation", True) else None


def _order(check: dict, *exprs: RatFun) -> int:
    if "order" in check:
        return int(check["order"])
    return max([max(e.max_order(), 0) for e in exprs] or [0])


def _result(ok: bool, detail: str = "", **extra) -> dict:
    out = {"ok": bool(ok), "detail": detail}
    out.update(extra)
    return out


def _residue_detail(scen: Scenario, res) -> dict:
    if res.ok:
        return {}
    out = {"generator": res.generator}
    if res.residue is not None:
        out["residue"] = _fmt(scen, res.residue)
    return out


# -- check kinds ---------------------------------------------------------------


def _chk_invariant(scen: Scenario, c: dict) -> dict:
    f = scen.expr(c["expr"])
    res = is_invariant(_algebra(scen, c), f, _eq(scen, c), _order(c, f))
    expect = c.get("expect", True)
    return _result(res.ok == expect, "" if res.ok else (res.detail or "nonzero residue"),
                   invariant=res.ok, **_residue_detail(scen, res))


def _chk_symmetry(scen: Scenario, c: dict) -> dict:
    if scen.equation is None:
        raise SchemaError("symmetry check needs an equation")
    g = _algebra(scen, c)
    failing = [X.name for X in g.generators(int(c.get("order", 0))) if not is_symmetry(X, scen.equation, scen.ctx)]
    expect = c.get("expect", True)
    return _result((not failing) == expect, "", failing=failing)


def _chk_map_fixes(scen: Scenario, c: dict) -> dict:
    f = scen.expr(c["expr"])
    k = _order(c, f)
    img = pullback(f, prolong_point_map(scen.maps[c["map"]], k, scen.ctx))
    fixed = img == f
    return _result(fixed == c.get("expect", True), "", fixed=fixed, image=_fmt(scen, img))


def _chk_map_sign(scen: Scenario, c: dict) -> dict:
    """``N * S^e`` picks up the factor ``sign`` when ``S`` is fixed and ``N -> sign * N``."""
    num = scen.expr(c["numerator"])
    rad = scen.expr(c["radicand"])
    k = _order(c, num, rad)
    phi = prolong_point_map(scen.maps[c["map"]], k, scen.ctx)
    sign = int(c["sign"])
    rad_fixed = pullback(rad, phi) == rad
    num_img = pullback(num, phi)
    ok = rad_fixed and num_img == num * sign
    return _result(ok, "" if ok else "radicand not fixed or numerator sign differs",
                   radicand_fixed=rad_fixed, numerator_image=_fmt(scen, num_img))


def _chk_first_integral(scen: Scenario, c: dict) -> dict:
    f = scen.expr(c["expr"])
    res = check_first_integral(f, scen.equation, scen.ctx, c.get("order"))
    expect = c.get("expect", True)
    extra = {} if res.ok else {"direction": res.generator, "residue": _fmt(scen, res.residue)}
    return _result(res.ok == expect, "", first_integral=res.ok, **extra)


def _chk_reduces_to_zero(scen: Scenario, c: dict) -> dict:
    f = scen.expr(c["expr"])
    table = scen.equation.table(max(_order(c, f), scen.equation.order))
    r = table.reduce(f)
    ok = r.is_zero() == c.get("expect", True)
    return _result(ok, "", reduced=_fmt(scen, r))


def _chk_hilbert(scen: Scenario, c: dict) -> dict:
    s = scen.sampling
    prof = hilbert_function(_algebra(scen, c), _eq(scen, c), int(c["max_order"]),
                            int(c.get("trials", s.trials)), int(c.get("seed", s.seed)), s.range, s.exclude)
    ok = prof.d == list(c["expect"])
    return _result(ok, "", profile=prof.d, orbit=prof.orbit, dims=prof.dims)


def _chk_poincare(scen: Scenario, c: dict) -> dict:
    s = scen.sampling
    prof = hilbert_function(_algebra(scen, c), _eq(scen, c), int(c["max_order"]),
                            int(c.get("trials", s.trials)), int(c.get("seed", s.seed)), s.range, s.exclude)
    fit = poincare_fit(prof)
    ok = fit.status == c["expect_status"]
    if ok and "expect_d" in c:
        ok = fit.d == c["expect_d"]
    if ok and "expect_R" in c:
        ok = fit.R == list(c["expect_R"])
    return _result(ok, "", profile=prof.d, fit=fit.as_dict())


def _chk_orbit_dimension(scen: Scenario, c: dict) -> dict:
    s = scen.sampling
    dim = generic_orbit_dimension(_algebra(scen, c), int(c["order"]), _eq(scen, c),
                                  int(c.get("trials", s.trials)), int(c.get("seed", s.seed)), s.range, s.exclude)
    return _result(dim == int(c["expect"]), "", orbit_dimension=dim)


def _span_rank(elems: List[RatFun]) -> int:
    """Rank over Q of ``elems``, via numerators over one common denominator."""
    elems = [e for e in elems if not e.is_zero()]
    if not elems:
        return 0
    dc, dm, df = elems[0].dc, elems[0].dm, dict(elems[0].df)
    for e in elems[1:]:
        dc, dm, df = _common_den(RatFun._parts(ONE.num, dc, dm, df), e)
    polys = [_lift(e, dc, dm, df) for e in elems]
    monos = sorted({m for p in polys for m in p.terms})
    return bareiss_rank([[Fraction(p.terms.get(m, 0)) for m in monos] for p in polys])


def _chk_find(scen: Scenario, c: dict) -> dict:
    q = scen.expr(str(c.get("denominator", "1")))
    variables = None
    if "variables" in c:
        variables = tuple(scen.ctx.lookup(v) for v in c["variables"])
    ans = Ansatz(int(c["order"]), int(c["degree"]), q, variables)
    eq = _eq(scen, c)
    basis = find_invariants_linear(_algebra(scen, c), ans, eq)
    out = {"basis": [_fmt(scen, b) for b in basis], "dimension": len(basis)}
    sound = all(is_invariant(_algebra(scen, c), b, eq, ans.order).ok for b in basis)
    ok = sound
    if "expect_dim" in c:
        ok = ok and len(basis) == int(c["expect_dim"])
    if "expect_span" in c:
        expected = [scen.expr(e) for e in c["expect_span"]]
        r_b = _span_rank(basis)
        r_e = _span_rank(expected)
        r_all = _span_rank(basis + expected)
        ok = ok and r_b == r_e == r_all == len(basis)
    return _result(ok, "" if sound else "a basis element fails invariance", **out)


def _chk_derivation_invariant(scen: Scenario, c: dict) -> dict:
    nabla = scen.derivations[c["derivation"]]
    probes = [scen.expr(p) for p in c["probes"]]
    res = verify_invariant_derivation(nabla, _algebra(scen, c), probes, _eq(scen, c), c.get("order"))
    expect = c.get("expect", True)
    return _result(res.ok == expect, res.detail, passes=res.ok, **_residue_detail(scen, res))


def _chk_operator_commutes(scen: Scenario, c: dict) -> dict:
    op = scen.operators[c["operator"]]
    probes = [scen.expr(p) for p in c["probes"]]
    res = check_operator_commutes(op, _algebra(scen, c), probes, _eq(scen, c), int(c.get("order", 0)))
    expect = c.get("expect", True)
    return _result(res.ok == expect, res.detail, commutes=res.ok, **_residue_detail(scen, res))


def _chk_tresse(scen: Scenario, c: dict) -> dict:
    fs = [scen.expr(f) for f in c["functions"]]
    eq = _eq(scen, c)
    ders = tresse_derivatives(fs, scen.ctx, eq)
    dual = all(
        apply_derivation(d, f, eq) == (ONE if i == j else RatFun.const(0))
        for i, d in enumerate(ders) for j, f in enumerate(fs)
    )
    comm = all(commutator(a, b, eq).is_zero() for a in ders for b in ders)
    coeffs = [[_fmt(scen, x) for x in d.coeffs] for d in ders]
    return _result(dual and comm, "", duality=dual, commuting=comm, coefficients=coeffs)


def _chk_commutator(scen: Scenario, c: dict) -> dict:
    eq = _eq(scen, c)
    com = commutator(scen.derivations[c["a"]], scen.derivations[c["b"]], eq)
    out = {"commutator": [_fmt(scen, x) for x in com.coeffs]}
    ok = True
    if "expect" in c:
        ok = all(x == scen.expr(e) for x, e in zip(com.coeffs, c["expect"]))
    if "basis" in c:
        basis = [scen.derivations[b] for b in c["basis"]]
        rho = decompose_commutator(com, basis, eq)
        if isinstance(rho, NotInSpan):
            out["decomposition"] = "not_in_span"
            ok = ok and c.get("expect_decomposition") == "not_in_span"
        else:
            out["decomposition"] = [_fmt(scen, x) for x in rho]
            want = c.get("expect_decomposition")
            if want is not None:
                ok = ok and want != "not_in_span" and all(x == scen.expr(e) for x, e in zip(rho, want))
    return _result(ok, "", **out)


def _chk_decompose(scen: Scenario, c: dict) -> dict:
    eq = _eq(scen, c)
    target = scen.derivations[c["derivation"]]
    rho = decompose_commutator(target, [scen.derivations[b] for b in c["basis"]], eq)
    want = c.get("expect")
    if isinstance(rho, NotInSpan):
        return _result(want == "not_in_span", "", decomposition="not_in_span")
    ok = want != "not_in_span" and (want is None or all(x == scen.expr(e) for x, e in zip(rho, want)))
    return _result(ok, "", decomposition=[_fmt(scen, x) for x in rho])


CHECKS: Dict[str, Callable[[Scenario, dict], dict]] = {
    "invariant": _chk_invariant,
    "symmetry": _chk_symmetry,
    "map_fixes": _chk_map_fixes,
    "map_sign": _chk_map_sign,
    "first_integral": _chk_first_integral,
    "reduces_to_zero": _chk_reduces_to_zero,
    "hilbert": _chk_hilbert,
    "poincare": _chk_poincare,
    "orbit_dimension": _chk_orbit_dimension,
    "find": _chk_find,
    "derivation_invariant": _chk_derivation_invariant,
    "operator_commutes": _chk_operator_commutes,
    "tresse": _chk_tresse,
    "commutator": _chk_commutator,
    "decompose": _chk_decompose,
}


def run_check(scen: Scenario, check: dict, fast: bool = False) -> dict:
    row = {
        "id": check.get("id", check["kind"]),
        "kind": check["kind"],
        "provenance": check.get("provenance", "DERIVED"),
    }
    if row["provenance"] not in PROVENANCE:
        raise SchemaError(f"check {row['id']!r}: bad provenance {row['provenance']!r}")
    if fast and check.get("extended"):
        row["status"] = "SKIP"
        row["detail"] = "extended check skipped in fast mode"
        return row
    fn = CHECKS.get(check["kind"])
    if fn is None:
        raise SchemaError(f"check {row['id']!r}: unknown kind {check['kind']!r}")
    try:
        res = fn(scen, check)
    except (KeyError, SchemaError, ExpressionSyntaxError, UnknownVariable, NonIntegerExponent) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        raise SchemaError(f"check {row['id']!r}: {msg}") from None
    except JetError as exc:
        res = _result(False, f"{type(exc).__name__}: {exc}")
    row["status"] = "PASS" if res.pop("ok") else "FAIL"
    detail = res.pop("detail", "")
    if detail:
        row["detail"] = detail
    row["result"] = res
    return row


def run_scenario(scen: Scenario, fast: bool = False) -> dict:
    rows = [run_check(scen, c, fast) for c in scen.checks]
    return {"name": scen.name, "checks": rows}


def run_corpus(pattern: Optional[str] = None, fast: bool = False, files: Optional[List[Path]] = None, jobs: int = 1) -> dict:
    """Run every bundled case whose name contains (or glob-matches) ``pattern``."""
    paths = files if files is not None else corpus_files()
    scens = [load_scenario(p) for p in paths]
    if pattern:
        scens = [s for s in scens if pattern in s.name or fnmatch.fnmatch(s.name, pattern)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            cases = list(pool.map(lambda s: run_scenario(s, fast), scens))
    else:
        cases = [run_scenario(s, fast) for s in scens]
    counts = {"PASS": 0, "FAIL": 0, "SKIP": 0}
    for case in cases:
        for row in case["checks"]:
            counts[row["status"]] += 1
    return {
        "schema_version": 1,
        "command": "corpus",
        "fast": fast,
        "cases": cases,
        "summary": {"pass": counts["PASS"], "fail": counts["FAIL"], "skip": counts["SKIP"]},
    }

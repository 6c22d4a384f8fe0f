"""Scenario files: JSON documents declaring a context, an algebra, an equation and named data.

Top-level keys (all optional except ``context``)::

    name, description
    context      {independents: [..], dependents: [..], aliases: {template: target}}
    fields       [{name, alpha: [expr], beta: [expr], auxiliary: bool}]
                 (auxiliary fields are addressable by name but not part of the algebra)
    families     [{name, pattern, params}]
    equation     [{lead, rhs}]
    equation_mode "differential" | "pointwise";  point {independent: value}
    expressions  {name: expr | {derivative: name, direction: x} | {apply: derivation, to: name}}
    derivations  {name: {coefficients: [expr], modulo: [name]}}
    operators    {name: {terms: [{index: [independent, ...], coefficient: expr}]}}
    maps         {name: {independents: [expr], dependents: [expr]}}
    sampling     {seed, trials, range: [lo, hi], exclude: [expr]}
    checks       [{id, kind, ...}]   (consumed by the corpus runner)

Expressions may refer to previously declared expressions by name.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .equation import DIFFERENTIAL, POINTWISE, SolvedEquation
from .errors import ExpressionSyntaxError, JetError, NonIntegerExponent, OrthonomicityError, SchemaError, UnknownVariable
from .invariants import (
    Derivation,
    FamilySpec,
    LieAlgebraSpec,
    TotalDifferentialOperator,
    apply_derivation,
    instantiate_family,
)
from .jet import JetContext, total_derivative
from .parse import parse
from .prolong import PointMap, PointVectorField
from .ratfun import RatFun

KNOWN_KEYS = {
    "name", "description", "context", "fields", "families", "equation", "equation_mode", "point",
    "expressions", "derivations", "operators", "maps", "sampling", "checks",
}


class ScenarioError(SchemaError):
    """Schema or expression error located in a scenario file."""


@dataclass(eq=False)
class Sampling:
    seed: int = 1
    trials: int = 8
    range: Tuple[int, int] = (-10, 10)
    exclude: List[RatFun] = field(default_factory=list)


@dataclass(eq=False)
class Scenario:
    name: str
    ctx: JetContext
    algebra: LieAlgebraSpec
    equation: Optional[SolvedEquation] = None
    expressions: Dict[str, RatFun] = field(default_factory=dict)
    derivations: Dict[str, Derivation] = field(default_factory=dict)
    operators: Dict[str, TotalDifferentialOperator] = field(default_factory=dict)
    maps: Dict[str, PointMap] = field(default_factory=dict)
    sampling: Sampling = field(default_factory=Sampling)
    checks: List[dict] = field(default_factory=list)
    auxiliary: List[PointVectorField] = field(default_factory=list)
    description: str = ""
    source: str = "<scenario>"

    @property
    def fields(self) -> List[PointVectorField]:
        return self.algebra.fields

    @property
    def families(self) -> List[FamilySpec]:
        return self.algebra.families

    def field_named(self, name: str) -> PointVectorField:
        for X in self.algebra.fields + self.auxiliary:
            if X.name == name:
                return X
        raise SchemaError(f"unknown field {name!r}")

    def expr(self, text: str) -> RatFun:
        """Parse ``text`` with the scenario's named expressions in scope."""
        if text in self.expressions:
            return self.expressions[text]
        return parse(text, self.ctx, self.expressions)


class _Loader:
    def __init__(self, raw: str, source: str):
        self.raw = raw
        self.source = source

    def fail(self, where: str, msg: str, needle: Optional[str] = None, pos: Optional[int] = None):
        line = ""
        if needle is not None:
            at = self.raw.find(json.dumps(needle))
            if at >= 0:
                line = f", line {self.raw.count(chr(10), 0, at) + 1}"
        col = f", position {pos}" if pos is not None else ""
        raise ScenarioError(f"{self.source}{line}: {where}{col}: {msg}")

    def expr(self, text: Any, ctx: JetContext, where: str, names=None) -> RatFun:
        if isinstance(text, (int, float)) and not isinstance(text, bool):
            text = str(text)
        if not isinstance(text, str):
            self.fail(where, "expected an expression string")
        try:
            return parse(text, ctx, names)
        except ExpressionSyntaxError as exc:
            self.fail(where, exc.msg, text, exc.pos)
        except (UnknownVariable, NonIntegerExponent) as exc:
            self.fail(where, str(exc), text)
        except JetError as exc:
            self.fail(where, str(exc), text)

    def load(self, data: Any) -> Scenario:
        if not isinstance(data, dict):
            self.fail("top level", "expected an object")
        unknown = set(data) - KNOWN_KEYS
        if unknown:
            self.fail("top level", f"unknown keys {sorted(unknown)}")
        c = data.get("context")
        if not isinstance(c, dict) or not isinstance(c.get("independents"), list) or not isinstance(c.get("dependents"), list):
            self.fail("context", "needs 'independents' and 'dependents' lists")
        try:
            ctx = JetContext.build(c["independents"], c["dependents"], c.get("aliases") or {})
        except SchemaError as exc:
            self.fail("context", str(exc))

        fields, aux = [], []
        for i, f in enumerate(data.get("fields", [])):
            where = f"fields[{i}]"
            if not isinstance(f, dict):
                self.fail(where, "expected an object")
            alpha = f.get("alpha", ["0"] * ctx.n)
            beta = f.get("beta", ["0"] * ctx.m)
            if len(alpha) != ctx.n or len(beta) != ctx.m:
                self.fail(where, f"alpha needs {ctx.n} and beta {ctx.m} components")
            try:
                (aux if f.get("auxiliary") else fields).append(PointVectorField(
                    tuple(self.expr(a, ctx, f"{where}.alpha") for a in alpha),
                    tuple(self.expr(b, ctx, f"{where}.beta") for b in beta),
                    str(f.get("name", f"X{i + 1}")),
                ))
            except SchemaError as exc:
                if isinstance(exc, ScenarioError):
                    raise
                self.fail(where, str(exc))

        families = []
        for i, fam in enumerate(data.get("families", [])):
            where = f"families[{i}]"
            if not isinstance(fam, dict) or "pattern" not in fam:
                self.fail(where, "needs a 'pattern'")
            spec = FamilySpec(fam["pattern"], dict(fam.get("params", {})), str(fam.get("name", f"family{i + 1}")))
            try:
                instantiate_family(spec, 0, ctx)
            except ExpressionSyntaxError as exc:
                self.fail(where, exc.msg, None, exc.pos)
            except JetError as exc:
                self.fail(where, str(exc))
            families.append(spec)
        algebra = LieAlgebraSpec(ctx, fields, families)
        names = [X.name for X in algebra.fields + aux] + [F.name for F in families]
        if len(set(names)) != len(names):
            self.fail("fields", "field and family names must be unique")

        equation = None
        mode = data.get("equation_mode", DIFFERENTIAL)
        if mode not in (DIFFERENTIAL, POINTWISE):
            self.fail("equation_mode", f"expected {DIFFERENTIAL!r} or {POINTWISE!r}", mode)
        rules = []
        for i, r in enumerate(data.get("equation", [])):
            where = f"equation[{i}]"
            if not isinstance(r, dict) or "lead" not in r or "rhs" not in r:
                self.fail(where, "needs 'lead' and 'rhs'")
            try:
                lead = ctx.lookup(r["lead"])
            except UnknownVariable as exc:
                self.fail(f"{where}.lead", str(exc), r["lead"])
            rules.append((lead, self.expr(r["rhs"], ctx, f"{where}.rhs")))
        point = []
        for name, value in (data.get("point") or {}).items():
            try:
                v = ctx.lookup(name)
            except UnknownVariable as exc:
                self.fail("point", str(exc), name)
            if not v.is_indep:
                self.fail("point", f"{name!r} is not an independent variable")
            point.append((v.index, Fraction(str(value))))
        if rules or point:
            try:
                equation = SolvedEquation(ctx, tuple(rules), mode, tuple(sorted(point)))
            except JetError as exc:
                if isinstance(exc, OrthonomicityError):
                    raise OrthonomicityError(f"{self.source}: equation: {exc}") from None
                self.fail("equation", str(exc))

        scen = Scenario(
            name=str(data.get("name", Path(self.source).stem)),
            ctx=ctx,
            algebra=algebra,
            equation=equation,
            description=str(data.get("description", "")),
            source=self.source,
            auxiliary=aux,
        )

        derivation_specs = data.get("derivations", {}) or {}
        for name, spec in (data.get("expressions", {}) or {}).items():
            where = f"expressions.{name}"
            scen.expressions[name] = self.named_expr(scen, spec, where, derivation_specs)

        for name, spec in derivation_specs.items():
            if name not in scen.derivations:
                scen.derivations[name] = self.derivation(scen, name, spec)

        for name, spec in (data.get("operators", {}) or {}).items():
            where = f"operators.{name}"
            terms = {}
            for j, t in enumerate(spec.get("terms", [])):
                idx = [0] * ctx.n
                for d in t.get("index", []):
                    if d not in ctx.independents:
                        self.fail(f"{where}.terms[{j}]", f"unknown direction {d!r}")
                    idx[ctx.independents.index(d)] += 1
                coeff = self.expr(t.get("coefficient"), ctx, f"{where}.terms[{j}]", scen.expressions)
                key = tuple(idx)
                terms[key] = terms.get(key, RatFun.const(0)) + coeff
            scen.operators[name] = TotalDifferentialOperator(terms)

        for name, spec in (data.get("maps", {}) or {}).items():
            where = f"maps.{name}"
            xs = spec.get("independents", [])
            us = spec.get("dependents", [])
            if len(xs) != ctx.n or len(us) != ctx.m:
                self.fail(where, "wrong number of components")
            scen.maps[name] = PointMap(
                tuple(self.expr(e, ctx, where, scen.expressions) for e in xs),
                tuple(self.expr(e, ctx, where, scen.expressions) for e in us),
            )

        s = data.get("sampling", {}) or {}
        rng = s.get("range", [-10, 10])
        if not (isinstance(rng, list) and len(rng) == 2 and all(isinstance(v, int) for v in rng) and rng[0] <= rng[1]):
            self.fail("sampling.range", "expected [lo, hi] integers")
        scen.sampling = Sampling(
            seed=int(s.get("seed", 1)),
            trials=int(s.get("trials", 8)),
            range=(rng[0], rng[1]),
            exclude=[self.expr(e, ctx, "sampling.exclude", scen.expressions) for e in s.get("exclude", [])],
        )
        checks = data.get("checks", [])
        if not isinstance(checks, list) or any(not isinstance(c, dict) or "kind" not in c for c in checks):
            self.fail("checks", "expected a list of objects with a 'kind'")
        scen.checks = checks
        return scen

    def derivation(self, scen: Scenario, name: str, spec: Any) -> Derivation:
        where = f"derivations.{name}"
        if not isinstance(spec, dict) or not isinstance(spec.get("coefficients"), list):
            self.fail(where, "needs a 'coefficients' list")
        coeffs = spec["coefficients"]
        if len(coeffs) != scen.ctx.n:
            self.fail(where, f"needs {scen.ctx.n} coefficients")
        modulo = []
        for other in spec.get("modulo", []):
            if other not in scen.derivations:
                self.fail(where, f"modulo refers to unknown derivation {other!r}")
            modulo.append(scen.derivations[other])
        return Derivation(
            tuple(self.expr(c, scen.ctx, where, scen.expressions) for c in coeffs), tuple(modulo), name
        )

    def named_expr(self, scen: Scenario, spec: Any, where: str, derivation_specs) -> RatFun:
        ctx = scen.ctx
        if isinstance(spec, dict):
            if "derivative" in spec:
                base = spec["derivative"]
                if base not in scen.expressions:
                    self.fail(where, f"unknown expression {base!r}")
                d = spec.get("direction")
                if d not in ctx.independents:
                    self.fail(where, f"unknown direction {d!r}")
                return total_derivative(scen.expressions[base], ctx.independents.index(d))
            if "apply" in spec:
                dname = spec["apply"]
                if dname not in scen.derivations:
                    if dname not in derivation_specs:
                        self.fail(where, f"unknown derivation {dname!r}")
                    scen.derivations[dname] = self.derivation(scen, dname, derivation_specs[dname])
                target = spec.get("to")
                if target not in scen.expressions:
                    self.fail(where, f"unknown expression {target!r}")
                return apply_derivation(scen.derivations[dname], scen.expressions[target], scen.equation)
            self.fail(where, "expected a string, {derivative, direction} or {apply, to}")
        return self.expr(spec, ctx, where, scen.expressions)


def load_scenario_text(raw: str, source: str = "<scenario>") -> Scenario:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}, line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return _Loader(raw, source).load(data)


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file (UTF-8 JSON).  ``OSError`` propagates."""
    p = Path(path)
    return load_scenario_text(p.read_text(encoding="utf-8"), str(p))

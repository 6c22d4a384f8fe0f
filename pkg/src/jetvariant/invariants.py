"""Invariance checks, linear invariant search, Tresse derivatives and invariant derivations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .equation import POINTWISE, ReductionTable, SolvedEquation, is_symmetry
from .errors import DegenerateJacobian, DivisionByZero, SchemaError
from .jet import JetContext, total_derivative
from .linalg import nullspace, rf_det, rf_inverse, rf_solve
from .parse import parse
from .poly import Poly, VarId, decode, var_id
from .prolong import PointVectorField, ProlongedVectorField, lie_derivative, prolong_field
from .ratfun import ONE, ZERO, RatFun, _common_den, _lift, partial

# -- algebras and families --------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    """A generator pattern with one free function, truncated per order.

    Patterns:

    * ``"function_coefficient"``: ``alpha``/``beta`` are expression strings in
      which ``symbol`` (default ``f``) stands for the free function of the
      names in ``variables``.  At order ``k`` the function runs over the
      monomials of degree ``<= k + 1``.
    * ``"hamiltonian"``: ``X_F = F_p d/dq - F_q d/dp`` for each canonical pair
      ``(q, p)`` of ``variables``, with ``F`` running over monomials of degree
      ``min_degree .. k + 1``.
    """

    pattern: str
    params: Mapping
    name: str = "family"

    def degree_bound(self, k: int) -> int:
        return int(self.params.get("max_degree", k + 1))


def _monomials(vars_: Sequence[VarId], lo: int, hi: int) -> List[RatFun]:
    out = []
    for d in range(lo, hi + 1):
        for combo in itertools.combinations_with_replacement(range(len(vars_)), d):
            term = ONE
            for c in combo:
                term = term * RatFun.var(vars_[c])
            out.append(term)
    return out


def _mono_label(m: RatFun, ctx: JetContext) -> str:
    from .parse import format_expr

    return format_expr(m, ctx)


def instantiate_family(fam: FamilySpec, k: int, ctx: JetContext) -> List[PointVectorField]:
    vars_ = [ctx.lookup(v) for v in fam.params.get("variables", [])]
    hi = fam.degree_bound(k)
    out: List[PointVectorField] = []
    if fam.pattern == "function_coefficient":
        symbol = fam.params.get("symbol", "f")
        alpha = fam.params.get("alpha", ["0"] * ctx.n)
        beta = fam.params.get("beta", ["0"] * ctx.m)
        if len(alpha) != ctx.n or len(beta) != ctx.m:
            raise SchemaError(f"family {fam.name!r}: wrong number of components")
        for mono in _monomials(vars_, 0, hi):
            names = {symbol: mono}
            out.append(PointVectorField(
                tuple(parse(a, ctx, names) for a in alpha),
                tuple(parse(b, ctx, names) for b in beta),
                f"{fam.name}[{symbol}={_mono_label(mono, ctx)}]",
            ))
    elif fam.pattern == "hamiltonian":
        if len(vars_) % 2 or any(not v.is_indep for v in vars_):
            raise SchemaError(f"family {fam.name!r}: needs pairs of independent variables")
        lo = int(fam.params.get("min_degree", 2))
        for F in _monomials(vars_, lo, hi):
            alpha = [ZERO] * ctx.n
            for q, p in zip(vars_[0::2], vars_[1::2]):
                alpha[q.index] = alpha[q.index] + partial(F, p)
                alpha[p.index] = alpha[p.index] - partial(F, q)
            out.append(PointVectorField(tuple(alpha), (ZERO,) * ctx.m, f"{fam.name}[F={_mono_label(F, ctx)}]"))
    else:
        raise SchemaError(f"unknown family pattern {fam.pattern!r}")
    return out


@dataclass(eq=False)
class LieAlgebraSpec:
    ctx: JetContext
    fields: List[PointVectorField] = field(default_factory=list)
    families: List[FamilySpec] = field(default_factory=list)

    def __post_init__(self):
        # generator names key caches downstream, so they must be unique
        named = []
        for i, X in enumerate(self.fields):
            named.append(X if X.name else PointVectorField(X.alpha, X.beta, f"X{i + 1}"))
        self.fields = named

    def generators(self, k: int) -> List[PointVectorField]:
        """Declared fields followed by every family instantiated at order ``k``."""
        out = list(self.fields)
        for fam in self.families:
            out.extend(instantiate_family(fam, k, self.ctx))
        return out


# -- invariance ----------------------------------------------------------------


@dataclass
class CheckResult:
    ok: bool
    generator: Optional[str] = None
    residue: Optional[RatFun] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _table(eq: Optional[SolvedEquation], k: int) -> Optional[ReductionTable]:
    if eq is None or not eq.rules and not eq.point:
        return None
    return eq.table(max(k, eq.order))


def _commutes(table: Optional[ReductionTable]) -> bool:
    """Whether reduction commutes with total derivatives (so may be applied early)."""
    return table is not None and table.eq.mode != POINTWISE


def prolonged(X: PointVectorField, k: int, ctx: JetContext, table: Optional[ReductionTable]) -> ProlongedVectorField:
    """Prolongation reduced on the fly when that is sound (differential mode)."""
    reducer = table.reduce if _commutes(table) else None
    return prolong_field(X, k, ctx, reducer)


def lie_residue(X: PointVectorField, f: RatFun, k: int, ctx: JetContext, table: Optional[ReductionTable]) -> RatFun:
    r = lie_derivative(prolonged(X, k, ctx, table), f)
    return table.reduce(r) if table is not None else r


def is_invariant(g: LieAlgebraSpec, f: RatFun, eq: Optional[SolvedEquation] = None, k: Optional[int] = None) -> CheckResult:
    """``reduce(L_X f) == 0`` for every generator instantiated at order ``k``.

    On failure the witness is the first failing generator in declaration order.
    """
    f = RatFun.coerce(f)
    if k is None:
        k = max(f.max_order(), 0)
    table = _table(eq, k)
    if _commutes(table):
        f = table.reduce(f)
    for X in g.generators(k):
        r = lie_residue(X, f, k, g.ctx, table)
        if not r.is_zero():
            return CheckResult(False, X.name, r)
    return CheckResult(True)


@dataclass(frozen=True)
class Ansatz:
    """Candidates ``P / q`` with ``P`` of degree ``<= degree`` in order-``<= order`` coordinates.

    ``variables`` optionally restricts the coordinates ``P`` may use.
    """

    order: int
    degree: int
    denominator: RatFun = ONE
    variables: Optional[Tuple[VarId, ...]] = None


def ansatz_monomials(ansatz: Ansatz, ctx: JetContext, eq: Optional[SolvedEquation] = None) -> List[RatFun]:
    if ansatz.variables is not None:
        vars_ = sorted(ansatz.variables, key=lambda v: v.sort_key)
    elif eq is not None:
        vars_ = eq.parametric(ansatz.order)
    else:
        vars_ = ctx.coordinates(ansatz.order)
    return _monomials(vars_, 0, ansatz.degree)


def _coefficient_rows(exprs: List[RatFun]) -> List[List[Fraction]]:
    """Rows ``r`` such that ``sum_m c_m exprs[m] == 0`` iff ``rows . c == 0``."""
    live = [e for e in exprs if not e.is_zero()]
    if not live:
        return []
    den = (live[0].dc, live[0].dm, dict(live[0].df))
    for e in live[1:]:
        proxy = RatFun._parts(Poly.const(1), *den)
        den = _common_den(proxy, e)
    by_mono: Dict[int, List[Fraction]] = {}
    for col, e in enumerate(exprs):
        if e.is_zero():
            continue
        num = _lift(e, *den)
        for m, c in num.terms.items():
            by_mono.setdefault(m, [Fraction(0)] * len(exprs))[col] = Fraction(c)
    return [by_mono[m] for m in sorted(by_mono)]


def find_invariants_linear(g: LieAlgebraSpec, ansatz: Ansatz, eq: Optional[SolvedEquation] = None) -> List[RatFun]:
    """Basis of the invariants of shape ``P / q`` (reduced echelon form over the monomials)."""
    ctx = g.ctx
    k = ansatz.order
    table = _table(eq, k)
    monos = ansatz_monomials(ansatz, ctx, eq)
    q = RatFun.coerce(ansatz.denominator)
    if _commutes(table):
        q = table.reduce(q)
    if (table.reduce(q) if table is not None else q).is_zero():
        raise DivisionByZero("ansatz denominator vanishes on the equation")
    rows: List[List[Fraction]] = []
    for X in g.generators(k):
        Xk = prolonged(X, k, ctx, table)
        lq = lie_derivative(Xk, q)
        exprs = []
        for m in monos:
            e = q * lie_derivative(Xk, m) - m * lq
            if table is not None:
                e = table.reduce(e)
            exprs.append(e)
        rows.extend(_coefficient_rows(exprs))
    basis = []
    for vec in nullspace(rows, len(monos)):
        p = ZERO
        for c, m in zip(vec, monos):
            if c:
                p = p + m * c
        basis.append(p / q)
    return basis


# -- derivations ----------------------------------------------------------------


@dataclass(eq=False)
class Derivation:
    """``sum_i coeffs[i] * D_i``; ``modulo`` marks a class modulo other derivations."""

    coeffs: Tuple[RatFun, ...]
    modulo: Tuple["Derivation", ...] = ()
    name: str = ""

    def __post_init__(self):
        self.coeffs = tuple(RatFun.coerce(c) for c in self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Derivation) and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None


def apply_derivation(nabla: Derivation, f: RatFun, eq: Optional[SolvedEquation] = None) -> RatFun:
    f = RatFun.coerce(f)
    total = ZERO
    for i, c in enumerate(nabla.coeffs):
        if not c.is_zero():
            total = total + c * total_derivative(f, i)
    if eq is not None:
        table = _table(eq, max(total.max_order(), 0))
        if table is not None:
            total = table.reduce(total)
    return total


def tresse_derivatives(fs: Sequence[RatFun], ctx: JetContext, eq: Optional[SolvedEquation] = None) -> List[Derivation]:
    """Derivations dual to ``d f_1, ..., d f_n``: ``hat d_i (f_j) = delta_ij``."""
    n = ctx.n
    if len(fs) != n:
        raise ValueError(f"need exactly {n} functions")
    fs = [RatFun.coerce(f) for f in fs]
    M = [[total_derivative(fs[k], j) for k in range(n)] for j in range(n)]  # M[j][k] = D_j f_k
    if eq is not None:
        top = max(max(e.max_order(), 0) for row in M for e in row)
        table = _table(eq, top)
        if table is not None:
            M = [[table.reduce(e) for e in row] for row in M]
    if rf_det(M).is_zero():
        raise DegenerateJacobian("total Jacobian of the chosen functions vanishes identically")
    inv = rf_inverse(M)
    return [Derivation(tuple(inv[i][j] for j in range(n)), name=f"tresse{i + 1}") for i in range(n)]


def verify_invariant_derivation(
    nabla: Derivation,
    g: LieAlgebraSpec,
    probes: Sequence[RatFun],
    eq: Optional[SolvedEquation] = None,
    k: Optional[int] = None,
) -> CheckResult:
    """Each ``nabla(probe)`` must pass :func:`is_invariant` at order ``k + 1``."""
    if k is None:
        k = max((max(p.max_order(), 0) for p in probes), default=0)
    for p in probes:
        img = apply_derivation(nabla, p, eq)
        res = is_invariant(g, img, eq, k + 1)
        if not res.ok:
            res.detail = f"image of probe fails invariance"
            return res
    return CheckResult(True)


def commutator(a: Derivation, b: Derivation, eq: Optional[SolvedEquation] = None) -> Derivation:
    """``[a, b] = sum_i (a(b_i) - b(a_i)) D_i`` (total derivatives commute)."""
    return Derivation(tuple(
        apply_derivation(a, bi, eq) - apply_derivation(b, ai, eq) for ai, bi in zip(a.coeffs, b.coeffs)
    ))


@dataclass(frozen=True)
class NotInSpan:
    reason: str = "the commutator is not a combination of the basis"

    def __bool__(self) -> bool:
        return False


def decompose_commutator(c: Derivation, basis: Sequence[Derivation], eq: Optional[SolvedEquation] = None):
    """Coefficients ``rho`` with ``c = sum_k rho_k basis_k``, or :class:`NotInSpan`."""
    n = len(c.coeffs)
    A = [[b.coeffs[i] for b in basis] for i in range(n)]
    rhs = list(c.coeffs)
    table = None
    if eq is not None:
        top = max((max(e.max_order(), 0) for row in A for e in row), default=0)
        top = max([top] + [max(e.max_order(), 0) for e in rhs])
        table = _table(eq, top)
    if table is not None:
        A = [[table.reduce(e) for e in row] for row in A]
        rhs = [table.reduce(e) for e in rhs]
    if not basis:
        return [] if all(e.is_zero() for e in rhs) else NotInSpan()
    sol = rf_solve(A, rhs)
    if sol is None:
        return NotInSpan()
    return sol


def check_first_integral(f: RatFun, eq: SolvedEquation, ctx: JetContext, order: Optional[int] = None) -> CheckResult:
    """``reduce(D_i f) == 0`` for every independent ``x^i``."""
    f = RatFun.coerce(f)
    need = max(f.max_order(), 0) + 1
    table = eq.table(max(need, eq.order, order or 0))
    for i in range(ctx.n):
        r = table.reduce(total_derivative(f, i))
        if not r.is_zero():
            return CheckResult(False, ctx.independents[i], r)
    return CheckResult(True)


# -- second-order operators (point-constraint setting) ------------------------


@dataclass(eq=False)
class TotalDifferentialOperator:
    """``sum_tau c_tau D_tau`` over multi-indices ``tau`` (any order)."""

    terms: Dict[Tuple[int, ...], RatFun]

    def apply(self, f: RatFun) -> RatFun:
        total = ZERO
        for tau, c in sorted(self.terms.items()):
            if c.is_zero():
                continue
            g = f
            for i, s in enumerate(tau):
                for _ in range(s):
                    g = total_derivative(g, i)
            total = total + c * g
        return total

    @property
    def order(self) -> int:
        return max((sum(t) for t in self.terms), default=0)


def operator_field_commutator(
    op: TotalDifferentialOperator, X: PointVectorField, f: RatFun, ctx: JetContext
) -> RatFun:
    """``op(X f) - X(op f)`` on the full jet space (prolongations as needed)."""
    f = RatFun.coerce(f)
    top = max(f.max_order(), 0) + op.order
    for c in op.terms.values():
        top = max(top, c.max_order())
    Xk = prolong_field(X, top, ctx)
    return op.apply(lie_derivative(Xk, f)) - lie_derivative(Xk, op.apply(f))


def check_operator_commutes(
    op: TotalDifferentialOperator,
    g: LieAlgebraSpec,
    probes: Sequence[RatFun],
    eq: Optional[SolvedEquation],
    k: int,
) -> CheckResult:
    """``[op, X_hat] f`` vanishes on ``eq`` for every generator (order ``k``) and probe."""
    table = _table(eq, k + op.order + 2)
    for X in g.generators(k):
        for p in probes:
            r = operator_field_commutator(op, X, p, g.ctx)
            if table is not None:
                r = table.reduce(r)
            if not r.is_zero():
                return CheckResult(False, X.name, r, "commutator does not vanish")
    return CheckResult(True)


def check_symmetries(g: LieAlgebraSpec, eq: SolvedEquation, k: int = 0) -> CheckResult:
    for X in g.generators(k):
        if not is_symmetry(X, eq, g.ctx):
            return CheckResult(False, X.name, None, "not a symmetry")
    return CheckResult(True)

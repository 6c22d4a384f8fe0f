"""Orthonomic differential equations, their prolongation and normal forms.

Two modes are supported:

* ``"differential"`` (default): rules ``u^j_sigma = rhs`` are prolonged by
  total derivatives; every derivative of a lead is a constrained coordinate.
* ``"pointwise"``: jets at a single base point.  Independents are pinned to
  values and the rules constrain only the listed coordinates (not their
  derivatives).  Reduction is plain substitution, and does not commute with
  total derivatives, so callers compute on the full jet space first.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    DenominatorCollapse,
    DivisionByZero,
    InconsistentSystem,
    OrderMismatch,
    OrthonomicityError,
)
from .jet import JetContext, add_index, multi_indices, sub_index, total_derivative, unit
from .poly import VarId, var_id
from .prolong import PointVectorField, lie_derivative, prolong_field
from .ratfun import RatFun, subs_ids

DIFFERENTIAL = "differential"
POINTWISE = "pointwise"


def _divides(a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True, eq=False)
class SolvedEquation:
    ctx: JetContext
    rules: Tuple[Tuple[VarId, RatFun], ...]
    mode: str = DIFFERENTIAL
    point: Tuple[Tuple[int, Fraction], ...] = ()  # pinned independents (pointwise mode)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple((v, RatFun.coerce(r)) for v, r in self.rules))
        object.__setattr__(self, "point", tuple((i, Fraction(c)) for i, c in self.point))
        validate_orthonomic(self)
        object.__setattr__(self, "_store", {})
        object.__setattr__(self, "_store_lock", threading.RLock())

    def table(self, k: int) -> "ReductionTable":
        """A reduction table of order ``k`` sharing memoized entries with all others."""
        return ReductionTable(self, k, _store=(self._store, self._store_lock))

    @property
    def order(self) -> int:
        return max((v.order for v, _ in self.rules), default=0)

    def is_constrained(self, v: VarId) -> bool:
        if v.is_indep:
            return self.mode == POINTWISE and any(i == v.index for i, _ in self.point)
        if self.mode == POINTWISE:
            return any(lead == v for lead, _ in self.rules)
        return any(lead.index == v.index and _divides(lead.sigma, v.sigma) for lead, _ in self.rules)

    def parametric(self, k: int) -> List[VarId]:
        """Unconstrained coordinates of order <= k, in variable order."""
        return [v for v in self.ctx.coordinates(k) if not self.is_constrained(v)]


def validate_orthonomic(eq: SolvedEquation) -> None:
    leads = [v for v, _ in eq.rules]
    if eq.mode not in (DIFFERENTIAL, POINTWISE):
        raise OrthonomicityError(f"unknown equation mode {eq.mode!r}")
    for v in leads:
        if v.is_indep:
            raise OrthonomicityError("a lead must be a jet coordinate")
    if len(set(leads)) != len(leads):
        raise OrthonomicityError("leads must be pairwise distinct")
    if eq.mode == DIFFERENTIAL:
        if eq.point:
            raise OrthonomicityError("pinned independents require pointwise mode")
        for a in leads:
            for b in leads:
                if a != b and a.index == b.index and _divides(a.sigma, b.sigma):
                    raise OrthonomicityError(f"lead {b!r} is a derivative of lead {a!r}")
    for lead, rhs in eq.rules:
        for v in rhs.variables():
            if eq.is_constrained(v):
                raise OrthonomicityError(f"right-hand side of {lead!r} contains constrained {v!r}")
        if eq.mode == DIFFERENTIAL and rhs.max_order() > lead.order:
            raise OrthonomicityError(f"right-hand side of {lead!r} has higher order than its lead")


class ReductionTable:
    """Normal forms of constrained coordinates up to ``order``.

    Entries are built lazily (each from a lower one by a total derivative)
    and memoized; the table is safe to share between threads.
    """

    def __init__(self, eq: SolvedEquation, order: int, _store=None):
        if eq.rules and eq.mode == DIFFERENTIAL and order < eq.order:
            raise OrderMismatch(f"table order {order} is below the equation order {eq.order}")
        self.eq = eq
        self.order = order
        if _store is None:
            _store = ({}, threading.RLock())
        self._entries: Dict[VarId, RatFun] = _store[0]
        self._lock = _store[1]
        self._busy: set = set()
        self._rules = dict(eq.rules)
        self._point = {var_id(VarId.indep(i)): RatFun.const(c) for i, c in eq.point}

    # -- construction -----------------------------------------------------
    def constrained(self) -> List[VarId]:
        if self.eq.mode == POINTWISE:
            return [v for v, _ in self.eq.rules]
        return [v for v in self.eq.ctx.coordinates(self.order) if self.eq.is_constrained(v)]

    def entry(self, v: VarId) -> RatFun:
        with self._lock:
            hit = self._entries.get(v)
            if hit is not None:
                return hit
            if v.order > self.order and self.eq.mode == DIFFERENTIAL:
                raise OrderMismatch(f"{v!r} exceeds table order {self.order}")
            if v in self._busy:
                raise InconsistentSystem(f"cyclic dependency while reducing {v!r}")
            self._busy.add(v)
            try:
                value = self._compute(v)
            finally:
                self._busy.discard(v)
            self._entries[v] = value
            return value

    def _compute(self, v: VarId) -> RatFun:
        if v in self._rules:
            return self._rules[v]
        n = self.eq.ctx.n
        values = []
        for lead, _ in self.eq.rules:
            if lead.index != v.index or not _divides(lead.sigma, v.sigma):
                continue
            tau = sub_index(v.sigma, lead.sigma)
            i = max(t for t in range(n) if tau[t])
            prev = VarId.jet(v.index, sub_index(v.sigma, unit(n, i)))
            values.append((lead, self.reduce(total_derivative(self.entry(prev), i))))
        if not values:
            raise KeyError(v)
        first_lead, first = values[0]
        for lead, other in values[1:]:
            if not (first == other):
                raise InconsistentSystem(
                    f"rules for {first_lead!r} and {lead!r} give different normal forms for {v!r}"
                )
        return first

    def entries(self) -> Dict[VarId, RatFun]:
        return {v: self.entry(v) for v in self.constrained()}

    # -- reduction ----------------------------------------------------------
    def reduce(self, f: RatFun) -> RatFun:
        f = RatFun.coerce(f)
        if self.eq.mode == DIFFERENTIAL and f.max_order() > self.order:
            raise OrderMismatch(f"expression order {f.max_order()} exceeds table order {self.order}")
        mapping: Dict[int, RatFun] = {}
        for v in f.variables():
            if v.is_indep:
                vid = var_id(v)
                if vid in self._point:
                    mapping[vid] = self._point[vid]
            elif self.eq.is_constrained(v):
                mapping[var_id(v)] = self.entry(v)
        if not mapping:
            return f
        try:
            return subs_ids(f, mapping)
        except DivisionByZero:
            raise DenominatorCollapse("a denominator reduces to zero on the equation") from None


def prolong_equation(eq: SolvedEquation, k: int) -> ReductionTable:
    """Reduction table of ``eq`` up to order ``k`` with every entry computed."""
    table = ReductionTable(eq, k)
    table.entries()
    return table


def reduce(f: RatFun, table: ReductionTable) -> RatFun:
    return table.reduce(f)


def is_symmetry(X: PointVectorField, eq: SolvedEquation, ctx: JetContext, table: Optional[ReductionTable] = None) -> bool:
    """Tangency test: ``L_X(lead - rhs)`` reduces to zero for every rule."""
    if not eq.rules:
        return True
    if eq.mode == POINTWISE:
        if table is None:
            table = eq.table(eq.order)
        for i, c in eq.point:
            if not table.reduce(X.alpha[i]).is_zero():
                return False
        order = eq.order
    else:
        order = eq.order
        if table is None or table.order < order:
            table = eq.table(order)
    Xk = prolong_field(X, order, ctx)
    for lead, rhs in eq.rules:
        expr = RatFun.var(lead) - rhs
        if not table.reduce(lie_derivative(Xk, expr)).is_zero():
            return False
    return True

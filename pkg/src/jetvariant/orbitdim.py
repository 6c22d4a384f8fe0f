"""Orbit dimensions by exact rank at seeded rational points; Hilbert and Poincare counts."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .equation import POINTWISE, SolvedEquation, is_symmetry
from .errors import DenominatorVanishes, ExhaustedRetries, NotASymmetry
from .invariants import LieAlgebraSpec, _table, prolonged
from .jet import JetContext
from .linalg import bareiss_rank
from .poly import VarId, var_id
from .prolong import PointVectorField, ProlongedVectorField
from .ratfun import RatFun, evaluate_ids

DEFAULT_RANGE = (-10, 10)
RETRY_BUDGET = 100


@dataclass
class JetPoint:
    """Values of the parametric coordinates up to ``order``.

    Constrained coordinates are not stored; :meth:`value` derives them from
    the equation's normal forms on demand.
    """

    ctx: JetContext
    order: int
    values: Dict[VarId, Fraction]
    eq: Optional[SolvedEquation] = None

    def ids(self) -> Dict[int, Fraction]:
        out = {var_id(v): c for v, c in self.values.items()}
        if self.eq is not None:
            for i, c in self.eq.point:
                out[var_id(VarId.indep(i))] = c
        return out

    def value(self, v: VarId) -> Fraction:
        if v in self.values:
            return self.values[v]
        if self.eq is None:
            raise KeyError(v)
        table = _table(self.eq, max(v.order, 0))
        return evaluate_ids(table.reduce(RatFun.var(v)), self.ids())

    def project(self, k: int) -> "JetPoint":
        return JetPoint(self.ctx, k, {v: c for v, c in self.values.items() if v.order <= k}, self.eq)


def _rng(seed: int, trial: int, attempt: int) -> random.Random:
    return random.Random((seed * 1_000_003 + trial) * 1_000_003 + attempt)


def _coordinates(ctx: JetContext, k: int, eq: Optional[SolvedEquation]) -> List[VarId]:
    return eq.parametric(k) if eq is not None else ctx.coordinates(k)


def sample_point(
    ctx: JetContext,
    k: int,
    eq: Optional[SolvedEquation] = None,
    seed: int = 0,
    trial: int = 0,
    value_range: Tuple[int, int] = DEFAULT_RANGE,
    exclude: Sequence[RatFun] = (),
    retries: int = RETRY_BUDGET,
    accept=None,
) -> JetPoint:
    """Seeded point with integer entries in ``value_range``.

    A draw is rejected when an ``exclude`` expression is zero or undefined at
    it, or when ``accept(point)`` returns false; after ``retries`` rejections
    :class:`ExhaustedRetries` is raised.
    """
    lo, hi = value_range
    coords = _coordinates(ctx, k, eq)
    table = _table(eq, k) if eq is not None else None
    excl = [table.reduce(e) if table is not None else e for e in exclude]
    for attempt in range(retries):
        rng = _rng(seed, trial, attempt)
        pt = JetPoint(ctx, k, {v: Fraction(rng.randint(lo, hi)) for v in coords}, eq)
        ids = pt.ids()
        try:
            if any(evaluate_ids(e, ids) == 0 for e in excl):
                continue
        except DenominatorVanishes:
            continue
        if accept is not None and not accept(pt):
            continue
        return pt
    raise ExhaustedRetries(f"no admissible point after {retries} attempts")


class OrbitSampler:
    """Caches prolonged generator coefficients (reduced on the equation)."""

    def __init__(self, g: LieAlgebraSpec, eq: Optional[SolvedEquation] = None):
        self.g = g
        self.eq = eq if eq is not None and (eq.rules or eq.point) else None
        self._fields: Dict[str, ProlongedVectorField] = {}
        self._coeffs: Dict[Tuple[str, VarId], RatFun] = {}
        self._checked: Dict[str, bool] = {}

    def _check(self, X: PointVectorField) -> None:
        if self.eq is None:
            return
        ok = self._checked.get(X.name)
        if ok is None:
            ok = self._checked[X.name] = is_symmetry(X, self.eq, self.g.ctx)
        if not ok:
            raise NotASymmetry(f"generator {X.name or X!r} is not a symmetry of the equation")

    def coefficient(self, X: PointVectorField, v: VarId, order: int) -> RatFun:
        key = (X.name, v)
        hit = self._coeffs.get(key)
        if hit is not None:
            return hit
        table = _table(self.eq, order) if self.eq is not None else None
        Xk = self._fields.get(X.name)
        if Xk is None or Xk.order < order:
            Xk = prolonged(X, order, self.g.ctx, table)
            self._fields[X.name] = Xk
        c = Xk.coeff(v)
        if table is not None and table.eq.mode == POINTWISE:
            c = table.reduce(c)
        self._coeffs[key] = c
        return c

    def rows(self, p: JetPoint, k: int) -> List[List[Fraction]]:
        cols = _coordinates(self.g.ctx, k, self.eq)
        ids = p.ids()
        out = []
        for X in self.g.generators(k):
            self._check(X)
            out.append([evaluate_ids(self.coefficient(X, v, max(p.order, k)), ids) for v in cols])
        return out

    def rank(self, p: JetPoint, k: int) -> int:
        rows = self.rows(p, k)
        return bareiss_rank(rows) if rows else 0


def orbit_dimension_at(g: LieAlgebraSpec, p: JetPoint, k: int, eq: Optional[SolvedEquation] = None) -> int:
    if p.order < k:
        raise ValueError("point order is below k")
    return OrbitSampler(g, eq).rank(p, k)


def _admissible(sampler: OrbitSampler, K: int):
    def accept(pt: JetPoint) -> bool:
        try:
            sampler.rows(pt, K)
        except DenominatorVanishes:
            return False
        return True

    return accept


def generic_orbit_dimension(
    g: LieAlgebraSpec,
    k: int,
    eq: Optional[SolvedEquation] = None,
    trials: int = 8,
    seed: int = 1,
    value_range: Tuple[int, int] = DEFAULT_RANGE,
    exclude: Sequence[RatFun] = (),
) -> int:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sampler = OrbitSampler(g, eq)
    best = 0
    for t in range(trials):
        p = sample_point(g.ctx, k, eq, seed, t, value_range, exclude, accept=_admissible(sampler, k))
        best = max(best, sampler.rank(p, k))
    return best


@dataclass
class HilbertProfile:
    d: List[int]
    orbit: List[int]
    dims: List[int]
    trial_ranks: List[List[int]] = field(default_factory=list)  # [trial][k]

    def as_dict(self) -> dict:
        return {"d": self.d, "orbit": self.orbit, "dims": self.dims}


def hilbert_function(
    g: LieAlgebraSpec,
    eq: Optional[SolvedEquation],
    K: int,
    trials: int = 8,
    seed: int = 1,
    value_range: Tuple[int, int] = DEFAULT_RANGE,
    exclude: Sequence[RatFun] = (),
) -> HilbertProfile:
    """``d_k = (dim_k - orbit_k) - (dim_{k-1} - orbit_{k-1})`` for ``k = 0..K``.

    Each trial samples one point at order ``K`` and projects it to lower orders.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sampler = OrbitSampler(g, eq)
    eqv = sampler.eq
    dims = [len(_coordinates(g.ctx, k, eqv)) for k in range(K + 1)]
    trial_ranks = []
    for t in range(trials):
        p = sample_point(g.ctx, K, eqv, seed, t, value_range, exclude, accept=_admissible(sampler, K))
        trial_ranks.append([sampler.rank(p, k) for k in range(K + 1)])
    orbit = [max(r[k] for r in trial_ranks) for k in range(K + 1)]
    d = []
    for k in range(K + 1):
        cod = dims[k] - orbit[k]
        prev = dims[k - 1] - orbit[k - 1] if k else 0
        d.append(cod - prev)
    return HilbertProfile(d, orbit, dims, trial_ranks)


@dataclass
class PoincareFit:
    status: str  # "fits" or "unstable"
    d: Optional[int]
    R: List[int]
    window: Tuple[int, int]

    def as_dict(self) -> dict:
        return {"status": self.status, "d": self.d, "R": self.R, "window": list(self.window)}


def _times_one_minus_z(seq: List[int]) -> List[int]:
    return [seq[i] - (seq[i - 1] if i else 0) for i in range(len(seq))]


def poincare_fit(profile, window: Optional[Tuple[int, int]] = None, tail: int = 2) -> PoincareFit:
    """Smallest ``d`` with ``(1-z)^(d+1) * sum d_k z^k`` a polynomial inside the window.

    "Polynomial" means the product's last ``tail`` coefficients in the window
    vanish; ``R`` is the product truncated after its last nonzero coefficient.
    """
    seq = list(profile.d if isinstance(profile, HilbertProfile) else profile)
    if len(seq) < 4:
        raise ValueError("profile must have length >= 4")
    lo, hi = window if window is not None else (0, len(seq) - 1)
    seq = seq[: hi + 1]
    prod = seq
    for d in range(0, len(seq) - tail):
        prod = _times_one_minus_z(prod)
        if all(c == 0 for c in prod[len(prod) - tail:]):
            R = prod[:]
            while R and R[-1] == 0:
                R.pop()
            return PoincareFit("fits", d, R, (lo, hi))
    return PoincareFit("unstable", None, [], (lo, hi))

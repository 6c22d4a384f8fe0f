"""Exact rational functions in jet coordinates.

A :class:`RatFun` is ``num / den`` with an integer-coefficient numerator and a
partially factored denominator ``den = dc * dm * prod(core_i ** e_i)``:

* ``dc`` is a positive integer,
* ``dm`` is a packed monomial,
* every ``core_i`` is a primitive polynomial with no monomial factor and a
  positive leading coefficient.

No multivariate gcd is ever taken.  Known factors are reused instead: sums
take the lcm of the factor lists, and derivatives add a single power of each
factor.  Each constructor also removes the common integer content and the
common monomial factor of numerator and denominator.  The expanded
denominator (``.den``) therefore has a positive leading coefficient.

Equality is decided by cross-multiplication, so representatives of one
function compare equal even when their factor lists differ.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Tuple

from .errors import DenominatorVanishes, DivisionByZero, UnboundVariable
from .poly import BITS, MAX_EXP, Poly, VarId, _mono_max, _mono_min, decode, encode, var_id, var_of

Number = int | Fraction
Factors = Dict[Poly, int]

_ONE_POLY = Poly.const(1)


def _integerize(num: Poly) -> Tuple[Poly, int]:
    dens = [c.denominator for c in num.terms.values() if type(c) is not int]
    if not dens:
        return num, 1
    lcm = math.lcm(*dens)
    return Poly({m: int(c * lcm) for m, c in num.terms.items()}), lcm


class RatFun:
    __slots__ = ("num", "dc", "dm", "df", "_den")

    def __init__(self, num: Poly | Number = 0, den: Poly | Number = 1):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        num, ln = _integerize(num)
        den, ld = _integerize(den)
        c, m, core = den.split()
        dc = c * ln
        num = num.scale(ld)
        df = {} if core.is_constant() else {core: 1}
        self._set(num, dc, m, df)

    @classmethod
    def _parts(cls, num: Poly, dc: int, dm: int, df: Factors) -> "RatFun":
        obj = cls.__new__(cls)
        obj._set(num, dc, dm, df)
        return obj

    def _set(self, num: Poly, dc: int, dm: int, df: Factors) -> None:
        self._den = None
        if num.is_zero():
            self.num, self.dc, self.dm, self.df = num, 1, 0, {}
            return
        num, ln = _integerize(num)
        if ln != 1:
            dc *= ln
        if type(dc) is not int:  # a Fraction constant slipped in
            fc = Fraction(dc)
            num = num.scale(fc.denominator)
            dc = fc.numerator
        if dc < 0:
            num, dc = -num, -dc
        g = math.gcd(num.content(), dc)
        if dm:
            mg = _mono_min(dm, num.monomial_gcd())
        else:
            mg = 0
        if g != 1 or mg:
            num = Poly({m - mg: c // g for m, c in num.terms.items()})
            dc //= g
            dm -= mg
        self.num = num
        self.dc = dc
        self.dm = dm
        self.df = {k: e for k, e in df.items() if e}

    # -- construction helpers --------------------------------------------
    @staticmethod
    def var(v: VarId) -> "RatFun":
        return RatFun._parts(Poly.var(v), 1, 0, {})

    @staticmethod
    def const(c: Number) -> "RatFun":
        c = Fraction(c)
        return RatFun._parts(Poly.const(c.numerator), c.denominator, 0, {})

    @staticmethod
    def coerce(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, Poly):
            return RatFun._parts(x, 1, 0, {})
        if isinstance(x, (int, Fraction)):
            return RatFun.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFun")

    # -- views ------------------------------------------------------------
    @property
    def den(self) -> Poly:
        """The expanded denominator polynomial."""
        if self._den is None:
            d = Poly({self.dm: self.dc})
            for core, e in self.df.items():
                d = d * core ** e
            self._den = d
        return self._den

    def den_is_one(self) -> bool:
        return self.dc == 1 and not self.dm and not self.df

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and not self.dm and not self.df

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return Fraction(self.num.constant_value(), self.dc)

    def is_polynomial(self) -> bool:
        return not self.dm and not self.df

    def var_ids(self) -> set:
        out = self.num.var_ids()
        out.update(v for v, _ in decode(self.dm))
        for core in self.df:
            out |= core.var_ids()
        return out

    def variables(self) -> set:
        return {var_of(v) for v in self.var_ids()}

    def max_order(self) -> int:
        """Highest jet order among the jet coordinates present; -1 if none."""
        return max((v.order for v in self.variables() if not v.is_indep), default=-1)

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "RatFun":
        try:
            other = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return rf_add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "RatFun":
        return RatFun._parts(-self.num, self.dc, self.dm, self.df)

    def __sub__(self, other) -> "RatFun":
        try:
            other = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return rf_add(self, -other)

    def __rsub__(self, other) -> "RatFun":
        return RatFun.coerce(other) - self

    def __mul__(self, other) -> "RatFun":
        try:
            other = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return rf_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFun":
        try:
            other = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return rf_div(self, other)

    def __rtruediv__(self, other) -> "RatFun":
        return rf_div(RatFun.coerce(other), self)

    def __pow__(self, e: int) -> "RatFun":
        return rf_pow(self, e)

    def __eq__(self, other) -> bool:
        try:
            other = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return rf_eq(self, other)

    __hash__ = None  # equality is semantic; representatives are not canonical

    def __repr__(self) -> str:
        if self.den_is_one():
            return f"RatFun({self.num!r})"
        return f"RatFun({self.num!r} / {self.den!r})"


ZERO = RatFun._parts(Poly(), 1, 0, {})
ONE = RatFun._parts(Poly.const(1), 1, 0, {})


def _expand(dc: int, dm: int, df: Factors) -> Poly:
    p = Poly({dm: dc})
    for core, e in df.items():
        if e:
            p = p * core ** e
    return p


def _common_den(a: RatFun, b: RatFun):
    dc = a.dc * b.dc // math.gcd(a.dc, b.dc)
    dm = _mono_max(a.dm, b.dm) if (a.dm or b.dm) else 0
    df: Factors = dict(a.df)
    for core, e in b.df.items():
        if e > df.get(core, 0):
            df[core] = e
    return dc, dm, df


def _lift(x: RatFun, dc: int, dm: int, df: Factors) -> Poly:
    """Numerator of ``x`` over the (multiple) denominator ``dc*dm*df``."""
    missing = {core: e - x.df.get(core, 0) for core, e in df.items()}
    mult = _expand(dc // x.dc, dm - x.dm, missing)
    return x.num * mult


def rf_add(a: RatFun, b: RatFun) -> RatFun:
    if a.num.is_zero():
        return b
    if b.num.is_zero():
        return a
    if a.dc == b.dc and a.dm == b.dm and a.df == b.df:
        return RatFun._parts(a.num + b.num, a.dc, a.dm, a.df)
    dc, dm, df = _common_den(a, b)
    return RatFun._parts(_lift(a, dc, dm, df) + _lift(b, dc, dm, df), dc, dm, df)


def rf_sub(a: RatFun, b: RatFun) -> RatFun:
    return rf_add(a, -b)


def _cancel(num: Poly, df: Factors) -> Tuple[Poly, Factors]:
    """Cancel ``num``'s primitive core against a matching denominator factor."""
    if not df or len(num) < 2:
        return num, df
    c, m, core = num.split()
    if core in df:
        df = dict(df)
        df[core] -= 1
        return Poly({m: c}), df
    return num, df


def rf_mul(a: RatFun, b: RatFun) -> RatFun:
    if a.num.is_zero() or b.num.is_zero():
        return ZERO
    an, bdf = _cancel(a.num, b.df)
    bn, adf = _cancel(b.num, a.df)
    df: Factors = dict(adf)
    for core, e in bdf.items():
        df[core] = df.get(core, 0) + e
    dm = a.dm + b.dm
    if dm and (a.maxexp_den() + b.maxexp_den() > MAX_EXP):
        raise OverflowError("exponent exceeds 255 in denominator")
    return RatFun._parts(an * bn, a.dc * b.dc, dm, df)


def _maxexp_den(self: RatFun) -> int:
    return max((e for _, e in decode(self.dm)), default=0)


RatFun.maxexp_den = _maxexp_den


def rf_inv(a: RatFun) -> RatFun:
    if a.num.is_zero():
        raise DivisionByZero("division by the zero function")
    c, m, core = a.num.split()
    num = _expand(a.dc, a.dm, a.df)
    df = {} if core.is_constant() else {core: 1}
    return RatFun._parts(num, c, m, df)


def rf_div(a: RatFun, b: RatFun) -> RatFun:
    return rf_mul(a, rf_inv(b))


def rf_pow(a: RatFun, e: int) -> RatFun:
    if not isinstance(e, int):
        raise TypeError("only integer exponents are supported")
    if e < 0:
        return rf_pow(rf_inv(a), -e)
    if e == 0:
        return ONE
    if e == 1:
        return a
    if a.dm and _maxexp_den(a) * e > MAX_EXP:
        raise OverflowError("exponent exceeds 255")
    return RatFun._parts(a.num ** e, a.dc ** e, a.dm * e, {c: k * e for c, k in a.df.items()})


def rf_eq(a: RatFun, b: RatFun) -> bool:
    """Exact equality: ``a.num * b.den - b.num * a.den`` expands to zero."""
    if a.dc == b.dc and a.dm == b.dm and a.df == b.df:
        return a.num == b.num
    if a.num.is_zero() or b.num.is_zero():
        return a.num.is_zero() and b.num.is_zero()
    dc, dm, df = _common_den(a, b)
    return (_lift(a, dc, dm, df) - _lift(b, dc, dm, df)).is_zero()


def _inverse_den(f: RatFun) -> RatFun:
    return RatFun._parts(Poly.const(1), f.dc, f.dm, dict(f.df))


def apply_derivation(f: RatFun, op: Callable[[Poly], RatFun]) -> RatFun:
    """Extend a derivation ``op`` on polynomials to rational functions.

    Uses ``op(n/d) = (op(n) - n * op(d)/d) / d`` with ``op(d)/d`` expanded
    over the factored form of ``d``, so each factor gains a single power.
    """
    dn = op(f.num)
    if not f.dm and not f.df:
        if f.dc == 1:
            return dn
        return dn * RatFun.const(Fraction(1, f.dc))
    log = ZERO
    for vid, k in decode(f.dm):
        v = Poly({1 << (BITS * vid): 1})
        dv = op(v)
        if not dv.is_zero():
            log = log + dv * RatFun._parts(Poly.const(k), 1, 1 << (BITS * vid), {})
    for core, e in f.df.items():
        dc = op(core)
        if not dc.is_zero():
            log = log + dc * RatFun._parts(Poly.const(e), 1, 0, {core: 1})
    if log.is_zero():
        top = dn
    else:
        top = dn - RatFun._parts(f.num, 1, 0, {}) * log
    return top * _inverse_den(f)


def partial(f: RatFun, v: VarId) -> RatFun:
    """Exact partial derivative (quotient rule over the factored denominator)."""
    return apply_derivation(f, lambda p: RatFun._parts(p.partial(v), 1, 0, {}))


def evaluate(f: RatFun, point: Mapping[VarId, Number]) -> Fraction:
    """Exact value of ``f`` at ``point``.

    Raises :class:`UnboundVariable` if a variable of ``f`` has no value and
    :class:`DenominatorVanishes` if the denominator is zero there.
    """
    values: Dict[int, Fraction] = {}
    for v in f.variables():
        if v not in point:
            raise UnboundVariable(f"no value for {v!r}")
        values[var_id(v)] = Fraction(point[v])
    return evaluate_ids(f, values)


def evaluate_ids(f: RatFun, values: Dict[int, Fraction]) -> Fraction:
    try:
        d = Fraction(f.dc)
        for vid, e in decode(f.dm):
            d *= values[vid] ** e
        for core, e in f.df.items():
            if not d:
                break
            d *= core.evaluate(values) ** e
        if not d:
            raise DenominatorVanishes("denominator vanishes at the point")
        return f.num.evaluate(values) / d
    except KeyError as exc:
        raise UnboundVariable(f"no value for {var_of(exc.args[0])!r}") from None


def subs_poly(p: Poly, mapping: Dict[int, RatFun]) -> RatFun:
    """Simultaneously substitute rational functions (keyed by var id) into ``p``."""
    maxe: Dict[int, int] = {}
    for m in p.terms:
        for vid, e in decode(m):
            if vid in mapping and e > maxe.get(vid, 0):
                maxe[vid] = e
    if not maxe:
        return RatFun._parts(p, 1, 0, {})
    order = sorted(maxe)
    groups: Dict[tuple, Dict[int, Number]] = {}
    for m, c in p.terms.items():
        key = []
        rest = m
        for vid in order:
            e = (m >> (BITS * vid)) & MAX_EXP
            key.append(e)
            rest -= e << (BITS * vid)
        g = groups.setdefault(tuple(key), {})
        g[rest] = g.get(rest, 0) + c
    npow: Dict[tuple, Poly] = {}
    dpow: Dict[tuple, Poly] = {}
    plain = {vid: mapping[vid].den_is_one() for vid in order}

    def numpow(vid, e):
        k = (vid, e)
        if k not in npow:
            npow[k] = mapping[vid].num ** e
        return npow[k]

    def denpow(vid, e):
        k = (vid, e)
        if k not in dpow:
            dpow[k] = mapping[vid].den ** e
        return dpow[k]

    num = Poly()
    for key, rest_terms in groups.items():
        term = Poly({m: c for m, c in rest_terms.items() if c})
        if term.is_zero():
            continue
        for vid, e in zip(order, key):
            if e:
                term = term * numpow(vid, e)
            if not plain[vid] and maxe[vid] - e:
                term = term * denpow(vid, maxe[vid] - e)
        num = num + term
    dc, dm, df = 1, 0, {}
    for vid in order:
        if plain[vid]:
            continue
        r = mapping[vid]
        E = maxe[vid]
        dc *= r.dc ** E
        dm += r.dm * E
        for core, e in r.df.items():
            df[core] = df.get(core, 0) + e * E
    return RatFun._parts(num, dc, dm, df)


def subs_ids(f: RatFun, ids: Dict[int, RatFun]) -> RatFun:
    n = subs_poly(f.num, ids)
    if f.is_polynomial():
        return n * RatFun.const(Fraction(1, f.dc)) if f.dc != 1 else n
    d = RatFun.const(f.dc)
    if f.dm:
        d = d * subs_poly(Poly({f.dm: 1}), ids)
    for core, e in f.df.items():
        d = d * subs_poly(core, ids) ** e
    if d.is_zero():
        raise DivisionByZero("denominator vanishes after substitution")
    return n / d


def subs(f: RatFun, mapping: Mapping[VarId, RatFun]) -> RatFun:
    """Simultaneous substitution ``f(v -> mapping[v])``."""
    return subs_ids(f, {var_id(v): RatFun.coerce(r) for v, r in mapping.items()})


def linear_combination(coeffs: Iterable[Number], items: Iterable[RatFun]) -> RatFun:
    total = ZERO
    for c, f in zip(coeffs, items):
        if c:
            total = total + f * c
    return total

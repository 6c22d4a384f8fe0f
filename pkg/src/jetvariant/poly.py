"""Jet coordinates and sparse multivariate polynomials over the rationals.

Monomials are packed into a single Python integer: the exponent of the
variable with intern id ``v`` occupies bits ``[8v, 8v + 8)``.  Multiplying
monomials is then integer addition, which keeps the inner product loop in C.
Exponents are therefore limited to 255 per variable; exceeding that raises
``OverflowError`` instead of silently carrying into the next variable.

Variable order (used for printing and for the graded-lex term order):
independents first by index, then jet coordinates ``u^j_sigma`` by
``(|sigma|, j, sigma)`` with ``sigma`` compared lexicographically ascending.
"""

from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Tuple

BITS = 8
MAX_EXP = (1 << BITS) - 1


@dataclass(frozen=True, slots=True)
class VarId:
    """A coordinate on a jet space: an independent ``x^i`` or a jet ``u^j_sigma``.

    Indices are 0-based.  ``sigma`` is empty for independents.
    """

    kind: str  # "x" or "u"
    index: int
    sigma: Tuple[int, ...] = ()

    @staticmethod
    def indep(i: int) -> "VarId":
        return VarId("x", i)

    @staticmethod
    def jet(j: int, sigma: Iterable[int]) -> "VarId":
        sigma = tuple(sigma)
        if any(s < 0 for s in sigma):
            raise ValueError(f"negative multi-index {sigma}")
        return VarId("u", j, sigma)

    @property
    def is_indep(self) -> bool:
        return self.kind == "x"

    @property
    def order(self) -> int:
        """Jet order; independents count as order 0."""
        return sum(self.sigma)

    @property
    def sort_key(self) -> tuple:
        if self.kind == "x":
            return (0, self.index)
        return (1, sum(self.sigma), self.index, self.sigma)

    def __lt__(self, other: "VarId") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        if self.kind == "x":
            return f"x{self.index + 1}"
        return f"u{self.index + 1}_{''.join(map(str, self.sigma))}"


# Global intern table.  Ids are process-local and only used as bit offsets;
# nothing observable depends on the order in which variables get interned.
_lock = threading.Lock()
_vars: List[VarId] = []
_ids: Dict[VarId, int] = {}
_dshift: Dict[Tuple[int, int], int | None] = {}


def var_id(v: VarId) -> int:
    vid = _ids.get(v)
    if vid is None:
        with _lock:
            vid = _ids.get(v)
            if vid is None:
                vid = len(_vars)
                _vars.append(v)
                _ids[v] = vid
    return vid


def var_of(vid: int) -> VarId:
    return _vars[vid]


def _shift_target(vid: int, i: int) -> int | None:
    """Id of the coordinate that D_i maps ``vid`` to; -1 for ``x^i``; None if D_i kills it."""
    key = (vid, i)
    try:
        return _dshift[key]
    except KeyError:
        pass
    v = _vars[vid]
    if v.kind == "x":
        target = -1 if v.index == i else None
    else:
        sig = list(v.sigma)
        sig[i] += 1
        target = var_id(VarId.jet(v.index, sig))
    _dshift[key] = target
    return target


def decode(m: int) -> List[Tuple[int, int]]:
    """Packed monomial -> list of ``(var id, exponent)``."""
    if not m:
        return []
    bs = m.to_bytes((m.bit_length() + 7) >> 3, "little")
    return [(i, b) for i, b in enumerate(bs) if b]


def encode(pairs: Iterable[Tuple[int, int]]) -> int:
    m = 0
    for vid, e in pairs:
        if e < 0 or e > MAX_EXP:
            raise OverflowError(f"exponent {e} out of range")
        m += e << (BITS * vid)
    return m


def _mono_min(a: int, b: int) -> int:
    """Componentwise minimum (gcd) of two packed monomials."""
    if not a or not b:
        return 0
    da = dict(decode(a))
    return encode((v, min(e, da[v])) for v, e in decode(b) if v in da)


def _mono_max(a: int, b: int) -> int:
    """Componentwise maximum (lcm) of two packed monomials."""
    d = dict(decode(a))
    for v, e in decode(b):
        if e > d.get(v, 0):
            d[v] = e
    return encode(d.items())


def _mono_cmp(a: List[Tuple[int, int]], b: List[Tuple[int, int]]) -> int:
    """Graded-lex comparison of decoded monomials."""
    da = sum(e for _, e in a)
    db = sum(e for _, e in b)
    if da != db:
        return -1 if da < db else 1
    sa = sorted(((_vars[v].sort_key, e) for v, e in a))
    sb = sorted(((_vars[v].sort_key, e) for v, e in b))
    for (ka, ea), (kb, eb) in zip(sa, sb):
        if ka != kb:
            # the monomial containing the earlier variable is larger
            return 1 if ka < kb else -1
        if ea != eb:
            return 1 if ea > eb else -1
    if len(sa) != len(sb):
        return 1 if len(sa) > len(sb) else -1
    return 0


def monomial_key(m: int):
    """Sort key putting packed monomials in ascending graded-lex order."""
    return _MonoKey(decode(m))


@functools.total_ordering
class _MonoKey:
    __slots__ = ("d",)

    def __init__(self, d):
        self.d = d

    def __eq__(self, other):
        return _mono_cmp(self.d, other.d) == 0

    def __lt__(self, other):
        return _mono_cmp(self.d, other.d) < 0


Coeff = int | Fraction


class Poly:
    """Sparse polynomial: ``{packed monomial: nonzero rational}``.

    Instances are immutable by convention; the constructor trusts that
    ``terms`` has no zero coefficients.
    """

    __slots__ = ("terms", "_maxexp", "_split", "_hash")

    def __init__(self, terms: Dict[int, Coeff] | None = None):
        self.terms: Dict[int, Coeff] = terms if terms is not None else {}
        self._maxexp = None
        self._split = None
        self._hash = None

    # -- construction -----------------------------------------------------
    @staticmethod
    def const(c: Coeff) -> "Poly":
        return Poly({0: c}) if c else Poly()

    @staticmethod
    def var(v: VarId, e: int = 1) -> "Poly":
        return Poly({encode([(var_id(v), e)]): 1})

    @staticmethod
    def from_terms(items: Iterable[Tuple[int, Coeff]]) -> "Poly":
        acc: Dict[int, Coeff] = {}
        for m, c in items:
            acc[m] = acc.get(m, 0) + c
        return Poly({m: c for m, c in acc.items() if c})

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> Coeff:
        return self.terms.get(0, 0)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- structure --------------------------------------------------------
    def maxexp(self) -> int:
        if self._maxexp is None:
            mx = 0
            for m in self.terms:
                if m:
                    b = max(m.to_bytes((m.bit_length() + 7) >> 3, "little"))
                    if b > mx:
                        mx = b
            self._maxexp = mx
        return self._maxexp

    def var_ids(self) -> set:
        out = set()
        for m in self.terms:
            for v, _ in decode(m):
                out.add(v)
        return out

    def variables(self) -> set:
        return {_vars[v] for v in self.var_ids()}

    def degree_in(self, v: VarId) -> int:
        shift = BITS * var_id(v)
        return max(((m >> shift) & MAX_EXP for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in decode(m)) for m in self.terms), default=0)

    def sorted_terms(self, descending: bool = True) -> List[Tuple[int, Coeff]]:
        return sorted(self.terms.items(), key=lambda t: monomial_key(t[0]), reverse=descending)

    def leading_term(self) -> Tuple[int, Coeff]:
        if len(self.terms) == 1:
            return next(iter(self.terms.items()))
        return max(self.terms.items(), key=lambda t: monomial_key(t[0]))

    def content(self) -> Coeff:
        """Positive gcd of the coefficients (for integer polynomials)."""
        return math.gcd(*self.terms.values()) if self.terms else 0

    def monomial_gcd(self) -> int:
        it = iter(self.terms)
        g = next(it, 0)
        for m in it:
            if not g:
                break
            g = _mono_min(g, m)
        return g

    def split(self) -> Tuple[int, int, "Poly"]:
        """Write an integer polynomial as ``c * monomial * core``.

        ``core`` is primitive, free of monomial factors, with positive leading
        coefficient; ``c`` carries the sign.  Cached.
        """
        if self._split is None:
            c = self.content()
            if self.leading_term()[1] < 0:
                c = -c
            g = self.monomial_gcd()
            if c == 1 and g == 0:
                core = self
            else:
                core = Poly({m - g: v // c for m, v in self.terms.items()})
            self._split = (c, g, core)
        return self._split

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        if len(self.terms) < len(other.terms):
            small, big = self.terms, other.terms
        else:
            small, big = other.terms, self.terms
        res = dict(big)
        for m, c in small.items():
            v = res.get(m)
            if v is None:
                res[m] = c
            else:
                v += c
                if v:
                    res[m] = v
                else:
                    del res[m]
        return Poly(res)

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        res = dict(self.terms)
        for m, c in other.terms.items():
            v = res.get(m)
            if v is None:
                res[m] = -c
            else:
                v -= c
                if v:
                    res[m] = v
                else:
                    del res[m]
        return Poly(res)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c: Coeff) -> "Poly":
        if not c:
            return Poly()
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()})

    def shift(self, mono: int) -> "Poly":
        """Multiply by a packed monomial."""
        if not mono:
            return self
        return Poly({m + mono: c for m, c in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                return self.scale(other)
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly()
        if len(a) == 1:
            (m1, c1), = a.items()
            if m1 == 0:
                return other.scale(c1)
        if len(b) == 1:
            (m2, c2), = b.items()
            if m2 == 0:
                return self.scale(c2)
        if self.maxexp() + other.maxexp() > MAX_EXP:
            raise OverflowError("exponent exceeds 255 in polynomial product")
        if len(a) < len(b):
            a, b = b, a
        res: Dict[int, Coeff] = {}
        get = res.get
        for m2, c2 in b.items():
            for m1, c1 in a.items():
                m = m1 + m2
                v = get(m)
                res[m] = c1 * c2 if v is None else v + c1 * c2
        return Poly({m: c for m, c in res.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if not isinstance(e, int) or e < 0:
            raise ValueError("polynomial powers take non-negative integers")
        if e == 0:
            return Poly.const(1)
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            if self.maxexp() * e > MAX_EXP:
                raise OverflowError("exponent exceeds 255")
            return Poly({m * e: c ** e})
        result = Poly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def exact_div_const(self, c: int) -> "Poly":
        return Poly({m: v // c for m, v in self.terms.items()})

    # -- calculus ---------------------------------------------------------
    def partial(self, v: VarId) -> "Poly":
        vid = var_id(v)
        shift = BITS * vid
        one = 1 << shift
        res: Dict[int, Coeff] = {}
        for m, c in self.terms.items():
            e = (m >> shift) & MAX_EXP
            if e:
                res[m - one] = c * e
        return Poly(res)

    def total_derivative(self, i: int) -> "Poly":
        """``D_i`` on polynomials: differentiate in ``x^i`` and shift every jet."""
        res: Dict[int, Coeff] = {}
        get = res.get
        for m, c in self.terms.items():
            for vid, e in decode(m):
                t = _shift_target(vid, i)
                if t is None:
                    continue
                nm = m - (1 << (BITS * vid))
                if t >= 0:
                    nm += 1 << (BITS * t)
                    if (nm >> (BITS * t)) & MAX_EXP == 0:
                        raise OverflowError("exponent exceeds 255")
                cc = c * e
                v = get(nm)
                res[nm] = cc if v is None else v + cc
        return Poly({m: c for m, c in res.items() if c})

    def evaluate(self, values: Dict[int, Fraction]) -> Fraction:
        """Evaluate with ``values`` keyed by var id; raises KeyError on unbound ids."""
        total = Fraction(0)
        powcache: Dict[Tuple[int, int], Fraction] = {}
        for m, c in self.terms.items():
            t = Fraction(c)
            for vid, e in decode(m):
                key = (vid, e)
                p = powcache.get(key)
                if p is None:
                    p = values[vid] ** e
                    powcache[key] = p
                t *= p
                if not t:
                    break
            total += t
        return total

    def iter_vars(self) -> Iterator[VarId]:
        for vid in sorted(self.var_ids(), key=lambda v: _vars[v].sort_key):
            yield _vars[vid]

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(
                repr(_vars[v]) + (f"^{e}" if e > 1 else "")
                for v, e in sorted(decode(m), key=lambda t: _vars[t[0]].sort_key)
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return "Poly(" + " + ".join(parts) + ")"

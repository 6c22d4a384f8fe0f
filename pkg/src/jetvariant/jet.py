"""Jet-space bookkeeping: multi-indices, coordinate names, total derivatives.

Everything lives in the graph chart ``J^k(pi)``: independents ``x^i`` and jet
coordinates ``u^j_sigma``.  Coordinate names inside a :class:`JetContext`:

* declared independent and dependent names (``x``, ``y``, ``w``, ...);
* the canonical form ``u{j}_{digits}``, one digit per independent, e.g.
  ``u1_21`` is ``d^2/dx^2 d/dy u^1`` when ``n = 2``;
* declared alias templates ending in one placeholder:

  - ``{k}``: ``k``-th derivative along one independent (``y{k}``, ``w_{k}``);
  - ``{idx}``: 1-based indices of the differentiations (``H_{idx}`` gives ``H_1122``);
  - ``{names}``: independent names, one character each (``u_{names}`` gives ``u_xy``).
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .errors import SchemaError, UnknownVariable
from .poly import VarId
from .ratfun import RatFun, apply_derivation

MultiIndex = Tuple[int, ...]

_CANONICAL = re.compile(r"^u(\d+)_(\d+)$")
_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def unit(n: int, i: int) -> MultiIndex:
    return tuple(1 if s == i else 0 for s in range(n))


def add_index(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def sub_index(a: Sequence[int], b: Sequence[int]) -> Optional[MultiIndex]:
    d = tuple(x - y for x, y in zip(a, b))
    return d if all(s >= 0 for s in d) else None


def multi_indices(n: int, order: int) -> List[MultiIndex]:
    """All multi-indices of length ``n`` and exact ``order``, ascending lex."""
    if n == 0:
        return [()] if order == 0 else []
    out = [
        s
        for s in itertools.product(range(order + 1), repeat=n)
        if sum(s) == order
    ]
    return sorted(out)


@dataclass(frozen=True)
class Alias:
    prefix: str
    style: str  # "k", "idx" or "names"
    dependent: int
    direction: int = 0  # only for style "k"


@dataclass(frozen=True)
class JetContext:
    independents: Tuple[str, ...]
    dependents: Tuple[str, ...]
    aliases: Tuple[Alias, ...] = field(default=())

    def __post_init__(self):
        names = list(self.independents) + list(self.dependents)
        if len(set(names)) != len(names):
            raise SchemaError("independent and dependent names must be distinct")
        for nm in names:
            if not _IDENT.match(nm):
                raise SchemaError(f"invalid variable name {nm!r}")
            if _CANONICAL.match(nm):
                raise SchemaError(f"name {nm!r} clashes with canonical jet naming")

    @staticmethod
    def build(independents: Sequence[str], dependents: Sequence[str], aliases=None) -> "JetContext":
        """Build a context; ``aliases`` maps templates to ``{"dependent", "direction"}``."""
        indep = tuple(independents)
        dep = tuple(dependents)
        parsed = []
        for template, target in (aliases or {}).items():
            m = re.match(r"^([A-Za-z][A-Za-z0-9_]*)\{(k|idx|names)\}$", template)
            if not m:
                raise SchemaError(f"bad alias template {template!r}")
            prefix, style = m.groups()
            if isinstance(target, str):
                target = {"dependent": target}
            try:
                j = dep.index(target["dependent"])
            except (KeyError, ValueError):
                raise SchemaError(f"alias {template!r} names an unknown dependent") from None
            direction = 0
            if style == "k":
                if "direction" in target:
                    if target["direction"] not in indep:
                        raise SchemaError(f"alias {template!r}: unknown direction")
                    direction = indep.index(target["direction"])
                elif len(indep) != 1:
                    raise SchemaError(f"alias {template!r} needs a direction")
            if style == "names" and any(len(x) != 1 for x in indep):
                raise SchemaError(f"alias {template!r} needs one-character independent names")
            parsed.append(Alias(prefix, style, j, direction))
        return JetContext(indep, dep, tuple(parsed))

    @property
    def n(self) -> int:
        return len(self.independents)

    @property
    def m(self) -> int:
        return len(self.dependents)

    # -- naming -----------------------------------------------------------
    def lookup(self, name: str) -> VarId:
        if name in self.independents:
            return VarId.indep(self.independents.index(name))
        if name in self.dependents:
            return VarId.jet(self.dependents.index(name), (0,) * self.n)
        for al in self.aliases:
            if not name.startswith(al.prefix):
                continue
            sigma = self._alias_sigma(al, name[len(al.prefix):])
            if sigma is not None:
                return VarId.jet(al.dependent, sigma)
        cm = _CANONICAL.match(name)
        if cm:
            j = int(cm.group(1)) - 1
            digits = cm.group(2)
            if 0 <= j < self.m and len(digits) == self.n:
                return VarId.jet(j, tuple(int(d) for d in digits))
        raise UnknownVariable(f"unknown variable {name!r}")

    def _alias_sigma(self, al: Alias, suffix: str) -> Optional[MultiIndex]:
        if not suffix:
            return None
        if al.style == "k":
            if not suffix.isdigit():
                return None
            sig = [0] * self.n
            sig[al.direction] = int(suffix)
            return tuple(sig)
        if al.style == "idx":
            if not suffix.isdigit() or any(not 1 <= int(c) <= self.n for c in suffix):
                return None
            sig = [0] * self.n
            for c in suffix:
                sig[int(c) - 1] += 1
            return tuple(sig)
        sig = [0] * self.n
        for c in suffix:
            if c not in self.independents:
                return None
            sig[self.independents.index(c)] += 1
        return tuple(sig)

    def name(self, v: VarId) -> str:
        if v.is_indep:
            return self.independents[v.index]
        if not any(v.sigma):
            return self.dependents[v.index]
        for al in self.aliases:
            if al.dependent != v.index:
                continue
            if al.style == "k":
                nz = [i for i, s in enumerate(v.sigma) if s]
                if nz == [al.direction]:
                    return f"{al.prefix}{v.sigma[al.direction]}"
            elif al.style == "idx":
                if self.n <= 9:
                    return al.prefix + "".join(str(i + 1) * s for i, s in enumerate(v.sigma))
            else:
                return al.prefix + "".join(self.independents[i] * s for i, s in enumerate(v.sigma))
        if any(s > 9 for s in v.sigma):
            raise ValueError(f"no printable name for {v!r} in this context")
        return f"u{v.index + 1}_{''.join(map(str, v.sigma))}"

    # -- coordinates ------------------------------------------------------
    def x(self, i: int) -> VarId:
        return VarId.indep(i)

    def u(self, j: int, sigma: Sequence[int] | None = None) -> VarId:
        return VarId.jet(j, tuple(sigma) if sigma is not None else (0,) * self.n)

    def jets_of_order(self, k: int) -> List[VarId]:
        return [VarId.jet(j, s) for s in multi_indices(self.n, k) for j in range(self.m)]

    def coordinates(self, k: int) -> List[VarId]:
        """All coordinates of order <= k, in the documented variable order."""
        out = [VarId.indep(i) for i in range(self.n)]
        for r in range(k + 1):
            out.extend(self.jets_of_order(r))
        return sorted(out, key=lambda v: v.sort_key)


# -- total derivatives ---------------------------------------------------
def total_derivative(f: RatFun, i: int, ctx: JetContext | None = None) -> RatFun:
    """``D_i f`` with ``D_i = d/dx^i + sum u^j_{sigma+1_i} d/du^j_sigma``."""
    return apply_derivation(f, lambda p: RatFun._parts(p.total_derivative(i), 1, 0, {}))


def total_derivative_multi(f: RatFun, sigma: Sequence[int], ctx: JetContext | None = None) -> RatFun:
    for i, s in enumerate(sigma):
        for _ in range(s):
            f = total_derivative(f, i)
    return f


@dataclass
class HorizontalCovector:
    components: List[RatFun]


def horizontal_differential(f: RatFun, ctx: JetContext) -> HorizontalCovector:
    return HorizontalCovector([total_derivative(f, i) for i in range(ctx.n)])


def fiber_dimension(ctx: JetContext, k: int) -> int:
    """Dimension of the fiber of ``J^k -> J^(k-1)``: ``m * C(n+k-1, k)``."""
    if k < 1:
        raise ValueError("fiber dimension is defined for k >= 1")
    return ctx.m * math.comb(ctx.n + k - 1, k)


def max_order(f: RatFun) -> int:
    """Jet order of ``f`` (0 for functions of x and u only, and for constants)."""
    return max(f.max_order(), 0)

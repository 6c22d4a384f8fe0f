"""Prolongation of point vector fields and point transformations to jets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import OrderMismatch, SchemaError, SingularJacobian
from .jet import JetContext, add_index, multi_indices, sub_index, total_derivative, unit
from .linalg import rf_det, rf_inverse
from .poly import VarId, var_id
from .ratfun import ZERO, RatFun, partial, subs_ids


def _check_point_level(exprs: Iterable[RatFun], what: str) -> None:
    for e in exprs:
        if e.max_order() > 0:
            raise SchemaError(f"{what} may only depend on independents and dependents")


@dataclass(frozen=True, eq=False)
class PointVectorField:
    """``X = alpha^i d/dx^i + beta^j d/du^j`` with coefficients on the base."""

    alpha: Tuple[RatFun, ...]
    beta: Tuple[RatFun, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(RatFun.coerce(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(RatFun.coerce(b) for b in self.beta))
        _check_point_level(self.alpha + self.beta, "point vector field coefficients")

    def scaled(self, c) -> "PointVectorField":
        return PointVectorField(tuple(a * c for a in self.alpha), tuple(b * c for b in self.beta), self.name)

    def __add__(self, other: "PointVectorField") -> "PointVectorField":
        return PointVectorField(
            tuple(a + b for a, b in zip(self.alpha, other.alpha)),
            tuple(a + b for a, b in zip(self.beta, other.beta)),
        )


@dataclass(frozen=True)
class GeneratingSection:
    phi: Tuple[RatFun, ...]


def generating_function(X: PointVectorField, ctx: JetContext) -> GeneratingSection:
    """``phi^j = beta^j - u^j_{1_i} alpha^i``."""
    phi = []
    for j in range(ctx.m):
        p = X.beta[j]
        for i in range(ctx.n):
            if not X.alpha[i].is_zero():
                p = p - RatFun.var(ctx.u(j, unit(ctx.n, i))) * X.alpha[i]
        phi.append(p)
    return GeneratingSection(tuple(phi))


Reducer = Callable[[RatFun], RatFun]


class ProlongedVectorField:
    """Lift of a point field to ``J^k``; coefficients are computed on demand.

    With ``reducer`` set, every coefficient is reduced modulo an equation as it
    is produced.  That is sound when ``reducer`` commutes with total
    derivatives up to the equation (true for a formally integrable system and
    its reduction table), and keeps intermediate expressions small.
    """

    def __init__(self, X: PointVectorField, k: int, ctx: JetContext, reducer: Optional[Reducer] = None):
        if k < 0:
            raise ValueError("prolongation order must be >= 0")
        self.field = X
        self.order = k
        self.ctx = ctx
        self._reduce = reducer or (lambda f: f)
        self._cache: Dict[VarId, RatFun] = {}
        self._dalpha: Dict[Tuple[int, int], RatFun] = {}

    def _d_alpha(self, i: int, s: int) -> RatFun:
        key = (i, s)
        if key not in self._dalpha:
            self._dalpha[key] = self._reduce(total_derivative(self.field.alpha[s], i))
        return self._dalpha[key]

    def coeff(self, v: VarId) -> RatFun:
        if v.is_indep:
            return self.field.alpha[v.index]
        if v.order > self.order:
            raise OrderMismatch(f"{v!r} exceeds prolongation order {self.order}")
        hit = self._cache.get(v)
        if hit is not None:
            return hit
        n = self.ctx.n
        if v.order == 0:
            value = self._reduce(self.field.beta[v.index])
        else:
            # eta_{s+1_i} = D_i(eta_s) - sum_t u_{s+1_t} D_i(alpha^t), i = last nonzero slot
            i = max(t for t in range(n) if v.sigma[t])
            prev = sub_index(v.sigma, unit(n, i))
            value = total_derivative(self.coeff(VarId.jet(v.index, prev)), i)
            for t in range(n):
                da = self._d_alpha(i, t)
                if not da.is_zero():
                    value = value - RatFun.var(VarId.jet(v.index, add_index(prev, unit(n, t)))) * da
            value = self._reduce(value)
        self._cache[v] = value
        return value

    def items(self) -> List[Tuple[VarId, RatFun]]:
        return [(v, self.coeff(v)) for v in self.ctx.coordinates(self.order)]

    @property
    def coefficients(self) -> Dict[VarId, RatFun]:
        return dict(self.items())

    def __call__(self, f: RatFun) -> RatFun:
        return lie_derivative(self, f)


def prolong_field(X: PointVectorField, k: int, ctx: JetContext, reducer: Optional[Reducer] = None) -> ProlongedVectorField:
    return ProlongedVectorField(X, k, ctx, reducer)


def prolonged_coefficient_direct(X: PointVectorField, v: VarId, ctx: JetContext) -> RatFun:
    """The closed form ``D_sigma(phi^j) + alpha^i u^j_{sigma+1_i}`` (cross-check)."""
    if v.is_indep:
        return X.alpha[v.index]
    phi = generating_function(X, ctx).phi[v.index]
    value = phi
    for i, s in enumerate(v.sigma):
        for _ in range(s):
            value = total_derivative(value, i)
    for i in range(ctx.n):
        if not X.alpha[i].is_zero():
            value = value + X.alpha[i] * RatFun.var(VarId.jet(v.index, add_index(v.sigma, unit(ctx.n, i))))
    return value


def lie_derivative(Xk: ProlongedVectorField, f: RatFun) -> RatFun:
    """``sum_c coeff(c) * df/dc`` over the coordinates ``c`` of ``f``."""
    f = RatFun.coerce(f)
    if f.max_order() > Xk.order:
        raise OrderMismatch(f"expression has order {f.max_order()} > prolongation order {Xk.order}")
    total = ZERO
    for v in sorted(f.variables(), key=lambda w: w.sort_key):
        c = Xk.coeff(v)
        if c.is_zero():
            continue
        total = total + c * partial(f, v)
    return total


# -- point transformations ------------------------------------------------
@dataclass
class PointMap:
    """``x^i -> X_new^i(x,u)``, ``u^j -> U_new^j(x,u)`` with prolonged images."""

    X_new: Tuple[RatFun, ...]
    U_new: Tuple[RatFun, ...]
    images: Dict[VarId, RatFun] = field(default_factory=dict)
    order: int = 0

    def __post_init__(self):
        self.X_new = tuple(RatFun.coerce(a) for a in self.X_new)
        self.U_new = tuple(RatFun.coerce(a) for a in self.U_new)
        _check_point_level(self.X_new + self.U_new, "point map components")


def prolong_point_map(phi: PointMap, k: int, ctx: JetContext) -> PointMap:
    """Images of all coordinates up to order ``k``.

    For each ``u^j_sigma`` the images ``v_i`` of ``u^j_{sigma+1_i}`` solve
    ``sum_i v_i D_s(X_new^i) = D_s(image of u^j_sigma)``.
    """
    n = ctx.n
    images: Dict[VarId, RatFun] = {}
    for i in range(n):
        images[ctx.x(i)] = phi.X_new[i]
    for j in range(ctx.m):
        images[ctx.u(j)] = phi.U_new[j]
    if k >= 1:
        jac = [[total_derivative(phi.X_new[i], s) for i in range(n)] for s in range(n)]
        if rf_det(jac).is_zero():
            raise SingularJacobian("total Jacobian of the map vanishes identically")
        inv = rf_inverse(jac)
        for r in range(k):
            for sigma in multi_indices(n, r):
                for j in range(ctx.m):
                    src = images[ctx.u(j, sigma)]
                    rhs = [total_derivative(src, s) for s in range(n)]
                    for i in range(n):
                        target = ctx.u(j, add_index(sigma, unit(n, i)))
                        if target in images:
                            continue
                        val = ZERO
                        for s in range(n):
                            if not inv[i][s].is_zero() and not rhs[s].is_zero():
                                val = val + inv[i][s] * rhs[s]
                        images[target] = val
    return PointMap(phi.X_new, phi.U_new, images, k)


def pullback(f: RatFun, phi_k: PointMap) -> RatFun:
    """``f o Phi^(k)``: substitute every coordinate by its image."""
    f = RatFun.coerce(f)
    if f.max_order() > phi_k.order:
        raise OrderMismatch("expression order exceeds the prolongation order of the map")
    return subs_ids(f, {var_id(v): img for v, img in phi_k.images.items()})

import pytest
import sympy as sp

from jetvariant.errors import OrderMismatch, SchemaError, SingularJacobian
from jetvariant.jet import JetContext
from jetvariant.parse import parse
from jetvariant.prolong import (
    PointMap,
    PointVectorField,
    generating_function,
    lie_derivative,
    prolong_field,
    prolong_point_map,
    prolonged_coefficient_direct,
    pullback,
)

from oracle import prolonged_coefficients, to_sympy


def field(ctx, alpha, beta, name=""):
    return PointVectorField(tuple(parse(a, ctx) for a in alpha), tuple(parse(b, ctx) for b in beta), name)


def test_generating_function(curves):
    P = lambda s: parse(s, curves)
    assert generating_function(field(curves, ["1"], ["0"]), curves).phi == (P("-y1"),)
    assert generating_function(field(curves, ["0"], ["1"]), curves).phi == (P("1"),)
    assert generating_function(field(curves, ["-y"], ["x"]), curves).phi == (P("x + y*y1"),)


def test_rejects_jet_coefficients(curves):
    with pytest.raises(SchemaError):
        field(curves, ["y1"], ["0"])


def test_translation_acts_trivially(curves):
    Xk = prolong_field(field(curves, ["1"], ["0"]), 4, curves)
    for k in range(5):
        assert Xk.coeff(curves.u(0, (k,))).is_zero()


def test_rotation_coefficients(curves):
    rot = field(curves, ["-y"], ["x"])
    Xk = prolong_field(rot, 3, curves)
    P = lambda s: parse(s, curves)
    assert Xk.coeff(curves.lookup("y1")) == P("1 + y1^2")
    assert Xk.coeff(curves.lookup("y2")) == P("3*y1*y2")
    assert Xk.coeff(curves.lookup("y3")) == P("4*y1*y3 + 3*y2^2")
    assert lie_derivative(Xk, P("y1")) == P("1 + y1^2")
    assert lie_derivative(prolong_field(field(curves, ["1"], ["0"]), 2, curves), P("y2")).is_zero()
    assert lie_derivative(Xk, P("y2^2/(1+y1^2)^3")).is_zero()


def test_lie_derivative_order_mismatch(curves):
    Xk = prolong_field(field(curves, ["-y"], ["x"]), 2, curves)
    with pytest.raises(OrderMismatch):
        lie_derivative(Xk, parse("y3", curves))


def test_two_formulas_and_sympy_oracle(plane):
    X = field(plane, ["x*u", "y^2 - x"], ["u^2 + x*y"])
    Xk = prolong_field(X, 3, plane)
    ref = prolonged_coefficients([to_sympy(a, plane) for a in X.alpha], [to_sympy(b, plane) for b in X.beta], plane, 3)
    for v in plane.coordinates(3):
        c = Xk.coeff(v)
        if not v.is_indep:
            assert c == prolonged_coefficient_direct(X, v, plane)
        assert sp.expand(to_sympy(c, plane) - ref[v]) == 0


def test_point_maps(curves):
    P = lambda s: parse(s, curves)
    ident = prolong_point_map(PointMap((P("x"),), (P("y"),)), 3, curves)
    for k in range(4):
        v = curves.u(0, (k,))
        assert ident.images[v] == parse(curves.name(v), curves)
    refl = prolong_point_map(PointMap((P("-x"),), (P("-y"),)), 2, curves)
    assert refl.images[curves.lookup("y1")] == P("y1")
    assert refl.images[curves.lookup("y2")] == P("-y2")
    assert pullback(P("y2^2/(1+y1^2)^3"), refl) == P("y2^2/(1+y1^2)^3")
    scale = prolong_point_map(PointMap((P("2*x"),), (P("2*y"),)), 2, curves)
    assert scale.images[curves.lookup("y1")] == P("y1")
    assert scale.images[curves.lookup("y2")] == P("y2/2")
    with pytest.raises(SingularJacobian):
        prolong_point_map(PointMap((P("y - y"),), (P("y"),)), 1, curves)


def test_finite_versus_infinitesimal(curves):
    # K^2 is fixed by the reflection; the signed curvature K is not (it flips sign)
    P = lambda s: parse(s, curves)
    num = P("y2")
    mirror = prolong_point_map(PointMap((P("x"),), (P("-y"),)), 2, curves)
    assert pullback(num, mirror) == -num
    assert pullback(P("1+y1^2"), mirror) == P("1+y1^2")
    # the half-turn also flips K on graphs, since it reverses the direction of x
    refl = prolong_point_map(PointMap((P("-x"),), (P("-y"),)), 2, curves)
    assert pullback(num, refl) == -num
    rot = prolong_point_map(PointMap((P("3/5*x - 4/5*y"),), (P("4/5*x + 3/5*y"),)), 2, curves)
    assert pullback(P("y2^2/(1+y1^2)^3"), rot) == P("y2^2/(1+y1^2)^3")


def test_composition_functorial(curves):
    P = lambda s: parse(s, curves)
    a = PointMap((P("x + y"),), (P("y"),))
    b = PointMap((P("2*x"),), (P("y - x"),))
    # compose on the base: (b o a)(x, y) = b(a(x, y))
    ab = PointMap((P("2*(x + y)"),), (P("y - (x + y)"),))
    A, B, AB = (prolong_point_map(m, 3, curves) for m in (a, b, ab))
    for k in range(1, 4):
        v = curves.u(0, (k,))
        # pulling back through b then a equals pulling back through the composite
        assert pullback(B.images[v], A) == AB.images[v]

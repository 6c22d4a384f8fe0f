import pytest
import sympy as sp

from jetvariant.jet import (
    JetContext,
    fiber_dimension,
    horizontal_differential,
    multi_indices,
    total_derivative,
    total_derivative_multi,
)
from jetvariant.parse import parse

from oracle import D, to_sympy


def test_total_derivative_examples(curves, gas):
    P = lambda s: parse(s, curves)
    assert total_derivative(P("y1"), 0, curves) == P("y2")
    assert total_derivative(P("x*y2"), 0, curves) == P("y2 + x*y3")
    assert total_derivative(parse("w*w_1", gas), 1, gas) == parse("w_1^2 + w*w_2", gas)


def test_total_derivative_multi():
    ctx = JetContext.build(["x", "y"], ["u"])
    u = parse("u", ctx)
    assert total_derivative_multi(u, (0, 0), ctx) == u
    assert total_derivative_multi(parse("u1_00", ctx), (1, 1), ctx) == parse("u1_11", ctx)
    c = JetContext.build(["x"], ["y"], {"y{k}": "y"})
    assert total_derivative_multi(parse("y1", c), (2,), c) == parse("y3", c)


def test_horizontal_differential(curves):
    ctx = JetContext.build(["x", "y"], ["u"], {"u_{names}": "u"})
    assert horizontal_differential(parse("x", ctx), ctx).components == [parse("1", ctx), parse("0", ctx)]
    assert horizontal_differential(parse("u", ctx), ctx).components == [parse("u_x", ctx), parse("u_y", ctx)]
    (c,) = horizontal_differential(parse("y2^2/(1+y1^2)^3", curves), curves).components
    assert c == parse("2*y2*y3/(1+y1^2)^3 - 6*y1*y2^3/(1+y1^2)^4", curves)


@pytest.mark.parametrize("n,m,k,expect", [(1, 1, 5, 1), (2, 1, 2, 3), (2, 1, 6, 7), (3, 2, 2, 12)])
def test_fiber_dimension(n, m, k, expect):
    ctx = JetContext.build([f"x{i}" for i in range(n)], [f"u{j}" for j in range(m)])
    assert fiber_dimension(ctx, k) == expect
    assert len(ctx.jets_of_order(k)) == expect


def test_coordinate_enumeration_duplicate_free():
    ctx = JetContext.build(["x", "y", "z"], ["u", "v"])
    coords = ctx.coordinates(3)
    assert len(coords) == len(set(coords)) == 3 + 2 * (1 + 3 + 6 + 10)
    assert len(multi_indices(3, 3)) == 10


def test_variable_order_documented():
    ctx = JetContext.build(["x", "y"], ["u"], {"u_{names}": "u"})
    names = [ctx.name(v) for v in ctx.coordinates(2)]
    assert names == ["x", "y", "u", "u_y", "u_x", "u_yy", "u_xy", "u_xx"]


def test_against_sympy(gas):
    f = parse("w_2^2*w_x/(w + x*y) - w_xy^3", gas)
    for i in range(2):
        got = to_sympy(total_derivative(f, i, gas), gas)
        want = D(to_sympy(f, gas), i, gas)
        assert sp.simplify(got - want) == 0

from fractions import Fraction

import pytest
import sympy as sp

from jetvariant.errors import (
    DenominatorVanishes,
    DivisionByZero,
    ExpressionSyntaxError,
    NonIntegerExponent,
    UnboundVariable,
    UnknownVariable,
)
from jetvariant.expr import (
    ONE,
    ZERO,
    RatFun,
    evaluate,
    format_expr,
    parse,
    partial,
    rf_add,
    rf_div,
    rf_eq,
    rf_mul,
    rf_pow,
)
from jetvariant.jet import JetContext

from oracle import to_sympy


def P(s, ctx):
    return parse(s, ctx)


def test_field_arithmetic(curves):
    assert rf_add(P("1/2", curves), P("1/3", curves)) == P("5/6", curves)
    assert rf_add(P("x/y", curves), P("-x/y", curves)).is_zero()
    lhs = rf_add(P("y2/(1+y1^2)", curves), P("y2*y1^2/(1+y1^2)", curves))
    assert rf_eq(lhs, P("y2", curves))


def test_mul_div_pow(curves):
    assert rf_mul(P("x/y", curves), P("y/x", curves)) == ONE
    assert rf_div(rf_pow(P("y2", curves), 3), rf_pow(P("y2", curves), 2)) == P("y2", curves)
    k2 = rf_div(rf_pow(P("y2", curves), 2), rf_pow(P("1+y1^2", curves), 3))
    assert k2 == P("y2^2/(1+y1^2)^3", curves)
    assert k2.den.leading_term()[1] > 0
    with pytest.raises(DivisionByZero):
        rf_div(ONE, ZERO)
    with pytest.raises(DivisionByZero):
        rf_pow(ZERO, -1)


def test_equality_by_cross_multiplication(curves):
    ctx = JetContext.build(["x", "y", "z"], ["u"])
    assert rf_eq(P("x/y", ctx), P("(x*z)/(y*z)", ctx))
    assert not rf_eq(P("y2/(1+y1^2)^3", curves), P("y2/(1+y1^2)^2", curves))


def test_partial(curves):
    x, y1 = curves.lookup("x"), curves.lookup("y1")
    assert partial(P("x^2*y3", curves), x) == P("2*x*y3", curves)
    assert partial(P("1/y1", curves), y1) == P("-1/y1^2", curves)
    assert partial(P("y2^2/(1+y1^2)^3", curves), y1) == P("-6*y1*y2^2/(1+y1^2)^4", curves)


def test_evaluate(curves):
    v = curves.lookup
    k2 = P("y2^2/(1+y1^2)^3", curves)
    assert evaluate(k2, {v("y1"): 0, v("y2"): 1}) == 1
    with pytest.raises(DenominatorVanishes):
        evaluate(P("1/x", curves), {v("x"): 0})
    assert evaluate(P("3*y2*y4-5*y3^2", curves), {v("y2"): 1, v("y3"): 1, v("y4"): 2}) == 1
    with pytest.raises(UnboundVariable):
        evaluate(P("x+y", curves), {v("x"): 1})
    assert evaluate(P("x/3", curves), {v("x"): Fraction(1, 2)}) == Fraction(1, 6)


def test_parse_examples(curves, gas):
    assert P("-(x - x)", curves).is_zero()
    R = P("9*w_2^2*w_5 - 45*w_2*w_3*w_4 + 40*w_3^3", gas)
    assert R.is_polynomial()
    assert format_expr(R, gas) == "9*w_2^2*w_5 - 45*w_2*w_3*w_4 + 40*w_3^3"


@pytest.mark.parametrize("src", ["x +", "(x", "x)", "2^y", "x ** 2", "", "3/0"])
def test_parse_errors(curves, src):
    with pytest.raises((ExpressionSyntaxError, NonIntegerExponent, DivisionByZero)):
        P(src, curves)


def test_parse_error_position(curves):
    with pytest.raises(ExpressionSyntaxError) as e:
        P("x + * y", curves)
    assert e.value.pos == 4


def test_unknown_and_fractional_exponent(curves):
    with pytest.raises(UnknownVariable):
        P("z + 1", curves)
    with pytest.raises(NonIntegerExponent):
        P("y1^(1/2)", curves)


def test_precedence(curves):
    # ^ binds tighter than unary minus, which binds tighter than * and /
    assert P("-x^2", curves) == P("-(x^2)", curves)
    assert P("2*x/3*y", curves) == P("(2/3)*x*y", curves)
    assert P("1 - 2 - 3", curves) == P("-4", curves)


def test_print_fixed_order(curves, gas):
    assert format_expr(P("y1+x", curves), curves) == "x + y1"
    assert format_expr(ZERO, curves) == "0"
    assert format_expr(P("w*w_1", gas), gas) == "w*w_1"


def test_print_round_trip_examples(curves):
    for s in ["y2^2/(1+y1^2)^3", "(3*y2*y4-5*y3^2)^3/y2^8", "-x/7 + 1/(x*y - 1)", "x^255", "(x+1)/(2*y)"]:
        f = P(s, curves)
        assert P(format_expr(f, curves), curves) == f


def test_sympy_oracle_agrees(curves):
    for s in ["y2^2/(1+y1^2)^3 + x/(y-1)", "(x+y)^5 - 3*x*y1/(y2+1)^2"]:
        f = P(s, curves)
        e = sp.sympify(s.replace("^", "**"))
        assert sp.simplify(to_sympy(f, curves) - e) == 0

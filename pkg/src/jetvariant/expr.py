"""Exact arithmetic layer in one namespace: polynomials, rational functions, text I/O."""

from .parse import format_expr, format_poly, parse
from .poly import Poly, VarId
from .ratfun import (
    ONE,
    ZERO,
    RatFun,
    evaluate,
    partial,
    rf_add,
    rf_div,
    rf_eq,
    rf_inv,
    rf_mul,
    rf_pow,
    rf_sub,
    subs,
)

__all__ = [
    "ONE", "ZERO", "Poly", "RatFun", "VarId", "evaluate", "format_expr", "format_poly", "parse",
    "partial", "rf_add", "rf_div", "rf_eq", "rf_inv", "rf_mul", "rf_pow", "rf_sub", "subs",
]

"""Text front-end for rational functions.

Grammar::

    expr     := term (("+" | "-") term)*
    term     := factor (("*" | "/") factor)*
    factor   := "-"? base ("^" int)?
    base     := rational | ident | "(" expr ")"
    rational := int ("/" int)?

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.  Exponents
are integer literals only.  A rational literal ``a/b`` and the quotient of two
integer factors denote the same value, so the grammar ambiguity is harmless.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Mapping, Optional, Tuple

from .errors import ExpressionSyntaxError, NonIntegerExponent
from .jet import JetContext
from .poly import Poly, decode, var_of
from .ratfun import RatFun, rf_inv

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)
_TRAILING = re.compile(r"\s*$")


def _tokenize(src: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        if _TRAILING.match(src, pos):
            break
        m = _TOKEN.match(src, pos)
        if not m:
            bad = pos
            while src[bad].isspace():
                bad += 1
            raise ExpressionSyntaxError(f"unexpected character {src[bad]!r}", src, bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, ctx: JetContext, names: Optional[Mapping[str, RatFun]]):
        self.src = src
        self.ctx = ctx
        self.names = names or {}
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, msg: str):
        raise ExpressionSyntaxError(msg, self.src, self.tok[2])

    def eat(self, value: str) -> bool:
        if self.tok[0] == "op" and self.tok[1] == value:
            self.i += 1
            return True
        return False

    def parse(self) -> RatFun:
        if self.tok[0] == "end":
            self.error("empty expression")
        result = self.expr()
        if self.tok[0] != "end":
            self.error(f"unexpected token {self.tok[1]!r}")
        return result

    def expr(self) -> RatFun:
        acc = self.term()
        while True:
            if self.eat("+"):
                acc = acc + self.term()
            elif self.eat("-"):
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> RatFun:
        acc = self.power(*self.factor())
        while True:
            if self.eat("*"):
                acc = acc * self.power(*self.factor())
            elif self.eat("/"):
                pos = self.tok[2]
                base, e, neg = self.factor()
                if base.is_zero():
                    raise ExpressionSyntaxError("division by zero", self.src, pos)
                # divide by base**e as (1/base)**e so the factor structure survives
                acc = acc * self.power(rf_inv(base), e, neg)
            else:
                return acc

    @staticmethod
    def power(base: RatFun, e: int, neg: bool) -> RatFun:
        if e == 0:
            value = RatFun.const(1)
        else:
            value = base ** e
        return -value if neg else value

    def factor(self) -> Tuple[RatFun, int, bool]:
        neg = self.eat("-")
        value = self.base()
        e = 1
        if self.eat("^"):
            kind, text, pos = self.tok
            if kind != "num" or "." in text:
                raise NonIntegerExponent(f"exponent must be an integer literal (position {pos})")
            self.i += 1
            e = int(text)
        return value, e, neg

    def base(self) -> RatFun:
        kind, text, pos = self.tok
        if kind == "num":
            if "." in text:
                self.error("decimal literals are not supported")
            self.i += 1
            return RatFun(int(text))
        if kind == "ident":
            self.i += 1
            if text in self.names:
                return self.names[text]
            return RatFun.var(self.ctx.lookup(text))
        if self.eat("("):
            inner = self.expr()
            if not self.eat(")"):
                self.error("expected ')'")
            return inner
        self.error(f"unexpected token {text!r}" if text else "unexpected end of input")


def parse(src: str, ctx: JetContext, names: Optional[Mapping[str, RatFun]] = None) -> RatFun:
    """Parse ``src`` in ``ctx``.  ``names`` binds extra identifiers to values."""
    return _Parser(src, ctx, names).parse()


def _format_coeff(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly, ctx: JetContext) -> str:
    if p.is_zero():
        return "0"
    out = []
    for k, (m, c) in enumerate(p.sorted_terms()):
        factors = []
        for vid, e in sorted(decode(m), key=lambda t: var_of(t[0]).sort_key):
            nm = ctx.name(var_of(vid))
            factors.append(nm if e == 1 else f"{nm}^{e}")
        neg = c < 0
        a = -c if neg else c
        if factors:
            body = "*".join(factors)
            if a != 1:
                body = f"{_format_coeff(a)}*{body}"
        else:
            body = _format_coeff(a)
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _factor_sort_key(p: Poly):
    return (p.total_degree(), len(p), [
        (sorted((var_of(v).sort_key, e) for v, e in decode(m)), c) for m, c in p.sorted_terms()
    ])


def format_expr(f: RatFun, ctx: JetContext) -> str:
    """Canonical text for ``f``; ``parse(format_expr(f, ctx), ctx) == f``.

    The denominator is written as a chain of divisions (constant, then
    variables, then the polynomial factors) so reparsing keeps its factors.
    """
    num = format_poly(f.num, ctx)
    if f.den_is_one():
        return num
    parts = []
    if f.dc != 1:
        parts.append(str(f.dc))
    for vid, e in sorted(decode(f.dm), key=lambda t: var_of(t[0]).sort_key):
        nm = ctx.name(var_of(vid))
        parts.append(nm if e == 1 else f"{nm}^{e}")
    for core in sorted(f.df, key=_factor_sort_key):
        e = f.df[core]
        body = f"({format_poly(core, ctx)})"
        parts.append(body if e == 1 else f"{body}^{e}")
    if len(f.num) > 1 or num.startswith("-"):
        num = f"({num})"
    return "/".join([num] + parts)

"""Exact linear algebra over Q (rank, nullspace) and over the RatFun field."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import DivisionByZero
from .ratfun import ONE, ZERO, RatFun


def _integer_rows(rows: Sequence[Sequence]) -> List[List[int]]:
    out = []
    for row in rows:
        fr = [Fraction(v) for v in row]
        lcm = 1
        for v in fr:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        out.append([int(v * lcm) for v in fr])
    return out


def bareiss_rank(rows: Sequence[Sequence]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination."""
    a = [r for r in _integer_rows(rows) if any(r)]
    if not a:
        return 0
    ncols = len(a[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(a)) if a[r][col]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, len(a)):
            f = a[r][col]
            row = a[r]
            prow = a[rank]
            a[r] = [(p * row[c] - f * prow[c]) // prev for c in range(ncols)]
        prev = p
        rank += 1
        if rank == len(a):
            break
    return rank


def rref(rows: Sequence[Sequence], ncols: int):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    a = [[Fraction(v) for v in row] for row in rows]
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(a)) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][col]
        a[r] = [v * inv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[List[Fraction]]:
    """Basis of ``{v : rows . v = 0}``, one vector per free column, in column order.

    The basis is canonical: it is read off the reduced echelon form, so it does
    not depend on the order of the input rows.
    """
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


# -- matrices over RatFun ---------------------------------------------------
def rf_solve(a: Sequence[Sequence[RatFun]], b: Sequence[RatFun]) -> Optional[List[RatFun]]:
    """Solve ``a x = b`` over the RatFun field.

    Returns one solution (free unknowns set to zero) or ``None`` when the
    system is inconsistent.
    """
    rows = [list(r) + [rhs] for r, rhs in zip(a, b)]
    ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if not rows[i][col].is_zero()), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = ONE / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(rows)):
        if not rows[i][ncols].is_zero():
            return None
    x = [ZERO] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = rows[i][ncols]
    return x


def rf_inverse(a: Sequence[Sequence[RatFun]]) -> List[List[RatFun]]:
    """Inverse of a square RatFun matrix; raises DivisionByZero if singular."""
    n = len(a)
    rows = [list(a[i]) + [ONE if j == i else ZERO for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if not rows[i][col].is_zero()), None)
        if pivot is None:
            raise DivisionByZero("matrix is singular")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = ONE / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for i in range(n):
            if i != col and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return [row[n:] for row in rows]


def rf_det(a: Sequence[Sequence[RatFun]]) -> RatFun:
    n = len(a)
    rows = [list(r) for r in a]
    det = ONE
    for col in range(n):
        pivot = next((i for i in range(col, n) if not rows[i][col].is_zero()), None)
        if pivot is None:
            return ZERO
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        p = rows[col][col]
        det = det * p
        for i in range(col + 1, n):
            if not rows[i][col].is_zero():
                f = rows[i][col] / p
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return det


__all__ = ["bareiss_rank", "rref", "nullspace", "rf_solve", "rf_inverse", "rf_det", "DivisionByZero"]

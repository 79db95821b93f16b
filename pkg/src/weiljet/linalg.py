"""Exact rank and determinant by fraction-free (Bareiss) elimination."""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def _integer_rows(rows: Sequence[Sequence]) -> list:
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        m = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * m) for x in row])
    return out


def bareiss(rows: Sequence[Sequence]):
    """Row-reduce an integer copy of ``rows``; returns (rank, echelon, sign).

    Every intermediate entry is an integer minor of the input, so no fractions
    appear after the initial denominator clearing.
    """
    a = _integer_rows(rows)
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    prev = 1
    rank = 0
    sign = 1
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((i for i in range(rank, nrows) if a[i][col] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            a[rank], a[pivot] = a[pivot], a[rank]
            sign = -sign
        p = a[rank][col]
        for i in range(rank + 1, nrows):
            for j in range(col + 1, ncols):
                a[i][j] = (a[i][j] * p - a[i][col] * a[rank][j]) // prev
            a[i][col] = 0
        prev = p
        rank += 1
    return rank, a, sign


def exact_rank(rows: Sequence[Sequence]) -> int:
    return bareiss(rows)[0]


def exact_det(rows: Sequence[Sequence]) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    scale = Fraction(1)
    for row in rows:
        row = [Fraction(x) for x in row]
        scale *= lcm(*(x.denominator for x in row))
    rank, a, sign = bareiss(rows)
    if rank < n:
        return Fraction(0)
    return Fraction(sign * a[n - 1][n - 1]) / scale

"""Exact integer and rational matrix helpers.

Matrices are plain lists of rows.  Nothing in here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v: Sequence, a: Sequence[Sequence]) -> list:
    return [sum(x * y for x, y in zip(v, col)) for col in zip(*a)]


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def det(a: Sequence[Sequence]):
    """Determinant.  Bareiss elimination for integers, plain Gauss for Fractions."""
    n = len(a)
    if n == 0:
        return 1
    if any(isinstance(x, Fraction) for row in a for x in row):
        m = [[Fraction(x) for x in row] for row in a]
        sign = 1
        result = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if m[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != k:
                m[k], m[piv] = m[piv], m[k]
                sign = -sign
            result *= m[k][k]
            for i in range(k + 1, n):
                f = m[i][k] / m[k][k]
                if f:
                    for j in range(k, n):
                        m[i][j] -= f * m[k][j]
        return sign * result
    m = [list(map(int, row)) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        mkk = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(k + 1, n):
                row_i[j] = (mkk * row_i[j] - mik * row_k[j]) // prev
        prev = mkk
    return sign * m[n - 1][n - 1]


def leading_minors(g: Sequence[Sequence[int]]) -> list[int]:
    """All leading principal minors of an integer matrix (Bareiss pivots)."""
    n = len(g)
    m = [list(row) for row in g]
    out = []
    prev = 1
    for k in range(n):
        mkk = m[k][k]
        out.append(mkk)
        if mkk == 0:
            break
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                m[i][j] = (mkk * m[i][j] - mik * m[k][j]) // prev
        prev = mkk
    return out


def is_positive_definite(g: Sequence[Sequence]) -> bool:
    n = len(g)
    if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
        return False
    if all(isinstance(x, int) for row in g for x in row):
        minors = leading_minors(g)
        return len(minors) == n and all(d > 0 for d in minors)
    return all(det([row[:k] for row in g[:k]]) > 0 for k in range(1, n + 1))


def inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [row[n:] for row in m]


def solve_left(p: Sequence[Sequence], c: Sequence[Sequence]) -> list[list[Fraction]]:
    """Return X with X·p = c (p square, invertible)."""
    return matmul(c, inverse(p))


def common_denominator(rows: Sequence[Sequence]) -> int:
    d = 1
    for row in rows:
        for x in row:
            d = lcm(d, Fraction(x).denominator)
    return d


def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form of the integer row span.

    Returns only the nonzero rows: pivots positive, pivot columns strictly
    increasing, entries above each pivot reduced into ``[0, pivot)``.
    """
    m = [list(map(int, r)) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    out: Matrix = []
    for col in range(ncols):
        # gcd-combine all remaining rows into one with the pivot in `col`
        piv = None
        rest = []
        for r in m:
            if r[col] == 0:
                rest.append(r)
                continue
            if piv is None:
                piv = r
                continue
            a, b = piv[col], r[col]
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            new_piv = [x * p + y * q for p, q in zip(piv, r)]
            other = [ag * q - bg * p for p, q in zip(piv, r)]
            piv = new_piv
            if any(other):
                rest.append(other)
        if piv is None:
            continue
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        m = [r for r in rest if any(r)]
        if not m:
            break
    # back-reduce entries above pivots
    pivcols = [next(j for j, x in enumerate(r) if x) for r in out]
    for i, pc in enumerate(pivcols):
        p = out[i][pc]
        for k in range(i):
            q = out[k][pc] // p
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], out[i])]
    return out


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def rank(rows: Sequence[Sequence]) -> int:
    d = common_denominator(rows)
    return len(hnf([[int(x * d) for x in r] for r in rows]))


def left_kernel(a: Sequence[Sequence[int]]) -> Matrix:
    """Integer basis (in HNF) of {x in Z^n : x·a = 0} for an n×k integer matrix."""
    n = len(a)
    if n == 0:
        return []
    k = len(a[0])
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    h = hnf(aug)
    basis = [r[k:] for r in h if not any(r[:k])]
    return hnf(basis)


def gcd_all(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g

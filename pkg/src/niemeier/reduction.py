"""LLL reduction and complete short-vector enumeration, all in integers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt, lcm
from typing import Iterator, Sequence

import numpy as np

from . import linalg
from .lattice import IntegerLattice, LatticeError, Vector


@dataclass(frozen=True)
class ShortVectorSet:
    """One representative per ± pair of the nonzero vectors with norm ≤ bound.

    Representatives have their first nonzero coordinate positive and are
    sorted by (norm, coordinates).
    """

    bound: int
    vectors: tuple[tuple[Vector, int], ...]

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def coords(self) -> list[Vector]:
        return [v for v, _ in self.vectors]

    def of_norm(self, n: int) -> list[Vector]:
        return [v for v, m in self.vectors if m == n]

    def signed(self, norm: int | None = None) -> list[Vector]:
        """Both signs of every vector (optionally of one norm), in (norm, coords) order."""
        base = [(m, v) for v, m in self.vectors if norm is None or m == norm]
        out = base + [(m, tuple(-x for x in v)) for m, v in base]
        out.sort()
        return [v for _, v in out]


def lll_gram(gram: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)):
    """Integral LLL acting on a Gram matrix.

    Returns ``(reduced_gram, T)`` with ``reduced_gram = T·gram·Tᵀ`` and T
    unimodular.  Everything stays in integers (Cohen's integral variant).
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie strictly between 1/4 and 1")
    p, q = delta.numerator, delta.denominator
    n = len(gram)
    g = [list(map(int, row)) for row in gram]
    h = linalg.identity(n)
    if n <= 1:
        return g, h
    # 1-indexed d (d[0] = 1) and lam[k][j] for j < k, both 0-indexed rows
    d = [1] + [0] * n
    lam = [[0] * n for _ in range(n)]
    d[1] = g[0][0]
    k, kmax = 1, 0

    def redi(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            qq = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            # b_k <- b_k - qq b_l on the Gram matrix
            for i in range(n):
                g[k][i] -= qq * g[l][i]
            for i in range(n):
                g[i][k] -= qq * g[i][l]
            hk, hl = h[k], h[l]
            for i in range(n):
                hk[i] -= qq * hl[i]
            lam[k][l] -= qq * d[l + 1]
            for i in range(l):
                lam[k][i] -= qq * lam[l][i]

    def swapi(k):
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]
        h[k], h[k - 1] = h[k - 1], h[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        b = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (b * t + lm * lam[i][k]) // d[k + 1]
        d[k] = b

    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = g[k][j]
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise LatticeError("Gram matrix is not positive definite")
                    d[k + 1] = u
        while True:
            redi(k, k - 1)
            lm = lam[k][k - 1]
            # Lovász: d_k d_{k-2} >= delta d_{k-1}^2 - lam^2  (1-indexed d)
            if q * d[k + 1] * d[k - 1] < p * d[k] * d[k] - q * lm * lm:
                swapi(k)
                k = max(1, k - 1)
                continue
            for l in range(k - 2, -1, -1):
                redi(k, l)
            k += 1
            break
    return g, h


def lll_reduce(L: IntegerLattice, delta: Fraction = Fraction(3, 4)):
    """LLL-reduce the basis of L.  Returns ``(reduced lattice, transform)``.

    The transform T is unimodular and the reduced basis is T·basis.
    """
    g, t = lll_gram(L.gram, delta)
    rows = linalg.matmul(t, L.numer)
    red = IntegerLattice(tuple(tuple(r) for r in rows), L.denom, L.name)
    assert [list(r) for r in red.gram] == g
    return red, t


@lru_cache(maxsize=512)
def _reduced(L: IntegerLattice):
    g, t = lll_gram(L.gram)
    return tuple(map(tuple, g)), tuple(map(tuple, t))


def reduced_data(L: IntegerLattice):
    """Cached ``(reduced_gram, T)`` for L."""
    return _reduced(L)


class _Enumerator:
    """Fincke–Pohst enumeration in exact integer arithmetic.

    With fraction-free elimination rows R_k (R_k[k] = d_k, the k-th leading
    minor) the form is Q(x) = Σ_k y_k² / (d_{k-1} d_k) with
    y_k = Σ_{j≥k} R_k[j] x_j, so every test below is an integer comparison.
    """

    def __init__(self, gram: Sequence[Sequence[int]]):
        n = len(gram)
        m = [list(map(int, row)) for row in gram]
        rows = []
        prev = 1
        for k in range(n):
            rows.append(m[k][:])
            mkk = m[k][k]
            if mkk <= 0:
                raise LatticeError("Gram matrix is not positive definite")
            for i in range(k + 1, n):
                mik = m[i][k]
                for j in range(k + 1, n):
                    m[i][j] = (mkk * m[i][j] - mik * m[k][j]) // prev
            prev = mkk
        self.n = n
        self.rows = rows
        self.d = [rows[k][k] for k in range(n)]
        dprev = [1] + self.d[:-1]
        dens = [a * b for a, b in zip(dprev, self.d)]
        self.W = 1
        for x in dens:
            self.W = lcm(self.W, x)
        self.w = [self.W // x for x in dens]

    def run(self, bound: int) -> Iterator[tuple[list[int], int]]:
        """Yield (x, norm) for nonzero x with norm ≤ bound, last nonzero coord > 0."""
        n = self.n
        if n == 0 or bound <= 0:
            return
        rows, d, w, W = self.rows, self.d, self.w, self.W
        x = [0] * n
        rem = [0] * (n + 1)
        hi = [0] * n
        rem[n] = bound * W
        k = n - 1
        # flag: all coordinates above level k are zero
        top_zero = [True] * (n + 1)

        def setup(k):
            s = 0
            rk = rows[k]
            for j in range(k + 1, n):
                if x[j]:
                    s += rk[j] * x[j]
            r = isqrt(rem[k + 1] // w[k])
            dk = d[k]
            lo = -((r + s) // dk)
            h = (r - s) // dk
            if top_zero[k + 1] and lo < 0:
                lo = 0
            return lo, h, s

        lo, hi[k], s_k = setup(k)
        x[k] = lo - 1
        svals = [0] * n
        svals[k] = s_k
        while True:
            x[k] += 1
            if x[k] > hi[k]:
                k += 1
                if k == n:
                    return
                continue
            y = d[k] * x[k] + svals[k]
            c = y * y * w[k]
            if c > rem[k + 1]:
                # the admissible range is an interval around the centre, so
                # once past it every larger x is excluded too
                if y > 0:
                    hi[k] = x[k]
                continue
            rem[k] = rem[k + 1] - c
            top_zero[k] = top_zero[k + 1] and x[k] == 0
            if k == 0:
                if not top_zero[0]:
                    yield x[:], (bound * W - rem[0]) // W
                continue
            k -= 1
            lo, hi[k], svals[k] = setup(k)
            x[k] = lo - 1


@lru_cache(maxsize=512)
def _enumerator(L: IntegerLattice) -> _Enumerator:
    g, _ = reduced_data(L)
    return _Enumerator(g)


def _normalise(v: Sequence[int]) -> Vector:
    for c in v:
        if c:
            return tuple(v) if c > 0 else tuple(-t for t in v)
    return tuple(v)


def _check_bound(bound) -> int:
    if isinstance(bound, bool) or not isinstance(bound, (int, np.integer)):
        if isinstance(bound, Fraction) and bound.denominator == 1:
            return int(bound)
        raise TypeError("norm bounds must be integers")
    return int(bound)


def short_vectors_reduced(L: IntegerLattice, bound: int) -> list[tuple[list[int], int]]:
    """Raw enumeration in LLL-reduced coordinates (unsorted, unnormalised)."""
    return list(_enumerator(L).run(_check_bound(bound)))


def short_vectors(L: IntegerLattice, bound: int) -> ShortVectorSet:
    """All nonzero vectors of norm ≤ bound up to sign, canonically ordered."""
    bound = _check_bound(bound)
    _, t = reduced_data(L)
    out = []
    for x, m in _enumerator(L).run(bound):
        v = linalg.vecmat(x, t)
        out.append((m, _normalise(v)))
    out.sort()
    return ShortVectorSet(bound, tuple((v, m) for m, v in out))


def short_vector_array(L: IntegerLattice, bound: int, signed: bool = True):
    """Short vectors as numpy arrays ``(coords, norms)`` in L's own coordinates.

    With ``signed`` both v and -v are present; rows follow the global
    (norm, coords) order.
    """
    sv = short_vectors(L, bound)
    vecs = sv.signed() if signed else sv.coords()
    if not vecs:
        return np.zeros((0, L.rank), dtype=np.int64), np.zeros(0, dtype=np.int64)
    arr = np.array(vecs, dtype=np.int64)
    g = np.array(L.gram, dtype=np.int64)
    norms = np.einsum("ij,jk,ik->i", arr, g, arr)
    return arr, norms


def minimum_norm(L: IntegerLattice) -> int:
    enum = _enumerator(L)
    b = 1
    while True:
        best = None
        for _, m in enum.run(b):
            if best is None or m < best:
                best = m
        if best is not None:
            return best
        b += 1


def theta_prefix(L: IntegerLattice, k: int) -> list[int]:
    """Counts of vectors of norm 0..k (both signs)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    counts = [0] * (k + 1)
    counts[0] = 1
    if k == 0:
        return counts
    for _, m in _enumerator(L).run(k):
        counts[m] += 2
    return counts

"""Automorphism groups, isometry tests, orbits and pointwise stabilizers.

All searches run in LLL-reduced coordinates, where automorphisms have small
integer entries and fit in int64.  Groups are exposed in the lattice's own
coordinates: if the reduced basis is T·basis then U = T⁻¹·U_red·T.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .lattice import IntegerLattice, LatticeError, is_even
from .reduction import ShortVectorSet, minimum_norm, reduced_data, short_vectors_reduced, theta_prefix

# inner-product tables are precomputed below this many short vectors
_TABLE_LIMIT = 5000
# budget (multiply-adds) for the inner-product histograms used as fingerprints
_FINGERPRINT_BUDGET = 3 * 10 ** 8


class IsometryError(ValueError):
    pass


# ---------------------------------------------------------------- utilities

def _int_inverse(x: np.ndarray) -> np.ndarray:
    """Exact inverse of a unimodular int64 matrix."""
    inv = np.rint(np.linalg.inv(x.astype(np.float64))).astype(np.int64)
    if np.array_equal(x @ inv, np.eye(len(x), dtype=np.int64)):
        return inv
    exact = linalg.inverse(x.tolist())
    if any(v.denominator != 1 for row in exact for v in row):
        raise IsometryError("matrix is not unimodular")
    return np.array([[int(v) for v in row] for row in exact], dtype=np.int64)


def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer product through BLAS; exact while entries stay far below 2**53."""
    return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)


class _VectorIndex:
    """Row lookup for an int64 matrix via a 64-bit hash and binary search."""

    def __init__(self, rows: np.ndarray):
        rng = np.random.default_rng(0x5EED)
        self.rows = rows
        self.mult = rng.integers(1, 2 ** 62, size=rows.shape[1], dtype=np.int64).astype(np.uint64) | np.uint64(1)
        keys = self._keys(rows)
        self.order = np.argsort(keys, kind="stable")
        self.sorted = keys[self.order]

    def _keys(self, rows: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return (rows.astype(np.uint64) * self.mult).sum(axis=1, dtype=np.uint64)

    def find(self, rows: np.ndarray) -> np.ndarray:
        """Indices of ``rows`` (−1 where absent)."""
        rows = np.atleast_2d(rows)
        keys = self._keys(rows)
        pos = np.searchsorted(self.sorted, keys)
        pos = np.minimum(pos, len(self.sorted) - 1)
        idx = self.order[pos] if len(self.sorted) else np.full(len(rows), -1)
        hit = (self.sorted[pos] == keys) if len(self.sorted) else np.zeros(len(rows), bool)
        idx = np.where(hit, idx, -1)
        ok = idx >= 0
        if ok.any() and not np.array_equal(self.rows[idx[ok]], rows[ok]):
            # hash collision: fall back to a dictionary for this call
            table = {r.tobytes(): i for i, r in enumerate(self.rows)}
            return np.array([table.get(r.tobytes(), -1) for r in rows], dtype=np.int64)
        return idx


class _Frame:
    """Signed short vectors of norm ≤ bound in LLL-reduced coordinates."""

    def __init__(self, L: IntegerLattice, bound: int):
        g, _ = reduced_data(L)
        self.gram = np.array(g, dtype=np.int64)
        self.rank = L.rank
        self.bound = bound
        raw = short_vectors_reduced(L, bound)
        if raw:
            half = np.array([x for x, _ in raw], dtype=np.int64)
            norms = np.array([m for _, m in raw], dtype=np.int64)
            vecs = np.vstack([half, -half])
            norms = np.concatenate([norms, norms])
        else:
            vecs = np.zeros((0, self.rank), dtype=np.int64)
            norms = np.zeros(0, dtype=np.int64)
        keys = [vecs[:, j] for j in range(self.rank - 1, -1, -1)] + [norms]
        order = np.lexsort(keys) if len(vecs) else np.zeros(0, dtype=np.int64)
        self.S = vecs[order]
        self.norms = norms[order]
        self.n = len(self.S)
        self.SG = _matmul(self.S, self.gram)
        self.index = _VectorIndex(self.S)
        self.classes = {int(m): int(c) for m, c in zip(*np.unique(self.norms, return_counts=True))}
        self.table = None
        if 0 < self.n <= _TABLE_LIMIT:
            self.table = _matmul(self.SG, self.S.T).astype(np.int16)
        self._fp_cache: dict[tuple, np.ndarray] = {}

    def ip(self, t: int, cand: np.ndarray) -> np.ndarray:
        if self.table is not None:
            return self.table[t, cand]
        return self.SG[cand] @ self.S[t]

    def find(self, rows) -> np.ndarray:
        return self.index.find(np.asarray(rows, dtype=np.int64))

    def perm(self, x: np.ndarray) -> np.ndarray:
        p = self.find(_matmul(self.S, x))
        if (p < 0).any():
            raise IsometryError("matrix does not preserve the short-vector set")
        return p

    def fingerprint_classes(self, target_norms: Iterable[int]) -> tuple[int, ...]:
        """Norm classes histogrammed in fingerprints (depends only on class sizes)."""
        rows = sum(self.classes.get(m, 0) for m in set(target_norms))
        chosen, work = [], 0
        for m, size in sorted(self.classes.items(), key=lambda kv: (kv[1], kv[0])):
            cost = rows * size * self.rank
            if work + cost > _FINGERPRINT_BUDGET:
                break
            chosen.append(m)
            work += cost
        return tuple(sorted(chosen))

    def fingerprints(self, norm: int, classes: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        """(indices of norm class, histogram rows) for one norm class."""
        key = (norm, classes)
        if key in self._fp_cache:
            return self._fp_cache[key]
        idx = np.nonzero(self.norms == norm)[0]
        width = 2 * self.bound + 1
        hist = np.zeros((len(idx), width * len(classes)), dtype=np.int32)
        for ci, m in enumerate(classes):
            other = self.S[self.norms == m].astype(np.float64)
            step = max(1, 2_000_000 // max(1, len(other)))
            for s in range(0, len(idx), step):
                rows = idx[s:s + step]
                ips = np.rint(self.SG[rows].astype(np.float64) @ other.T).astype(np.int64) + self.bound
                flat = (np.arange(len(rows))[:, None] * width + ips).ravel()
                h = np.bincount(flat, minlength=len(rows) * width).reshape(len(rows), width)
                hist[s:s + step, ci * width:(ci + 1) * width] = h
        self._fp_cache[key] = (idx, hist)
        return idx, hist

    def orbit_mask(self, start: int, perms: list[np.ndarray]) -> np.ndarray:
        seen = np.zeros(self.n, dtype=bool)
        seen[start] = True
        frontier = np.array([start])
        while frontier.size and perms:
            nxt = np.unique(np.concatenate([p[frontier] for p in perms]))
            nxt = nxt[~seen[nxt]]
            seen[nxt] = True
            frontier = nxt
        return seen


def _frame_bound(L: IntegerLattice) -> int:
    return _frame_basis(L)[0]


def _independent_rows(S: np.ndarray, r: int) -> list[int]:
    """Greedy choice of r linearly independent rows of S (exact elimination)."""
    pivots: dict[int, list[Fraction]] = {}
    chosen = []
    for i, row in enumerate(S):
        v = [Fraction(int(x)) for x in row]
        for c, p in pivots.items():
            if v[c]:
                f = v[c]
                v = [a - f * b for a, b in zip(v, p)]
        lead = next((c for c in range(r) if v[c]), None)
        if lead is None:
            continue
        f = v[lead]
        pivots[lead] = [a / f for a in v]
        chosen.append(i)
        if len(chosen) == r:
            break
    return chosen


@lru_cache(maxsize=64)
def _frame_basis(L: IntegerLattice) -> tuple[int, np.ndarray]:
    """(bound, B): the least norm bound whose short vectors have full rank,
    and a base B of such vectors (rows in reduced coordinates).

    B is pushed towards a Z-basis by exchanging rows for short vectors with
    fractional coordinates; when the short vectors span a proper sublattice
    the matcher checks integrality at its leaves instead.
    """
    g, _ = reduced_data(L)
    r = L.rank
    top = max(g[i][i] for i in range(r))
    eye = np.eye(r, dtype=np.int64)
    for b in range(minimum_norm(L), top):
        raw = short_vectors_reduced(L, b)
        if len(raw) < r:
            continue
        raw.sort(key=lambda xm: xm[1])
        S = np.array([x for x, _ in raw], dtype=np.int64)
        pick = _independent_rows(S, r)
        if len(pick) < r:
            continue
        B = S[pick]
        d = abs(linalg.det(B.tolist()))
        while d > 1:
            C = np.abs(S.astype(np.float64) @ np.linalg.inv(B.astype(np.float64)))
            C[C < 0.5 / d] = np.inf
            v, j = np.unravel_index(np.argmin(C), C.shape)
            if C[v, j] > 1 - 0.5 / d:
                break
            trial = B.copy()
            trial[j] = S[v]
            nd = abs(linalg.det(trial.tolist()))
            if not 0 < nd < d:
                break
            B, d = trial, nd
        return b, B
    return top, eye


@lru_cache(maxsize=64)
def _frame(L: IntegerLattice, bound: int) -> _Frame:
    return _Frame(L, bound)


def _base_order(gram: np.ndarray) -> list[int]:
    """Order base vectors: small norm first, then most connected."""
    r = len(gram)
    left = list(range(r))
    order: list[int] = []
    while left:
        def score(j):
            links = sum(1 for i in order if gram[i, j] != 0)
            return (gram[j, j], -links, j)
        j = min(left, key=score)
        order.append(j)
        left.remove(j)
    return order


_GLUE_LIMIT = 1 << 16


def _glue_order(adj: np.ndarray, d: int, bg: np.ndarray) -> list[int]:
    """Base order for a base of index d: cover small glue supports first.

    The glue group L/span(B) has d elements, written as coefficient vectors
    mod d.  Repeatedly taking the element that needs the fewest new base
    vectors lets the integrality tests fire early in the search.
    """
    if d == 1 or d > _GLUE_LIMIT:
        return _base_order(bg)
    gens = {tuple(int(x) % d for x in row) for row in adj}
    gens.discard((0,) * len(adj))
    seen = {(0,) * len(adj)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                e = tuple((a + b) % d for a, b in zip(g, h))
                if e not in seen:
                    seen.add(e)
                    nxt.append(e)
        frontier = nxt
    supports = {frozenset(i for i, x in enumerate(g) if x) for g in seen}
    supports.discard(frozenset())
    placed: list[int] = []
    have: set[int] = set()
    while True:
        open_ = [sup - have for sup in supports if not sup <= have]
        if not open_:
            break
        new = min(open_, key=lambda x: (len(x), sorted(x)))
        sub = _base_order(bg[np.ix_(sorted(new), sorted(new))])
        for j in sub:
            placed.append(sorted(new)[j])
        have |= new
    rest = [j for j in _base_order(bg) if j not in have]
    return placed + rest


class _Matcher:
    """Backtracking for images of a base of ``src`` among short vectors of ``dst``.

    The base B consists of short vectors of src.  An assignment with the
    right Gram matrix gives the rational map B⁻¹X, which is an isometry as
    soon as it is integral; for a Z-basis B this is automatic.
    """

    def __init__(self, src: _Frame, dst: _Frame, base: np.ndarray):
        self.src, self.dst = src, dst
        r = src.rank
        self.r = r
        self.base = base
        self.det = abs(linalg.det(base.tolist()))
        self.adj = np.rint(np.linalg.inv(base.astype(np.float64)) * self.det).astype(np.int64)
        if not np.array_equal(base @ self.adj, self.det * np.eye(r, dtype=np.int64)):
            raise IsometryError("base matrix is too ill-conditioned")
        bg = base @ src.gram @ base.T
        idx = [int(i) for i in src.find(base)]
        if min(idx) < 0:
            raise IsometryError("short-vector bound does not cover the base")
        if self.det == 1:
            self.order = self._greedy_order(idx, bg)
        else:
            self.order = _glue_order(self.adj, self.det, bg)
        o = self.order
        self.gb = bg[np.ix_(o, o)]
        self.base_idx = [idx[k] for k in o]
        self.nodes = 0
        self.checks = self._glue_checks()
        self.profiles = None
        if src.table is not None and dst.table is not None:
            # sorted profile codes of all short vectors against base prefixes
            codes = np.zeros(src.n, dtype=np.int64)
            self.profiles = []
            for k in range(r):
                codes = self._step(codes, src.table[:, self.base_idx[k]])
                self.profiles.append(np.sort(codes))
        norms = sorted({int(self.gb[k, k]) for k in range(r)})
        classes = src.fingerprint_classes(norms)
        if dst.fingerprint_classes(norms) != classes:
            self.cand0 = None
            return
        self.cand0 = []
        for k in range(r):
            m = int(self.gb[k, k])
            sidx, shist = src.fingerprints(m, classes)
            didx, dhist = dst.fingerprints(m, classes)
            target = shist[np.searchsorted(sidx, self.base_idx[k])]
            self.cand0.append(didx[(dhist == target).all(axis=1)])

    def _greedy_order(self, idx: list[int], bg: np.ndarray) -> list[int]:
        """Base order for a Z-basis: next is the vector with the fewest
        images compatible with the vectors already placed."""
        src, r = self.src, self.r
        norms = sorted({int(bg[k, k]) for k in range(r)})
        classes = src.fingerprint_classes(norms)
        pools = []
        for k in range(r):
            sidx, shist = src.fingerprints(int(bg[k, k]), classes)
            own = shist[np.searchsorted(sidx, idx[k])]
            pools.append(sidx[(shist == own).all(axis=1)])
        left, placed = list(range(r)), []
        while left:
            j = min(left, key=lambda i: (len(pools[i]), bg[i, i], i))
            placed.append(j)
            left.remove(j)
            col = src.SG @ src.S[idx[j]]
            for i in left:
                pools[i] = pools[i][col[pools[i]] == bg[j, i]]
        return placed

    def _glue_checks(self) -> dict[int, np.ndarray]:
        """Integrality tests keyed by the level at which they become decidable.

        Row f (entries mod det, in base order) says Σ f_i·X_i ≡ 0 mod det for
        the images X_i.  The rows generate L over the span of the base; an
        echelon form from the right lets each test fire as early as possible.
        """
        d, r = self.det, self.r
        if d == 1:
            return {}
        f = (self.adj[:, self.order] % d).tolist()
        rev = [row[::-1] for row in f] + [[d * int(i == j) for j in range(r)] for i in range(r)]
        checks: dict[int, list] = {}
        for row in linalg.hnf(rev):
            row = [x % d for x in row[::-1]]
            if any(row):
                last = max(i for i, x in enumerate(row) if x)
                checks.setdefault(last, []).append(row[:last + 1])
        return {k: np.array(v, dtype=np.int64) for k, v in checks.items()}

    def _glue_ok(self, chosen: Sequence[int], level: int) -> bool:
        rows = self.checks.get(level)
        if rows is None:
            return True
        x = self.dst.S[list(chosen[:level + 1])]
        return not ((rows @ x) % self.det).any()

    @staticmethod
    def _step(codes: np.ndarray, col: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return codes * np.int64(0x9E3779B97F4A7C15 - (1 << 64)) + col.astype(np.int64) + 17

    def _profile(self, codes: np.ndarray, t: int, k: int) -> np.ndarray | None:
        """Profile codes after assigning t at level k, or None on mismatch."""
        nxt = self._step(codes, self.dst.table[:, t])
        if not np.array_equal(np.sort(nxt), self.profiles[k]):
            return None
        return nxt

    def _glue_filter(self, chosen: Sequence[int], c: np.ndarray) -> np.ndarray:
        """Candidates for level len(chosen) passing the tests due there."""
        k = len(chosen)
        rows = self.checks.get(k)
        if rows is None or not c.size:
            return c
        S = self.dst.S
        partial = rows[:, :k] @ S[list(chosen)] if k else np.zeros((len(rows), self.r), dtype=np.int64)
        vals = partial[None, :, :] + rows[:, k][None, :, None] * S[c][:, None, :]
        return c[~(vals % self.det).any(axis=(1, 2))]

    def filtered(self, assigned: Sequence[int], level: int) -> np.ndarray:
        c = self.cand0[level]
        for j, t in enumerate(assigned):
            if not c.size:
                break
            c = c[self.dst.ip(t, c) == self.gb[j, level]]
        return c

    def extend(self, assigned: list[int]) -> list[int] | None:
        if self.cand0 is None:
            return None
        k0 = len(assigned)
        if not all(self._glue_ok(assigned, k) for k in range(k0)):
            return None
        codes = None
        if self.profiles is not None:
            codes = np.zeros(self.dst.n, dtype=np.int64)
            for k, t in enumerate(assigned):
                codes = self._profile(codes, t, k)
                if codes is None:
                    return None
        cands = []
        for k in range(k0, self.r):
            c = self.filtered(assigned, k)
            if k == k0:
                c = self._glue_filter(assigned, c)
            if not c.size:
                return None
            cands.append(c)
        return self._dfs(list(assigned), cands, codes)

    def _dfs(self, chosen: list[int], cands: list[np.ndarray], codes=None) -> list[int] | None:
        if not cands:
            return chosen
        k = len(chosen)
        gb, ip = self.gb, self.dst.ip
        for t in cands[0]:
            self.nodes += 1
            t = int(t)
            nxt = None
            if codes is not None:
                nxt = self._profile(codes, t, k)
                if nxt is None:
                    continue
            rest = []
            for off, c in enumerate(cands[1:], start=k + 1):
                c = c[ip(t, c) == gb[k, off]]
                if off == k + 1 and self.checks:
                    c = self._glue_filter(chosen + [t], c)
                if not c.size:
                    break
                rest.append(c)
            else:
                res = self._dfs(chosen + [t], rest, nxt)
                if res is not None:
                    return res
        return None

    def _images(self, images: Sequence[int]) -> np.ndarray | None:
        x = np.zeros((self.r, self.r), dtype=np.int64)
        for k, t in enumerate(images):
            x[self.order[k]] = self.dst.S[t]
        num = self.adj @ x
        if self.det != 1 and (num % self.det).any():
            return None
        return num // self.det

    def matrix(self, images: Sequence[int]) -> np.ndarray:
        x = self._images(images)
        if x is None or not np.array_equal(x @ self.dst.gram @ x.T, self.src.gram):
            raise IsometryError("internal error: assignment does not give an isometry")
        return x


# ----------------------------------------------------------- stabilizer chain

class _Chain:
    """Stabilizer chain with Schreier trees over vector points (row action v·g)."""

    def __init__(self, rank: int, base: Sequence[Sequence[int]]):
        self.rank = rank
        self.base = [tuple(int(x) for x in b) for b in base]
        self.gens: list[np.ndarray] = []
        self.invs: list[np.ndarray] = []
        self.level_gens: list[list[int]] = [[] for _ in self.base]
        self.trees: list[dict] = [{b: None} for b in self.base]
        self.eye = np.eye(rank, dtype=np.int64)

    def size(self) -> int:
        out = 1
        for t in self.trees:
            out *= len(t)
        return out

    @staticmethod
    def _act(p: tuple, g: np.ndarray) -> tuple:
        return tuple(int(v) for v in np.asarray(p, dtype=np.int64) @ g)

    def _grow(self, level: int, new: Sequence[int]) -> None:
        tree = self.trees[level]
        gl = self.level_gens[level]
        pts = list(tree)
        frontier = []
        arr = np.array(pts, dtype=np.int64)
        for gi in new:
            imgs = arr @ self.gens[gi]
            for q, p in zip(map(tuple, imgs.tolist()), pts):
                if q not in tree:
                    tree[q] = (p, gi)
                    frontier.append(q)
        while frontier:
            arr = np.array(frontier, dtype=np.int64)
            nxt = []
            for gi in gl:
                imgs = arr @ self.gens[gi]
                for q, p in zip(map(tuple, imgs.tolist()), frontier):
                    if q not in tree:
                        tree[q] = (p, gi)
                        nxt.append(q)
            frontier = nxt

    def add(self, g: np.ndarray, ginv: np.ndarray, depth: int) -> None:
        """Add g as a strong generator on levels 0..depth (it fixes base[:depth])."""
        gi = len(self.gens)
        self.gens.append(g)
        self.invs.append(ginv)
        for lvl in range(min(depth + 1, len(self.base))):
            self.level_gens[lvl].append(gi)
            self._grow(lvl, [gi])

    def transversal_inverse(self, level: int, p: tuple) -> np.ndarray:
        """u⁻¹ where base[level]·u = p."""
        tree = self.trees[level]
        out = self.eye
        while tree[p] is not None:
            q, gi = tree[p]
            out = out @ self.invs[gi]
            p = q
        return out

    def transversal(self, level: int, p: tuple) -> np.ndarray:
        tree = self.trees[level]
        path = []
        while tree[p] is not None:
            q, gi = tree[p]
            path.append(gi)
            p = q
        out = self.eye
        for gi in reversed(path):
            out = out @ self.gens[gi]
        return out

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[int, np.ndarray]:
        for lvl in range(start, len(self.base)):
            p = self._act(self.base[lvl], g)
            if p not in self.trees[lvl]:
                return lvl, g
            g = g @ self.transversal_inverse(lvl, p)
        return len(self.base), g

    def is_identity(self, g: np.ndarray) -> bool:
        return np.array_equal(g, self.eye)


def _random_schreier_sims(gens, invs, rank, base, order: int, seed: int = 1) -> _Chain:
    """Stabilizer chain of a group of known order (stops at |chain| = order)."""
    chain = _Chain(rank, base)
    if order == 1 or not gens:
        return chain
    rng = random.Random(seed)
    state = [(g, i) for g, i in zip(gens, invs)]
    while len(state) < 10:
        state += state[:10 - len(state)]
    acc = (chain.eye, chain.eye)

    def step():
        nonlocal acc
        i, j = rng.sample(range(len(state)), 2)
        a, ai = state[i]
        b, bi = state[j]
        if rng.random() < 0.5:
            state[i] = (a @ b, bi @ ai)
        else:
            state[i] = (a @ bi, b @ ai)
        acc = (acc[0] @ state[i][0], state[i][1] @ acc[1])
        return acc

    for _ in range(40):
        step()
    # seed the chain with the generators themselves
    for g, gi in zip(gens, invs):
        _sift_in(chain, g, gi)
    guard = 0
    while chain.size() < order:
        g, gi = step()
        _sift_in(chain, g, gi)
        guard += 1
        if guard > 200000:
            raise IsometryError("Schreier–Sims did not converge")
    if chain.size() != order:
        raise IsometryError("stabilizer chain exceeds the group order")
    return chain


def _sift_in(chain: _Chain, g: np.ndarray, ginv: np.ndarray) -> bool:
    lvl, h = chain.sift(g)
    if lvl == len(chain.base) and chain.is_identity(h):
        return False
    if lvl == len(chain.base):
        raise IsometryError("base does not determine group elements")
    chain.add(h, _int_inverse(h), lvl)
    return True


def _deterministic_schreier_sims(gens, invs, rank, base) -> _Chain:
    """Sims' algorithm: sift every Schreier generator until all are trivial."""
    chain = _Chain(rank, base)
    for g, gi in zip(gens, invs):
        if not chain.is_identity(g):
            _sift_in(chain, g, gi)
    lvl = len(chain.base) - 1
    while lvl >= 0:
        restart = None
        for p in list(chain.trees[lvl]):
            u = chain.transversal(lvl, p)
            for gi in list(chain.level_gens[lvl]):
                q = chain._act(p, chain.gens[gi])
                s = u @ chain.gens[gi] @ chain.transversal_inverse(lvl, q)
                j, h = chain.sift(s, lvl + 1)
                if j == len(chain.base) and chain.is_identity(h):
                    continue
                if j == len(chain.base):
                    raise IsometryError("base does not determine group elements")
                chain.add(h, _int_inverse(h), j)
                restart = j
                break
            if restart is not None:
                break
        lvl = restart if restart is not None else lvl - 1
    return chain


# ------------------------------------------------------------------- groups

def _to_tuple(m) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in m)


@dataclass(frozen=True, eq=False)
class IsometryGroup:
    """A finite group of Gram-preserving integer matrices acting on rows."""

    lattice: IntegerLattice
    generators: tuple[tuple[tuple[int, ...], ...], ...]
    order: int
    _red: tuple = field(default=(), repr=False)

    def __post_init__(self):
        g = self.lattice.gram
        for u in self.generators:
            if linalg.matmul(linalg.matmul(u, g), linalg.transpose(u)) != [list(r) for r in g]:
                raise IsometryError("generator does not preserve the Gram matrix")
            if abs(linalg.det(u)) != 1:
                raise IsometryError("generator is not unimodular")
        if not self._red:
            t, tinv = _transforms(self.lattice)
            red = tuple(np.array(linalg.matmul(linalg.matmul(t, u), tinv), dtype=np.int64)
                        for u in self.generators)
            object.__setattr__(self, "_red", red)

    @classmethod
    def _from_reduced(cls, L: IntegerLattice, red: Sequence[np.ndarray], order: int) -> "IsometryGroup":
        t, tinv = _transforms(L)
        gens = tuple(_to_tuple(linalg.matmul(linalg.matmul(tinv, x.tolist()), t)) for x in red)
        return cls(L, gens, int(order), tuple(red))

    @classmethod
    def generated_by(cls, L: IntegerLattice, generators: Sequence[Sequence[Sequence[int]]]) -> "IsometryGroup":
        """Group generated by explicit matrices; the order is computed exactly."""
        probe = cls(L, tuple(_to_tuple(u) for u in generators), 1)
        chain = _deterministic_schreier_sims(list(probe._red), [_int_inverse(x) for x in probe._red],
                                             L.rank, np.eye(L.rank, dtype=np.int64).tolist())
        return cls(L, probe.generators, chain.size(), probe._red)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def contains(self, u) -> bool:
        t, tinv = _transforms(self.lattice)
        x = np.array(linalg.matmul(linalg.matmul(t, u), tinv), dtype=np.int64)
        chain = self._chain()
        lvl, h = chain.sift(x)
        return lvl == len(chain.base) and chain.is_identity(h)

    def _chain(self, base=None) -> _Chain:
        red = list(self._red)
        pts = list(base or []) + np.eye(self.rank, dtype=np.int64).tolist()
        return _random_schreier_sims(red, [_int_inverse(x) for x in red], self.rank, pts, self.order)

    def apply(self, u, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(linalg.vecmat(v, u))


@lru_cache(maxsize=256)
def _transforms(L: IntegerLattice):
    _, t = reduced_data(L)
    t = [list(r) for r in t]
    tinv = [[int(v) for v in row] for row in linalg.inverse(t)]
    return t, tinv


def _to_reduced(L: IntegerLattice, vectors) -> np.ndarray:
    _, tinv = _transforms(L)
    vecs = np.array(vectors, dtype=object).reshape(-1, L.rank)
    out = vecs.dot(np.array(tinv, dtype=object))
    return np.array(out.tolist(), dtype=np.int64).reshape(-1, L.rank)


def _from_reduced(L: IntegerLattice, rows: np.ndarray) -> list[tuple[int, ...]]:
    t, _ = _transforms(L)
    return [tuple(int(x) for x in linalg.vecmat(r, t)) for r in rows.tolist()]


@dataclass
class SearchStats:
    nodes: int = 0
    generators: int = 0
    orbit_sizes: list[int] = field(default_factory=list)


def automorphism_group(L: IntegerLattice, stats: SearchStats | None = None) -> IsometryGroup:
    """Full automorphism group by backtracking over images of the LLL basis.

    Levels are solved from the last base vector to the first.  At level i
    the candidate images of b_i (with b_0..b_{i-1} fixed) are tried outside
    the orbit already reached; a candidate without an extension rules out
    its whole orbit.  |Aut| is the product of the final orbit sizes.
    """
    if stats is None:
        return _cached_aut(L)
    return _automorphism_group(L, stats)


@lru_cache(maxsize=128)
def _cached_aut(L: IntegerLattice) -> IsometryGroup:
    return _automorphism_group(L, None)


def _automorphism_group(L: IntegerLattice, stats: SearchStats | None) -> IsometryGroup:
    bound, base = _frame_basis(L)
    frame = _frame(L, bound)
    m = _Matcher(frame, frame, base)
    r = L.rank
    gens: list[np.ndarray] = []
    perms: list[np.ndarray] = []
    sizes = [1] * r
    for i in range(r - 1, -1, -1):
        prefix = m.base_idx[:i]
        cands = m.filtered(prefix, i)
        orbit = frame.orbit_mask(m.base_idx[i], perms)
        dead = np.zeros(frame.n, dtype=bool)
        for c in cands:
            c = int(c)
            if orbit[c] or dead[c]:
                continue
            sol = m.extend(prefix + [c])
            if sol is None:
                dead |= frame.orbit_mask(c, perms)
                continue
            x = m.matrix(sol)
            gens.append(x)
            perms.append(frame.perm(x))
            orbit = frame.orbit_mask(m.base_idx[i], perms)
        sizes[i] = int(orbit.sum())
    order = 1
    for s in sizes:
        order *= s
    if stats is not None:
        stats.nodes = m.nodes
        stats.generators = len(gens)
        stats.orbit_sizes = sizes
    return IsometryGroup._from_reduced(L, gens, order)


def _invariants(L: IntegerLattice) -> tuple:
    from .roots import root_decomposition
    return (L.rank, L.determinant, is_even(L), minimum_norm(L), tuple(theta_prefix(L, 4)),
            str(root_decomposition(L)))


def is_isometric(L1: IntegerLattice, L2: IntegerLattice):
    """An integer matrix U with U·gram₂·Uᵀ = gram₁, or None."""
    if L1.rank != L2.rank or L1.determinant != L2.determinant or is_even(L1) != is_even(L2):
        return None
    if _invariants(L1) != _invariants(L2):
        return None
    bound, base = _frame_basis(L1)
    src, dst = _frame(L1, bound), _frame(L2, bound)
    if src.classes != dst.classes:
        return None
    m = _Matcher(src, dst, base)
    sol = m.extend([])
    if sol is None:
        return None
    x = m.matrix(sol)
    t1, t1inv = _transforms(L1)
    t2, _ = _transforms(L2)
    u = linalg.matmul(linalg.matmul(t1inv, x.tolist()), t2)
    g1 = [list(r) for r in L1.gram]
    if linalg.matmul(linalg.matmul(u, L2.gram), linalg.transpose(u)) != g1:
        raise IsometryError("internal error: isometry check failed")
    return _to_tuple(u)


# ------------------------------------------------------------------- orbits

@dataclass(frozen=True)
class Orbit:
    representative: tuple[int, ...]
    size: int
    members: tuple[int, ...]  # indices into the domain


@dataclass(frozen=True)
class OrbitPartition:
    domain: tuple[tuple[int, ...], ...]
    orbits: tuple[Orbit, ...]

    def __len__(self):
        return len(self.orbits)

    def representatives(self) -> list[tuple[int, ...]]:
        return [o.representative for o in self.orbits]

    def sizes(self) -> list[int]:
        return [o.size for o in self.orbits]


def _domain_list(S) -> list[tuple[int, ...]]:
    if isinstance(S, ShortVectorSet):
        return S.signed()
    return [tuple(int(x) for x in v) for v in S]


def orbits(G: IsometryGroup, S) -> OrbitPartition:
    """Partition S (closed under G) into G-orbits.

    Orbit representatives are the minimal elements under the order of S as
    given (for a ShortVectorSet: signs expanded, sorted by norm then coords);
    orbits are listed by representative.
    """
    dom = _domain_list(S)
    n = len(dom)
    if n == 0:
        return OrbitPartition((), ())
    red = _to_reduced(G.lattice, dom)
    index = _VectorIndex(red)
    rows, cols = [], []
    for x in G._red:
        img = index.find(_matmul(red, x))
        if (img < 0).any():
            raise IsometryError("vector set is not closed under the group")
        rows.append(np.arange(n))
        cols.append(img)
    if rows:
        graph = coo_matrix((np.ones(n * len(rows), dtype=np.int8),
                            (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = np.arange(n)
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(i)
    out = sorted((min(ix), ix) for ix in groups.values())
    return OrbitPartition(tuple(dom), tuple(Orbit(dom[first], len(ix), tuple(ix)) for first, ix in out))


def orbit_of(G: IsometryGroup, v: Sequence[int]) -> list[tuple[int, ...]]:
    """The orbit of a single vector (BFS)."""
    start = _to_reduced(G.lattice, [v])[0]
    seen = {tuple(start.tolist())}
    frontier = [start]
    while frontier:
        arr = np.array(frontier)
        nxt = []
        for x in G._red:
            for row in (arr @ x).tolist():
                t = tuple(row)
                if t not in seen:
                    seen.add(t)
                    nxt.append(row)
        frontier = nxt
    return sorted(_from_reduced(G.lattice, np.array(sorted(seen), dtype=np.int64)))


def pointwise_stabilizer(G: IsometryGroup, fixed: Sequence[Sequence[int]], seed: int = 1) -> IsometryGroup:
    """{g ∈ G : v·g = v for all v in fixed}, from a stabilizer chain whose base
    starts with the fixed vectors."""
    L = G.lattice
    fixed = [tuple(int(x) for x in v) for v in fixed]
    for v in fixed:
        if len(v) != L.rank:
            raise IsometryError("fixed vector has the wrong length")
    if not fixed:
        return G
    base = _to_reduced(L, fixed).tolist()
    red = list(G._red)
    chain = _random_schreier_sims(red, [_int_inverse(x) for x in red], L.rank,
                                  base + np.eye(L.rank, dtype=np.int64).tolist(), G.order, seed)
    k = len(fixed)
    order = 1
    for t in chain.trees[k:]:
        order *= len(t)
    gens = [chain.gens[i] for i in chain.level_gens[k]] if k < len(chain.base) else []
    for x in gens:
        for b in base:
            if (np.array(b) @ x).tolist() != b:
                raise IsometryError("internal error: Schreier generator moves a fixed vector")
    return IsometryGroup._from_reduced(L, gens, order)


def chain_order(L: IntegerLattice, generators) -> int:
    """Order of the group generated by explicit matrices (deterministic Schreier–Sims)."""
    return IsometryGroup.generated_by(L, generators).order


# -------------------------------------------------------------- documents

def group_to_document(G: IsometryGroup) -> dict:
    return {
        "lattice": G.lattice.name,
        "lattice_hash": G.lattice.fingerprint_hash(),
        "order": str(G.order),
        "generators": [[list(r) for r in u] for u in G.generators],
    }


def group_from_document(doc: dict, L: IntegerLattice) -> IsometryGroup:
    try:
        order = int(doc["order"])
        gens = tuple(_to_tuple(u) for u in doc["generators"])
    except (KeyError, TypeError, ValueError) as exc:
        raise LatticeError(f"malformed group document: {exc}") from exc
    return IsometryGroup(L, gens, order)

"""Norm-2 roots and their ADE decomposition."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .lattice import IntegerLattice
from .reduction import ShortVectorSet, short_vectors

EMPTY = "∅"
_FAMILY_ORDER = {"A": 0, "D": 1, "E": 2}


class RootSystemError(ValueError):
    pass


def root_count(family: str, rank: int) -> int:
    if family == "A":
        return rank * (rank + 1)
    if family == "D":
        return 2 * rank * (rank - 1)
    if family == "E":
        return {6: 72, 7: 126, 8: 240}[rank]
    raise ValueError(family)


def canonical_component(family: str, rank: int) -> list[tuple[str, int]]:
    """Rewrite low-rank D/E names into their standard equivalents."""
    if family == "D":
        if rank == 1:
            return []
        if rank == 2:
            return [("A", 1), ("A", 1)]
        if rank == 3:
            return [("A", 3)]
    if family == "E":
        if rank == 3:
            return [("A", 2), ("A", 1)]
        if rank == 4:
            return [("A", 4)]
        if rank == 5:
            return [("D", 5)]
    if family not in _FAMILY_ORDER or rank < 1:
        raise ValueError(f"not an ADE component: {family}{rank}")
    if family == "E" and rank > 8:
        raise ValueError(f"not an ADE component: {family}{rank}")
    return [(family, rank)]


@dataclass(frozen=True)
class RootSystemLabel:
    components: tuple[tuple[str, int], ...]

    @classmethod
    def from_components(cls, comps) -> "RootSystemLabel":
        out = []
        for fam, rk in comps:
            out.extend(canonical_component(fam, rk))
        out.sort(key=lambda c: (-c[1], _FAMILY_ORDER[c[0]]))
        return cls(tuple(out))

    @classmethod
    def parse(cls, text: str) -> "RootSystemLabel":
        text = text.strip()
        if text in (EMPTY, "", "0", "empty"):
            return cls(())
        comps = []
        for tok in text.replace(",", " ").split():
            base, _, mult = tok.partition("^")
            comps += [(base[0], int(base[1:]))] * (int(mult) if mult else 1)
        return cls.from_components(comps)

    @property
    def total_rank(self) -> int:
        return sum(r for _, r in self.components)

    @property
    def total_root_count(self) -> int:
        return sum(root_count(f, r) for f, r in self.components)

    def __str__(self) -> str:
        if not self.components:
            return EMPTY
        parts = []
        for comp, grp in groupby(self.components):
            k = len(list(grp))
            name = f"{comp[0]}{comp[1]}"
            parts.append(name if k == 1 else f"{name}^{k}")
        return " ".join(parts)


def root_vectors(L: IntegerLattice) -> ShortVectorSet:
    sv = short_vectors(L, 2)
    return ShortVectorSet(2, tuple((v, m) for v, m in sv.vectors if m == 2))


def _identify(rank: int, count: int) -> tuple[str, int]:
    if count == rank * (rank + 1):
        return ("A", rank)
    if rank >= 4 and count == 2 * rank * (rank - 1):
        return ("D", rank)
    if (rank, count) in ((6, 72), (7, 126), (8, 240)):
        return ("E", rank)
    raise RootSystemError(f"not a root system of ADE type (rank {rank}, {count} roots)")


def root_components(L: IntegerLattice) -> list[list[tuple[int, ...]]]:
    """Root representatives grouped into irreducible components."""
    roots = root_vectors(L).coords()
    if not roots:
        return []
    arr = np.array(roots, dtype=np.int64)
    g = np.array(L.gram, dtype=np.int64)
    ip = (arr.dot(g)).dot(arr.T)
    adj = csr_matrix((ip != 0).astype(np.int8))
    ncomp, labels = connected_components(adj, directed=False)
    comps = [[] for _ in range(ncomp)]
    for v, lab in zip(roots, labels):
        comps[lab].append(v)
    return comps


def root_decomposition(L: IntegerLattice) -> RootSystemLabel:
    comps = []
    for comp in root_components(L):
        rk = linalg.rank(comp)
        comps.append(_identify(rk, 2 * len(comp)))
    return RootSystemLabel.from_components(comps)


def weyl_group_order(L: IntegerLattice) -> int:
    """|W| of the root system of L by a root orbit-stabilizer chain.

    |W(R)| = |W(R)·r| · |W(R ∩ r⊥)|: the orbit comes from closing {r} under
    the reflections x ↦ x − (x, a)a, and by Steinberg's theorem the
    stabilizer of r is the reflection group of the roots orthogonal to r.
    Uses nothing but the roots and the Gram matrix.
    """
    sv = root_vectors(L).coords()
    if not sv:
        return 1
    g = np.array(L.gram, dtype=np.int64)
    arr = np.array(sv, dtype=np.int64)
    return _weyl_order(np.vstack([arr, -arr]), g)


def _weyl_order(R: np.ndarray, g: np.ndarray) -> int:
    if not len(R):
        return 1
    RG = R @ g
    r = R[0]
    seen = {tuple(r)}
    frontier = [r]
    while frontier:
        nxt = []
        for x in frontier:
            ips = RG @ x
            for a, c in zip(R, ips):
                if c:
                    y = tuple(x - c * a)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(np.array(y, dtype=np.int64))
        frontier = nxt
    return len(seen) * _weyl_order(R[RG @ r == 0], g)

"""Search for the rank-6 lattice L⁺ inside a host lattice.

L⁺ has basis (h, α₁, …, α₅) with h of norm 2, the α's of norm 3 and
pairwise orthogonal, and (h, α_i) = 1.  The search picks h among the roots,
then α₁, α₂, … among norm-3 vectors, using orbits of the automorphism group
and of the pointwise stabilizers of h and of (h, α₁) to skip equivalent
branches.  The last three α's are found by plain exhaustion.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import linalg
from .isometry import automorphism_group, orbits, pointwise_stabilizer
from .lattice import IntegerLattice, orthogonal_sublattice, sublattice_from_generators
from .reduction import short_vectors


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class LPlusTarget:
    gram6: tuple[tuple[int, ...], ...]

    @property
    def determinant(self) -> int:
        return linalg.det(self.gram6)


def lplus_target() -> LPlusTarget:
    g = [[0] * 6 for _ in range(6)]
    g[0][0] = 2
    for i in range(1, 6):
        g[i][i] = 3
        g[0][i] = g[i][0] = 1
    return LPlusTarget(tuple(tuple(r) for r in g))


def alpha6_identities(gram6=None) -> bool:
    """α₆ = 3h − Σα_i has norm 3, (h, α₆) = 1 and is orthogonal to α₁..α₅."""
    g = gram6 or lplus_target().gram6
    c = [3, -1, -1, -1, -1, -1]
    gc = linalg.vecmat(c, g)
    ok = linalg.dot(gc, c) == 3 and gc[0] == 1
    return ok and all(gc[i] == 0 for i in range(1, 6))


@dataclass(frozen=True)
class LPlusWitness:
    host: str
    vectors: tuple[tuple[int, ...], ...]
    host_hash: str = ""

    @property
    def h(self) -> tuple[int, ...]:
        return self.vectors[0]

    @property
    def alphas(self) -> tuple[tuple[int, ...], ...]:
        return self.vectors[1:]


def witness_gram(N: IntegerLattice, vectors) -> list[list[int]]:
    g = N.gram
    rows = [linalg.vecmat(v, g) for v in vectors]
    return [[linalg.dot(a, b) for b in vectors] for a in rows]


def verify_witness(N: IntegerLattice, W: LPlusWitness) -> bool:
    vecs = W.vectors
    if len(vecs) != 6:
        return False
    for v in vecs:
        if len(v) != N.rank or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            return False
    return witness_gram(N, vecs) == [list(r) for r in lplus_target().gram6]


def orthogonal_complement(N: IntegerLattice, W: LPlusWitness) -> IntegerLattice:
    """K = {x ∈ N : (x, v) = 0 for the six witness vectors}."""
    if not verify_witness(N, W):
        raise WitnessError("witness does not verify")
    name = f"{N.name}_K" if N.name else ""
    K = orthogonal_sublattice(N, W.vectors, name)
    assert K.rank == N.rank - 6
    return K


def is_saturated(N: IntegerLattice, W: LPlusWitness) -> bool:
    """Whether the span of the witness meets N exactly in the lattice it generates."""
    K = orthogonal_complement(N, W)
    kc = [N.coordinates(b) for b in K.basis]
    sat = orthogonal_sublattice(N, [[int(x) for x in row] for row in kc])
    sub, _ = sublattice_from_generators(N, W.vectors)
    return sat.determinant == sub.determinant


# ------------------------------------------------------------------- search

@dataclass
class EmbedStats:
    prune_depth: int = 2
    level0_candidates: int = 0
    level0_branches: int = 0
    level1_branches: int = 0
    level2_branches: int = 0
    clique_nodes: int = 0
    group_order: int | None = None
    seconds: float = 0.0
    found: bool = False


def _bitsets(mask: np.ndarray) -> list[int]:
    """Row i of a boolean matrix as a Python int (bit j = entry j)."""
    n = mask.shape[1]
    packed = np.packbits(mask, axis=1, bitorder="little")
    out = [int.from_bytes(row.tobytes(), "little") for row in packed]
    limit = (1 << n) - 1
    return [x & limit for x in out]


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _clique(adj: list[int], pool: int, need: int, stats: EmbedStats, lower: int = 0):
    """First increasing tuple of ``need`` pairwise-adjacent indices from ``pool``."""
    if need == 0:
        return []
    pool &= ~((1 << lower) - 1)
    for i in _iter_bits(pool):
        stats.clique_nodes += 1
        if need == 1:
            return [i]
        rest = pool & adj[i] & ~((1 << (i + 1)) - 1)
        if rest.bit_count() < need - 1:
            continue
        sub = _clique(adj, rest, need - 1, stats)
        if sub is not None:
            return [i] + sub
    return None


def embed_search(N: IntegerLattice, prune_depth: int = 2, stats: EmbedStats | None = None,
                 group=None) -> LPlusWitness | None:
    """First L⁺ witness in canonical search order, or None if none exists.

    prune_depth 0 uses no group at all (h over all roots, α₁ < … < α₅);
    1 uses Aut(N)-orbits on roots and H₁-orbits for α₁; 2 additionally uses
    H₂-orbits for α₂.
    """
    if prune_depth not in (0, 1, 2):
        raise ValueError("prune_depth must be 0, 1 or 2")
    stats = stats if stats is not None else EmbedStats()
    stats.prune_depth = prune_depth
    start = time.perf_counter()
    try:
        W = _search(N, prune_depth, stats, group)
        stats.found = W is not None
        return W
    finally:
        stats.seconds = time.perf_counter() - start


def _search(N: IntegerLattice, depth: int, stats: EmbedStats, group) -> LPlusWitness | None:
    sv = short_vectors(N, 3)
    roots = sv.signed(2)
    stats.level0_candidates = len(roots)
    if not roots:
        return None
    threes = sv.signed(3)
    if not threes:
        return None
    gram = np.array(N.gram, dtype=np.int64)
    T = np.array(threes, dtype=np.int64)
    TG = T @ gram
    if depth >= 1:
        G = group or automorphism_group(N)
        stats.group_order = G.order
        h_list = orbits(G, roots).representatives()
    else:
        G = None
        h_list = roots
    for h in h_list:
        stats.level0_branches += 1
        hv = np.array(h, dtype=np.int64)
        a1_idx = np.nonzero(TG @ hv == 1)[0]
        if len(a1_idx) < 5:
            continue
        A1 = T[a1_idx]
        orth = _bitsets((A1 @ gram @ A1.T) == 0)
        m = len(A1)
        full = (1 << m) - 1
        if depth == 0:
            sol = _clique(orth, full, 5, stats)
            stats.level1_branches += 1 if sol is not None else 0
            if sol is not None:
                return _witness(N, h, [A1[i] for i in sol])
            continue
        H1 = pointwise_stabilizer(G, [h])
        a1_vectors = [tuple(int(x) for x in row) for row in A1]
        first_reps = orbits(H1, a1_vectors).orbits
        for orb in first_reps:
            i1 = orb.members[0]
            stats.level1_branches += 1
            pool2 = orth[i1]
            if pool2.bit_count() < 4:
                continue
            if depth == 1:
                sol = _clique(orth, pool2, 4, stats)
                if sol is not None:
                    return _witness(N, h, [A1[i1]] + [A1[i] for i in sol])
                continue
            H2 = pointwise_stabilizer(H1, [a1_vectors[i1]])
            pool_idx = list(_iter_bits(pool2))
            second = orbits(H2, [a1_vectors[i] for i in pool_idx]).orbits
            for orb2 in second:
                i2 = pool_idx[orb2.members[0]]
                stats.level2_branches += 1
                pool3 = pool2 & orth[i2]
                if pool3.bit_count() < 3:
                    continue
                sol = _clique(orth, pool3, 3, stats)
                if sol is not None:
                    return _witness(N, h, [A1[i1], A1[i2]] + [A1[i] for i in sol])
    return None


def _witness(N: IntegerLattice, h, alphas) -> LPlusWitness:
    vecs = (tuple(int(x) for x in h),) + tuple(tuple(int(x) for x in a) for a in alphas)
    W = LPlusWitness(N.name, vecs, N.fingerprint_hash())
    if not verify_witness(N, W):
        raise WitnessError("internal error: search produced an invalid witness")
    return W


# ---------------------------------------------------------------- documents

def witness_to_document(N: IntegerLattice, W: LPlusWitness) -> dict:
    return {
        "host": W.host,
        "host_hash": W.host_hash or N.fingerprint_hash(),
        "vectors": [list(v) for v in W.vectors],
        "gram": witness_gram(N, W.vectors),
    }


def witness_from_document(doc: dict) -> LPlusWitness:
    try:
        vecs = tuple(tuple(int(x) for x in v) for v in doc["vectors"])
        return LPlusWitness(str(doc.get("host", "")), vecs, str(doc.get("host_hash", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise WitnessError(f"malformed witness document: {exc}") from exc


def write_witness(N: IntegerLattice, W: LPlusWitness, path) -> None:
    with open(path, "w") as fh:
        json.dump(witness_to_document(N, W), fh, indent=1)
        fh.write("\n")


def read_witness(path) -> tuple[LPlusWitness, dict]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise WitnessError(f"cannot read witness: {exc}") from exc
    return witness_from_document(doc), doc

"""Kneser 2-neighbours, even neighbours of odd lattices, and genus enumeration."""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .isometry import automorphism_group, is_isometric
from .lattice import (IntegerLattice, LatticeError, glue_group, even_sublattice, is_even,
                      is_unimodular, norm, overlattice, sublattice_from_generators)
from .mass import genus_mass
from .reduction import lll_reduce, minimum_norm, theta_prefix
from .roots import RootSystemLabel, root_decomposition

log = logging.getLogger(__name__)


class NeighborError(ValueError):
    pass


class MassOvershootError(RuntimeError):
    """The accumulated mass exceeded the genus mass: some isometry test is wrong."""


def two_neighbor(L: IntegerLattice, v: Sequence[int], name: str = "") -> IntegerLattice:
    """{x ∈ L : (x, v) even} + Z·v/2 for primitive v with norm ≡ 0 (mod 4)."""
    v = tuple(int(t) for t in v)
    if len(v) != L.rank:
        raise NeighborError("vector has the wrong length")
    if linalg.gcd_all(v) != 1:
        raise NeighborError("neighbour vector must be primitive")
    if norm(L, v) % 4:
        raise NeighborError("neighbour vector needs norm divisible by 4")
    r = L.rank
    a = [sum(L.gram[i][j] * v[j] for j in range(r)) % 2 for i in range(r)]
    if not any(a):
        raise NeighborError("v pairs evenly with all of L; L is not unimodular at 2")
    k = a.index(1)
    gens = []
    for i in range(r):
        e = [0] * r
        e[i] = 1
        if i == k:
            e[i] = 2
        elif a[i]:
            e[k] = 1
        gens.append(tuple(e))
    gens.append(tuple(Fraction(t, 2) for t in v))
    M, _ = sublattice_from_generators(L, gens, name)
    if not isinstance(M, IntegerLattice):
        raise NeighborError("neighbour is not integral")
    return M


def intersection_index(A: IntegerLattice, B: IntegerLattice) -> tuple[int, int]:
    """Indices ``([A : A∩B], [B : A∩B])`` for lattices spanning the same space."""
    coords = [A.coordinates(b) for b in B.basis]
    if any(c is None for c in coords) or len(coords) != A.rank:
        raise LatticeError("lattices do not span the same space")
    # x (A-coordinates) lies in B  ⇔  x·inv is integral
    inv = linalg.inverse(coords)
    den = linalg.common_denominator(inv)
    r = A.rank
    m = [[int(x * den) for x in row] for row in inv]
    stacked = m + [[den * int(i == j) for j in range(r)] for i in range(r)]
    xs = [row[:r] for row in linalg.left_kernel(stacked)]
    _, idx_a = sublattice_from_generators(A, xs)
    ratio = Fraction(A.determinant) / Fraction(B.determinant)
    num, dd = ratio.numerator, ratio.denominator
    sa, sb = isqrt(num), isqrt(dd)
    if sa * sa != num or sb * sb != dd:
        raise LatticeError("determinant ratio is not a square")
    return int(idx_a), int(idx_a * Fraction(sa, sb))


@dataclass(frozen=True, eq=False)
class NeighborPair:
    odd_lattice: IntegerLattice
    even_a: IntegerLattice
    even_b: IntegerLattice
    core: IntegerLattice


def fingerprint(L: IntegerLattice) -> tuple:
    """Cheap isometry invariants: (det, parity, minimum, theta to norm 4, root label)."""
    return (L.determinant, "even" if is_even(L) else "odd", minimum_norm(L),
            tuple(theta_prefix(L, 4)), str(root_decomposition(L)))


def even_neighbors(N: IntegerLattice) -> NeighborPair:
    """The two even unimodular lattices sharing N's even sublattice."""
    if N.rank % 8:
        raise NeighborError("even neighbours exist only in rank divisible by 8")
    if not is_unimodular(N) or is_even(N):
        raise NeighborError("expected an odd unimodular lattice")
    D = even_sublattice(N)
    evens = []
    seen_self = False
    for c in glue_group(D)[1:]:
        M = overlattice(D, [c])
        if not isinstance(M, IntegerLattice) or M.determinant != 1:
            continue
        if M.same_lattice(N):
            seen_self = True
            continue
        if not is_even(M):
            raise NeighborError("overlattice of the even sublattice is odd")
        evens.append(M)
    if not seen_self or len(evens) != 2:
        raise NeighborError("unexpected glue structure for the even sublattice")
    a, b = sorted(evens, key=fingerprint)
    base = N.name or "N"
    return NeighborPair(N, a.with_name(f"{base}.A"), b.with_name(f"{base}.B"), D)


def type_of(N: IntegerLattice) -> tuple[RootSystemLabel, RootSystemLabel]:
    """Root systems of the two even neighbours, larger label string first."""
    pair = even_neighbors(N)
    la, lb = root_decomposition(pair.even_a), root_decomposition(pair.even_b)
    return tuple(sorted((la, lb), key=str, reverse=True))


def format_type(t: tuple[RootSystemLabel, RootSystemLabel]) -> str:
    return f"({t[0]}, {t[1]})"


# --------------------------------------------------------------- genus search

@dataclass(frozen=True, eq=False)
class GenusRecord:
    lattice: IntegerLattice
    aut_order: int
    minimum: int
    fingerprint: tuple
    type_label: tuple[RootSystemLabel, RootSystemLabel] | None = None
    name: str = ""

    @property
    def parity(self) -> str:
        return self.fingerprint[1]

    @property
    def root_label(self) -> str:
        return self.fingerprint[4]

    def with_type(self) -> "GenusRecord":
        """Attach the type when the lattice is odd with rank divisible by 8."""
        L = self.lattice
        if self.parity != "odd" or L.rank % 8:
            return self
        return GenusRecord(L, self.aut_order, self.minimum, self.fingerprint, type_of(L), self.name)


def make_record(L: IntegerLattice, name: str = "", aut_order: int | None = None) -> GenusRecord:
    fp = fingerprint(L)
    order = aut_order if aut_order is not None else automorphism_group(L).order
    return GenusRecord(L, int(order), fp[2], fp, None, name or L.name)


@dataclass(frozen=True)
class MassReport:
    total: Fraction
    target: Fraction
    difference: Fraction
    passed: bool


def mass_check(records: Sequence[GenusRecord], rank: int | None = None,
               parity: str | None = None) -> MassReport:
    """Σ 1/|Aut| against the genus mass; passes iff the difference is exactly 0."""
    if records:
        rank = records[0].lattice.rank if rank is None else rank
        parity = records[0].parity if parity is None else parity
    if rank is None or parity is None:
        raise NeighborError("rank and parity are needed for an empty record list")
    total = sum((Fraction(1, r.aut_order) for r in records), Fraction(0))
    target = genus_mass(rank, parity)
    return MassReport(total, target, total - target, total == target)


_ORBIT_RANK_LIMIT = 20


def isotropic_class_representatives(L: IntegerLattice, group=None) -> list[tuple[int, ...]]:
    """0/1 representatives of the Aut(L)-orbits on nonzero classes x of L/2L
    with norm(x) ≡ 0 (mod 4); smallest class (as a bit mask) first."""
    r = L.rank
    if r > _ORBIT_RANK_LIMIT:
        raise NeighborError("orbit reduction on L/2L is limited to small rank")
    G = group or automorphism_group(L)
    n = 1 << r
    codes = np.arange(n, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(r)) & 1).astype(np.int64)
    gram = np.array(L.gram, dtype=np.int64)
    norms = np.einsum("ij,ij->i", bits @ gram, bits)
    weights = 1 << np.arange(r, dtype=np.int64)
    rows, cols = [], []
    for u in G.generators:
        img = (bits @ (np.array(u, dtype=np.int64) % 2)) % 2
        rows.append(codes)
        cols.append(img @ weights)
    if rows:
        graph = coo_matrix((np.ones(n * len(rows), dtype=np.int8),
                            (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = codes
    iso = (norms % 4 == 0) & (codes != 0)
    first: dict[int, int] = {}
    for c in codes[iso].tolist():
        first.setdefault(int(labels[c]), c)
    reps = sorted(first.values())
    return [tuple(int(b) for b in bits[c]) for c in reps]


def class_lifts(L: IntegerLattice, x: Sequence[int], even: bool) -> list[tuple[int, ...]]:
    """The two neighbour vectors x and x + 2e_k ((x, e_k) odd) of a class.

    For even genera only the lift of norm ≡ 0 (mod 8) is kept.
    """
    g = L.gram
    gx = linalg.vecmat(x, g)
    k = next(i for i, t in enumerate(gx) if t % 2)
    y = list(x)
    y[k] += 2
    lifts = [tuple(x), tuple(y)]
    if even:
        lifts = [v for v in lifts if norm(L, v) % 8 == 0]
    return lifts


def _neighbor_job(args):
    L, v, name = args
    M = two_neighbor(L, v)
    M, _ = lll_reduce(M)
    M = M.with_name(name)
    return M, fingerprint(M)


def genus_enumerate(seed: IntegerLattice, max_classes: int | None = None, *,
                    workers: int = 1, on_new: Callable[[GenusRecord], None] | None = None,
                    known: Sequence[GenusRecord] = (), samples_per_visit: int = 64,
                    rng_seed: int = 0, prefix: str = "") -> list[GenusRecord]:
    """Explore the 2-neighbour graph from ``seed`` until the mass is saturated.

    Classes are deduplicated by fingerprint and then by an isometry test.
    The partial mass is checked after every new class; exceeding the genus
    mass raises :class:`MassOvershootError`.
    """
    if not is_unimodular(seed):
        raise NeighborError("seed must be unimodular")
    rank, even = seed.rank, is_even(seed)
    parity = "even" if even else "odd"
    target = genus_mass(rank, parity)
    prefix = prefix or f"{parity[0]}{rank}_"
    records: list[GenusRecord] = []
    total = Fraction(0)

    def register(rec: GenusRecord) -> None:
        nonlocal total
        new_total = total + Fraction(1, rec.aut_order)
        if new_total > target:
            raise MassOvershootError(f"mass {new_total} exceeds genus mass {target}")
        if not new_total > total:
            raise MassOvershootError("mass failed to increase")
        total = new_total
        records.append(rec)
        log.info("class %d: %s |Aut|=%d mass %s/%s", len(records), rec.name, rec.aut_order, total, target)
        if on_new is not None:
            on_new(rec)

    def lookup(M: IntegerLattice, fp) -> bool:
        return any(r.fingerprint == fp and is_isometric(M, r.lattice) is not None for r in records)

    for rec in known:
        total += Fraction(1, rec.aut_order)
        records.append(rec)
    if total > target:
        raise MassOvershootError("checkpointed classes already exceed the genus mass")
    if not records:
        register(make_record(seed, f"{prefix}1"))

    def done() -> bool:
        return total == target or (max_classes is not None and len(records) >= max_classes)

    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    rng = random.Random(rng_seed)
    try:
        visit = 0
        while not done():
            if visit >= len(records):
                if rank <= _ORBIT_RANK_LIMIT:
                    # every class visited with full orbit reduction: cannot grow
                    break
                visit = 0
            L = records[visit].lattice
            visit += 1
            if rank <= _ORBIT_RANK_LIMIT:
                classes = isotropic_class_representatives(L)
            else:
                classes = _random_isotropic_classes(L, rng, samples_per_visit)
            vectors = [v for x in classes for v in class_lifts(L, x, even)]
            jobs = [(L, v, "") for v in vectors]
            results = pool.map(_neighbor_job, jobs, chunksize=4) if pool else map(_neighbor_job, jobs)
            for M, fp in results:
                if done():
                    break
                if fp[1] != parity or lookup(M, fp):
                    continue
                name = f"{prefix}{len(records) + 1}"
                register(make_record(M.with_name(name), name))
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    if total > target:
        raise MassOvershootError("mass exceeded")
    return sorted(records, key=lambda r: _sort_key(r.fingerprint))


def _sort_key(fp: tuple) -> tuple:
    return (fp[0], fp[1], fp[2], fp[3], fp[4])


def _random_isotropic_classes(L: IntegerLattice, rng: random.Random, count: int) -> list[tuple[int, ...]]:
    r = L.rank
    out = []
    while len(out) < count:
        x = tuple(rng.randint(0, 1) for _ in range(r))
        if any(x) and norm(L, x) % 4 == 0:
            out.append(x)
    return out


def genus_report_lines(records: Sequence[GenusRecord], fmt: str = "text") -> list[str]:
    """One line per class plus a mass trailer; ``structured`` gives JSON lines."""
    import json
    lines = []
    rep = mass_check(records) if records else None
    for r in records:
        t = format_type(r.type_label) if r.type_label else "-"
        if fmt == "structured":
            lines.append(json.dumps({"name": r.name, "determinant": r.lattice.determinant,
                                     "parity": r.parity, "minimum": r.minimum,
                                     "aut_order": str(r.aut_order), "roots": r.root_label,
                                     "type": t, "hash": r.lattice.fingerprint_hash()},
                                    ensure_ascii=False))
        else:
            lines.append(f"{r.name}\t{r.lattice.determinant}\t{r.parity}\t{r.minimum}\t"
                         f"{r.aut_order}\t{r.root_label}\t{t}")
    if rep is not None:
        if fmt == "structured":
            lines.append(json.dumps({"mass_sum": _pq(rep.total), "mass_target": _pq(rep.target),
                                     "difference": _pq(rep.difference), "pass": rep.passed}))
        else:
            lines.append(f"# mass sum {_pq(rep.total)} target {_pq(rep.target)} "
                         f"difference {_pq(rep.difference)} {'pass' if rep.passed else 'FAIL'}")
    return lines


def _pq(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"

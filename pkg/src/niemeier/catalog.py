"""Named lattices: Z^n, root lattices, D_n^+, Construction A, Leech and odd Leech."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from . import linalg
from .lattice import (IntegerLattice, LatticeError, direct_sum, from_document,
                      orthogonal_sublattice, overlattice)

H = Fraction(1, 2)


class CatalogError(KeyError):
    pass


@dataclass(frozen=True)
class CodeWordSet:
    """Generator rows of a binary code, one integer bitmask per row (bit i = coordinate i)."""

    length: int
    rows: tuple[int, ...]

    def rows_as_bits(self) -> list[list[int]]:
        return [[(r >> i) & 1 for i in range(self.length)] for r in self.rows]

    def codewords(self) -> list[int]:
        words = [0]
        for r in self.rows:
            words += [w ^ r for w in words]
        return words

    def weight_distribution(self) -> dict[int, int]:
        dist: dict[int, int] = {}
        for w in self.codewords():
            k = bin(w).count("1")
            dist[k] = dist.get(k, 0) + 1
        return dict(sorted(dist.items()))


def _check_golay(code: CodeWordSet) -> None:
    bits = code.rows_as_bits()
    for i, a in enumerate(bits):
        if sum(a) % 4:
            raise ValueError("Golay row weight not divisible by 4")
        for b in bits[i + 1:]:
            if sum(x & y for x, y in zip(a, b)) % 2:
                raise ValueError("Golay rows are not orthogonal")
    dist = code.weight_distribution()
    if len(code.codewords()) != 4096 or min(k for k in dist if k) != 8:
        raise ValueError("Golay code has wrong dimension or minimum weight")


@lru_cache(maxsize=None)
def golay_code() -> CodeWordSet:
    text = resources.files("niemeier.data").joinpath("golay.txt").read_text()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            rows.append(sum(int(c) << i for i, c in enumerate(line)))
    code = CodeWordSet(24, tuple(rows))
    _check_golay(code)
    return code


def zn(n: int) -> IntegerLattice:
    if n < 1:
        raise CatalogError("rank must be positive")
    return IntegerLattice(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), 1, f"Z{n}")


def _e8_basis() -> list[list[Fraction]]:
    # simple roots in the even coordinate system
    e = lambda i: [Fraction(int(j == i)) for j in range(8)]
    rows = [[H, -H, -H, -H, -H, -H, -H, H]]
    rows.append([a + b for a, b in zip(e(0), e(1))])
    for i in range(6):
        rows.append([a - b for a, b in zip(e(i + 1), e(i))])
    return rows


def root_lattice(family: str, rank: int) -> IntegerLattice:
    family = family.upper()
    name = f"{family}{rank}"
    if family == "A" and rank >= 1:
        rows = [[int(j == i) - int(j == i + 1) for j in range(rank + 1)] for i in range(rank)]
        return IntegerLattice.from_basis(rows, name)
    if family == "D" and rank >= 2:
        rows = [[int(j == i) - int(j == i + 1) for j in range(rank)] for i in range(rank - 1)]
        rows.append([int(j >= rank - 2) for j in range(rank)])
        return IntegerLattice.from_basis(rows, name)
    if family == "E" and rank in (6, 7, 8):
        e8 = IntegerLattice.from_basis(_e8_basis(), "E8")
        if rank == 8:
            return e8
        from .reduction import lll_reduce
        # E7 = roots orthogonal to one root, E6 = orthogonal to an A2
        fixed = [(0, 0, 0, 0, 0, 0, 0, 1)] if rank == 7 else [(0, 0, 0, 0, 0, 0, 1, 0), (0, 0, 0, 0, 0, 0, 0, 1)]
        sub = orthogonal_sublattice(e8, fixed)
        red, _ = lll_reduce(sub)
        return red.with_name(name)
    raise CatalogError(f"no root lattice {family}{rank}")


def dplus(n: int) -> IntegerLattice:
    if n < 8 or n % 8:
        raise CatalogError("D_n^+ is even unimodular only for n divisible by 8")
    return dn_plus(n)


def dn_plus(n: int) -> IntegerLattice:
    """D_n with the all-halves glue vector (integral for n ≡ 0 mod 4)."""
    if n % 4:
        raise CatalogError("D_n^+ is integral only for n divisible by 4")
    D = root_lattice("D", n)
    half = D.coordinates([H] * n)
    return overlattice(D, [half], f"Dplus{n}")


def construction_a(code: CodeWordSet, name: str = "") -> IntegerLattice:
    """(C + 2Z^n)/√2, realised rationally by a scaled orthogonal map.

    The block matrix diag((1/2)[[1,1],[1,-1]], ...) has M·Mᵀ = I/2, so the
    basis lift·M has Gram lift·liftᵀ/2.
    """
    n = code.length
    if n % 2:
        raise CatalogError("construction A is realised here for even length only")
    lift = code.rows_as_bits() + [[2 * int(i == j) for j in range(n)] for i in range(n)]
    lift = linalg.hnf(lift)
    rows = []
    for r in lift:
        row = []
        for k in range(0, n, 2):
            a, b = r[k], r[k + 1]
            row += [Fraction(a + b, 2), Fraction(a - b, 2)]
        rows.append(row)
    return IntegerLattice.from_basis(rows, name)


def _scaled_code_vector(L: IntegerLattice, u: list[int]) -> tuple[int, ...]:
    """Coordinates in L of the image u·M of an integer vector u."""
    amb = []
    for k in range(0, len(u), 2):
        a, b = u[k], u[k + 1]
        amb += [Fraction(a + b, 2), Fraction(a - b, 2)]
    c = L.coordinates(amb)
    if c is None or any(t.denominator != 1 for t in c):
        raise LatticeError("vector is not in the Construction-A lattice")
    return tuple(int(t) for t in c)


@lru_cache(maxsize=None)
def niemeier_a1_24() -> IntegerLattice:
    return construction_a(golay_code(), "NiemeierA1_24")


def leech_neighbor_vectors() -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Neighbour vectors in NiemeierA1_24 leading to Leech and odd Leech.

    Both are (±1,...)/√2 lifts of the all-ones codeword, so they pair oddly
    with all 48 roots and the neighbour keeps none of them.  (-3,1,...,1) has
    norm 16 and gives the even neighbour; (1,...,1) has norm 12 and gives the
    odd one.
    """
    N = niemeier_a1_24()
    v_even = _scaled_code_vector(N, [-3] + [1] * 23)
    v_odd = _scaled_code_vector(N, [1] * 24)
    return v_even, v_odd


@lru_cache(maxsize=None)
def leech() -> IntegerLattice:
    text = resources.files("niemeier.data").joinpath("leech.json").read_text()
    return from_document(json.loads(text)).with_name("Leech")


@lru_cache(maxsize=None)
def odd_leech() -> IntegerLattice:
    from .neighbors import two_neighbor
    from .reduction import lll_reduce
    _, v_odd = leech_neighbor_vectors()
    M = two_neighbor(niemeier_a1_24(), v_odd)
    red, _ = lll_reduce(M)
    return red.with_name("OddLeech")


def derive_leech() -> IntegerLattice:
    """Recompute the Leech lattice from NiemeierA1_24 (used to refresh the data file)."""
    from .neighbors import two_neighbor
    from .reduction import lll_reduce
    v_even, _ = leech_neighbor_vectors()
    M = two_neighbor(niemeier_a1_24(), v_even)
    red, _ = lll_reduce(M)
    return red.with_name("Leech")


_SIMPLE = {
    "NiemeierA1_24": niemeier_a1_24,
    "Leech": leech,
    "OddLeech": odd_leech,
}


def by_name(name: str) -> IntegerLattice:
    """Look up a catalog lattice; ``+`` joins summands, e.g. ``E8+Z16``."""
    name = name.strip()
    if "+" in name:
        parts = [by_name(p) for p in name.split("+")]
        L = parts[0]
        for P in parts[1:]:
            L = direct_sum(L, P)
        return L.with_name(name)
    if name in _SIMPLE:
        return _SIMPLE[name]()
    m = re.fullmatch(r"(Z|A|D|E|Dplus)(\d+)(?:\^(\d+))?", name)
    if not m:
        raise CatalogError(f"unknown lattice name {name!r}")
    kind, n, power = m.group(1), int(m.group(2)), m.group(3)
    if power:
        return by_name("+".join([f"{kind}{n}"] * int(power))).with_name(name)
    try:
        if kind == "Z":
            return zn(n)
        if kind == "Dplus":
            return dn_plus(n) if n % 8 else dplus(n)
        return root_lattice(kind, n)
    except CatalogError:
        raise
    except (LatticeError, ValueError) as exc:
        raise CatalogError(f"cannot build {name}: {exc}") from exc


CATALOG_NAMES = ("Z24", "E8", "Dplus16", "NiemeierA1_24", "Leech", "OddLeech")

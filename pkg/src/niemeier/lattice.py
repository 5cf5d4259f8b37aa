"""Integral lattices given by rational bases in a standard Euclidean space."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt, lcm
from pathlib import Path
from typing import Iterable, Sequence

from . import linalg

Vector = tuple[int, ...]


class LatticeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Lattice:
    """A full-rank lattice in its span, stored as ``numer / denom``.

    Rows of ``numer`` (integers) divided by the common denominator ``denom``
    are the basis vectors in an ambient space with the standard dot product.
    The Gram matrix may be rational; see :class:`IntegerLattice` for the
    integral case used almost everywhere.
    """

    numer: tuple[tuple[int, ...], ...]
    denom: int = 1
    name: str = ""

    def __post_init__(self):
        if self.denom <= 0:
            raise LatticeError("denominator must be positive")
        if not self.numer:
            raise LatticeError("empty basis")
        m = len(self.numer[0])
        if any(len(r) != m for r in self.numer):
            raise LatticeError("ragged basis")
        if len(self.numer) > m:
            raise LatticeError("more basis vectors than ambient dimensions")
        # normalise to the minimal denominator
        g = self.denom
        for r in self.numer:
            for x in r:
                g = _gcd(g, x)
        if g > 1:
            object.__setattr__(self, "numer", tuple(tuple(x // g for x in r) for r in self.numer))
            object.__setattr__(self, "denom", self.denom // g)
        if not linalg.is_positive_definite(self._raw_gram):
            raise LatticeError("basis rows are linearly dependent")

    @classmethod
    def from_basis(cls, basis: Sequence[Sequence], name: str = ""):
        d = linalg.common_denominator(basis)
        numer = tuple(tuple(int(Fraction(x) * d) for x in row) for row in basis)
        return cls(numer, d, name)

    @cached_property
    def _raw_gram(self) -> list[list[int]]:
        rows = self.numer
        return [[linalg.dot(a, b) for b in rows] for a in rows]

    @cached_property
    def basis(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(Fraction(x, self.denom) for x in r) for r in self.numer)

    @property
    def rank(self) -> int:
        return len(self.numer)

    @property
    def ambient_dim(self) -> int:
        return len(self.numer[0])

    @cached_property
    def gram(self):
        d2 = self.denom * self.denom
        return tuple(tuple(Fraction(x, d2) for x in row) for row in self._raw_gram)

    def ambient(self, coords: Sequence) -> tuple[Fraction, ...]:
        """Ambient coordinates of the vector with the given basis coordinates."""
        return tuple(sum(Fraction(c) * b for c, b in zip(coords, col))
                     for col in zip(*self.basis))

    def coordinates(self, x: Sequence) -> tuple[Fraction, ...] | None:
        """Rational basis coordinates of an ambient vector, None if outside the span."""
        x = [Fraction(t) for t in x]
        # solve c·B = x via the normal equations c·(B Bᵀ) = x·Bᵀ
        rhs = [sum(a * b for a, b in zip(x, row)) for row in self.basis]
        c = linalg.vecmat(rhs, self._gram_inverse)
        if tuple(self.ambient(c)) != tuple(x):
            return None
        return tuple(c)

    def contains(self, x: Sequence) -> bool:
        c = self.coordinates(x)
        return c is not None and all(t.denominator == 1 for t in c)

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(row) for row in other.basis)

    def same_lattice(self, other: "Lattice") -> bool:
        if self.ambient_dim != other.ambient_dim or self.rank != other.rank:
            return False
        # equal row lattices have equal Hermite normal forms
        d = lcm(self.denom, other.denom)
        a = linalg.hnf([[x * (d // self.denom) for x in r] for r in self.numer])
        b = linalg.hnf([[x * (d // other.denom) for x in r] for r in other.numer])
        return a == b

    @cached_property
    def _gram_inverse(self) -> list[list[Fraction]]:
        return linalg.inverse(self.gram)

    @cached_property
    def determinant(self) -> Fraction:
        return Fraction(linalg.det(self._raw_gram), self.denom ** (2 * self.rank))

    def with_name(self, name: str):
        return type(self)(self.numer, self.denom, name)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


@dataclass(frozen=True, eq=False)
class IntegerLattice(Lattice):
    """A positive definite lattice whose Gram matrix is integral."""

    def __post_init__(self):
        super().__post_init__()
        d2 = self.denom * self.denom
        if any(x % d2 for row in self._raw_gram for x in row):
            raise LatticeError("Gram matrix is not integral")

    @cached_property
    def gram(self) -> tuple[tuple[int, ...], ...]:
        d2 = self.denom * self.denom
        return tuple(tuple(x // d2 for x in row) for row in self._raw_gram)

    @cached_property
    def determinant(self) -> int:
        return linalg.det(self.gram)

    def fingerprint_hash(self) -> str:
        """Short hash of the Gram matrix, used to tag witnesses and reports."""
        h = hashlib.sha256(repr(self.gram).encode()).hexdigest()
        return h[:16]


def inner_product(L: IntegerLattice, u: Sequence[int], v: Sequence[int]) -> int:
    r = L.rank
    if len(u) != r or len(v) != r:
        raise LatticeError(f"expected coordinate rows of length {r}")
    g = L.gram
    return sum(u[i] * sum(g[i][j] * v[j] for j in range(r) if v[j]) for i in range(r) if u[i])


def norm(L: IntegerLattice, v: Sequence[int]) -> int:
    return inner_product(L, v, v)


def determinant(L: Lattice):
    return L.determinant


def is_unimodular(L: IntegerLattice) -> bool:
    return L.determinant == 1


def is_even(L: IntegerLattice) -> bool:
    return all(L.gram[i][i] % 2 == 0 for i in range(L.rank))


def _from_coords(L: Lattice, coord_rows: Sequence[Sequence], name: str = "",
                 cls=IntegerLattice):
    basis = [L.ambient(c) for c in coord_rows]
    return cls.from_basis(basis, name)


def sublattice_from_generators(L: Lattice, gens: Iterable[Sequence], name: str = ""):
    """Sublattice spanned by coordinate rows ``gens`` (integers or rationals).

    Returns ``(sublattice, index)``; ``index`` is None when the generators do
    not have full rank.  Rational generators are allowed so the same routine
    builds overlattices; the index is then a Fraction below 1.
    """
    gens = [tuple(g) for g in gens]
    if not gens:
        raise LatticeError("empty generating set")
    d = linalg.common_denominator(gens)
    h = linalg.hnf([[int(Fraction(x) * d) for x in g] for g in gens])
    if not h:
        raise LatticeError("generators span the zero lattice")
    coords = [[Fraction(x, d) for x in row] for row in h]
    cls = IntegerLattice if isinstance(L, IntegerLattice) else Lattice
    try:
        sub = _from_coords(L, coords, name, cls)
    except LatticeError:
        sub = _from_coords(L, coords, name, Lattice)
    index = None
    if len(h) == L.rank:
        # index = |det of coordinate matrix|
        index = abs(linalg.det(coords))
        if index.denominator == 1:
            index = index.numerator
    return sub, index


def even_sublattice(L: IntegerLattice) -> IntegerLattice:
    """Vectors of even norm.  Index 2 when L is odd, otherwise L itself."""
    g = L.gram
    r = L.rank
    odd = [i for i in range(r) if g[i][i] % 2]
    if not odd:
        return L
    k = odd[0]
    # norm mod 2 is linear: x ↦ Σ x_i g_ii mod 2
    gens = []
    for i in range(r):
        e = [0] * r
        e[i] = 1
        if i == k:
            e[i] = 2
        elif g[i][i] % 2:
            e[k] = 1
        gens.append(e)
    sub, idx = sublattice_from_generators(L, gens, name=f"{L.name}_even" if L.name else "")
    assert idx == 2
    return sub


def orthogonal_sublattice(L: IntegerLattice, vectors: Sequence[Sequence[int]],
                          name: str = "") -> IntegerLattice:
    """{x ∈ L : (x, v) = 0 for every v in ``vectors``} via an integer kernel."""
    g = L.gram
    cols = [[sum(g[i][j] * v[j] for j in range(L.rank)) for v in vectors] for i in range(L.rank)]
    ker = linalg.left_kernel(cols)
    if not ker:
        raise LatticeError("orthogonal complement is zero")
    sub, _ = sublattice_from_generators(L, ker, name)
    return sub


def direct_sum(L1: IntegerLattice, L2: IntegerLattice, name: str = "") -> IntegerLattice:
    d = lcm(L1.denom, L2.denom)
    a, b = d // L1.denom, d // L2.denom
    m1, m2 = L1.ambient_dim, L2.ambient_dim
    rows = [tuple(x * a for x in r) + (0,) * m2 for r in L1.numer]
    rows += [(0,) * m1 + tuple(x * b for x in r) for r in L2.numer]
    return IntegerLattice(tuple(rows), d, name or "+".join(filter(None, [L1.name, L2.name])))


def dual_lattice(L: Lattice) -> Lattice:
    """Dual lattice in the span of L: basis gram⁻¹·basis."""
    ginv = linalg.inverse(L.gram)
    basis = linalg.matmul(ginv, L.basis)
    name = f"{L.name}*" if L.name else ""
    try:
        return IntegerLattice.from_basis(basis, name)
    except LatticeError:
        return Lattice.from_basis(basis, name)


def glue_group(L: IntegerLattice) -> list[tuple[Fraction, ...]]:
    """Coset representatives of L*/L, as L-coordinates reduced into [0, 1).

    The list is sorted, so the zero coset comes first.  Its length equals
    the determinant.
    """
    ginv = linalg.inverse(L.gram)
    gens = [tuple(x - (x.numerator // x.denominator) for x in row) for row in ginv]
    seen = {tuple(Fraction(0) for _ in range(L.rank))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for c in frontier:
            for g in gens:
                s = tuple(_frac(a + b) for a, b in zip(c, g))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    out = sorted(seen)
    assert len(out) == L.determinant
    return out


def _frac(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def glue_exponent(L: IntegerLattice) -> int:
    e = 1
    for c in glue_group(L):
        e = lcm(e, linalg.common_denominator([c]))
    return e


def overlattice(L: IntegerLattice, glue: Sequence[Sequence], name: str = ""):
    """Lattice generated by L and the given rational coordinate rows."""
    r = L.rank
    gens = [tuple(int(i == j) for j in range(r)) for i in range(r)] + [tuple(g) for g in glue]
    sub, _ = sublattice_from_generators(L, gens, name)
    return sub


def from_gram(gram: Sequence[Sequence[int]], name: str = "") -> IntegerLattice:
    """Embed an abstract integral Gram matrix into a rational Euclidean frame.

    Diagonalise gram = Lᵀ·diag(d)·L over Q, write every d_i as a sum of at
    most four rational squares and place those square roots in separate
    ambient blocks.  The ambient dimension is therefore between r and 4r.
    """
    from sympy.solvers.diophantine.diophantine import sum_of_four_squares

    g = [[Fraction(x) for x in row] for row in gram]
    r = len(g)
    if not linalg.is_positive_definite([[int(x) for x in row] for row in gram]):
        raise LatticeError("Gram matrix is not positive definite")
    # LDLᵀ: gram = Σ_k d_k l_k l_kᵀ with unit-upper l_k
    a = [row[:] for row in g]
    ds, ls = [], []
    for k in range(r):
        dk = a[k][k]
        lk = [Fraction(0)] * k + [a[k][j] / dk for j in range(k, r)]
        ds.append(dk)
        ls.append(lk)
        for i in range(k, r):
            for j in range(k, r):
                a[i][j] -= dk * lk[i] * lk[j]
    blocks = []
    for dk in ds:
        num, den = dk.numerator, dk.denominator
        n = num * den
        s = isqrt(n)
        if s * s == n:
            parts = [s]
        else:
            parts = [p for p in sum_of_four_squares(n) if p]
        blocks.append([Fraction(p, den) for p in parts])
    dim = sum(len(b) for b in blocks)
    basis = []
    for i in range(r):
        row = []
        for k, parts in enumerate(blocks):
            row.extend(ls[k][i] * p for p in parts)
        basis.append(row)
    assert len(basis[0]) == dim
    L = IntegerLattice.from_basis(basis, name)
    assert [list(row) for row in L.gram] == [list(map(int, row)) for row in gram]
    return L


# ---------------------------------------------------------------- file format

def to_document(L: Lattice) -> dict:
    return {
        "name": L.name,
        "ambient_dim": L.ambient_dim,
        "denominator": L.denom,
        "basis": [list(r) for r in L.numer],
    }


def from_document(doc: dict) -> IntegerLattice:
    try:
        name = str(doc.get("name", ""))
        if "basis" in doc:
            d = int(doc.get("denominator", 1))
            rows = tuple(tuple(int(x) for x in r) for r in doc["basis"])
            if "ambient_dim" in doc and rows and len(rows[0]) != int(doc["ambient_dim"]):
                raise LatticeError("ambient_dim does not match basis rows")
            return IntegerLattice(rows, d, name)
        if "gram" in doc:
            return from_gram([[int(x) for x in r] for r in doc["gram"]], name)
    except (TypeError, KeyError) as exc:
        raise LatticeError(f"malformed lattice document: {exc}") from exc
    raise LatticeError("lattice document needs a 'basis' or a 'gram' field")


def dumps_document(doc: dict) -> str:
    """JSON with one matrix row per line."""
    parts = []
    for key, value in doc.items():
        if isinstance(value, list) and value and isinstance(value[0], list):
            rows = ",\n".join("  " + json.dumps(r) for r in value)
            parts.append(f" {json.dumps(key)}: [\n{rows}\n ]")
        else:
            parts.append(f" {json.dumps(key)}: {json.dumps(value, ensure_ascii=False)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def write_lattice(L: Lattice, path) -> None:
    Path(path).write_text(dumps_document(to_document(L)))


def read_lattice(path) -> IntegerLattice:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise LatticeError(f"{path}: not a lattice document ({exc})") from exc
    if not isinstance(doc, dict):
        raise LatticeError(f"{path}: not a lattice document")
    return from_document(doc)

from fractions import Fraction

import pytest
from hypothesis import given, settings

from niemeier import linalg
from niemeier.catalog import by_name, root_lattice, zn
from niemeier.lattice import (IntegerLattice, Lattice, LatticeError, determinant, direct_sum,
                              dual_lattice, even_sublattice, from_document, from_gram, glue_exponent,
                              glue_group, inner_product, is_even, is_unimodular, norm, read_lattice,
                              sublattice_from_generators, to_document, write_lattice)

from helpers import gram_matrices, scramble, small_lattices


def test_inner_product_examples():
    assert inner_product(zn(2), (1, 0), (0, 1)) == 0
    assert inner_product(zn(2), (1, 1), (1, 1)) == 2
    assert inner_product(root_lattice("A", 2), (1, 0), (0, 1)) == -1


def test_inner_product_dimension_mismatch():
    with pytest.raises(LatticeError):
        inner_product(zn(2), (1, 0, 0), (0, 1))


def test_determinants():
    assert zn(7).determinant == 1
    assert root_lattice("A", 2).determinant == 3
    assert direct_sum(root_lattice("A", 2), root_lattice("A", 2)).determinant == 9


def test_parity_and_unimodularity():
    z24, e8, a2 = zn(24), by_name("E8"), root_lattice("A", 2)
    assert (is_unimodular(z24), is_even(z24)) == (True, False)
    assert (is_unimodular(e8), is_even(e8)) == (True, True)
    assert (is_unimodular(a2), is_even(a2)) == (False, True)


def test_even_sublattice_examples():
    e8 = by_name("E8")
    assert even_sublattice(e8) is e8
    assert even_sublattice(zn(1)).gram == ((4,),)
    z2e = even_sublattice(zn(2))
    assert z2e.determinant == 4 and is_even(z2e)
    assert zn(2).contains_lattice(z2e)
    assert z2e.same_lattice(IntegerLattice.from_basis([[1, 1], [1, -1]]))


def test_sublattice_indices():
    z2 = zn(2)
    assert sublattice_from_generators(z2, [(2, 0), (0, 2)])[1] == 4
    assert sublattice_from_generators(z2, [(1, 1), (1, -1)])[1] == 2
    sub, idx = sublattice_from_generators(zn(3), [(1, 0, 0), (0, 1, 0)])
    assert idx is None and sub.rank == 2
    with pytest.raises(LatticeError):
        sublattice_from_generators(z2, [])


def test_direct_sum_examples():
    assert direct_sum(zn(1), zn(1)).gram == zn(2).gram
    L = by_name("E8+Z16")
    assert L.rank == 24 and not is_even(L) and is_unimodular(L)


def test_dual_and_glue_examples():
    assert dual_lattice(zn(3)).same_lattice(zn(3))
    assert glue_group(zn(3)) == [(0, 0, 0)]
    assert len(glue_group(root_lattice("A", 2))) == 3
    d8 = even_sublattice(zn(8))
    assert len(glue_group(d8)) == 4
    assert glue_exponent(d8) == 2


def test_glue_representatives_sorted():
    reps = glue_group(root_lattice("A", 3))
    assert reps == sorted(reps) and len(reps) == 4


def test_construction_rejects_bad_input():
    with pytest.raises(LatticeError):
        IntegerLattice.from_basis([[1, 0], [2, 0]])
    with pytest.raises(LatticeError):
        IntegerLattice.from_basis([[Fraction(1, 2), 0]])
    with pytest.raises(LatticeError):
        from_gram([[1, 2], [2, 1]])


def test_document_round_trip(tmp_path):
    for name in ("Z24", "E8", "Dplus12", "A2"):
        L = by_name(name)
        path = tmp_path / f"{name}.json"
        write_lattice(L, path)
        M = read_lattice(path)
        assert M.gram == L.gram and M.name == L.name
        assert from_document(to_document(L)).numer == L.numer


def test_gram_only_document():
    g = [[2, -1], [-1, 2]]
    L = from_document({"name": "A2", "gram": g})
    assert [list(r) for r in L.gram] == g


@settings(max_examples=60, deadline=None)
@given(gram_matrices())
def test_from_gram_reproduces_gram(g):
    L = from_gram(g)
    assert [list(r) for r in L.gram] == g


@settings(max_examples=40, deadline=None)
@given(small_lattices())
def test_dual_identities(L):
    D = dual_lattice(L)
    assert determinant(D) == Fraction(1, L.determinant)
    assert dual_lattice(D).same_lattice(L)
    assert D.contains_lattice(L)


@settings(max_examples=40, deadline=None)
@given(small_lattices())
def test_glue_group_order(L):
    assert len(glue_group(L)) == L.determinant


@settings(max_examples=40, deadline=None)
@given(small_lattices())
def test_sublattice_of_own_basis(L):
    rows = [[int(i == j) for j in range(L.rank)] for i in range(L.rank)]
    sub, idx = sublattice_from_generators(L, rows)
    assert idx == 1 and sub.same_lattice(L)


@settings(max_examples=40, deadline=None)
@given(small_lattices())
def test_even_sublattice_index(L):
    E = even_sublattice(L)
    expected = 1 if is_even(L) else 2
    assert E.determinant == L.determinant * expected ** 2
    assert is_even(E) and L.contains_lattice(E)


@settings(max_examples=30, deadline=None)
@given(small_lattices(max_rank=3), small_lattices(max_rank=3))
def test_direct_sum_multiplicative(A, B):
    S = direct_sum(A, B)
    assert S.determinant == A.determinant * B.determinant
    assert S.rank == A.rank + B.rank


@settings(max_examples=40, deadline=None)
@given(small_lattices())
def test_gram_recomputes_exactly(L):
    basis = [list(r) for r in L.basis]
    assert [list(r) for r in L.gram] == linalg.matmul(basis, linalg.transpose(basis))
    v = [1] * L.rank
    assert norm(L, v) == inner_product(L, v, v) >= 1


def test_scrambled_basis_is_same_lattice():
    L = by_name("E8")
    M, u = scramble(L, seed=3)
    assert M.same_lattice(L)
    assert abs(linalg.det(u)) == 1


def test_rational_gram_lattice():
    L = Lattice.from_basis([[Fraction(1, 3), 0], [0, 1]])
    assert determinant(L) == Fraction(1, 9)

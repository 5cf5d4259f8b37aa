import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from niemeier import linalg
from niemeier.catalog import by_name, zn
from niemeier.lattice import IntegerLattice, from_gram
from niemeier.reduction import (lll_gram, lll_reduce, minimum_norm, short_vector_array, short_vectors,
                                theta_prefix)

from helpers import brute_force, random_gram, scramble, small_lattices


def test_fincke_pohst_matches_box_enumeration():
    rng = random.Random(2024)
    discrepancies = 0
    for trial in range(60):
        n = rng.randint(1, 5)
        g = random_gram(rng, n)
        L = from_gram(g)
        bound = rng.randint(1, 6)
        got = {(v, m) for v, m in short_vectors(L, bound)}
        discrepancies += got != brute_force([list(r) for r in L.gram], bound)
    assert discrepancies == 0


def test_short_vectors_examples():
    assert short_vectors(zn(2), 1).coords() == [(0, 1), (1, 0)]
    assert len(short_vectors(by_name("E8"), 2)) == 120
    assert len(short_vectors(by_name("Leech"), 3)) == 0


def test_short_vectors_sorted_and_normalised():
    sv = short_vectors(by_name("D4"), 4)
    keys = [(m, v) for v, m in sv]
    assert keys == sorted(keys)
    assert all(next(c for c in v if c) > 0 for v, _ in sv)
    assert len({v for v, _ in sv}) == len(sv)


def test_fractional_bound_rejected():
    with pytest.raises((TypeError, ValueError)):
        short_vectors(zn(2), Fraction(3, 2))


def test_minimum_norm_examples():
    assert minimum_norm(zn(24)) == 1
    assert minimum_norm(by_name("OddLeech")) == 3
    assert minimum_norm(by_name("NiemeierA1_24")) == 2


def test_theta_prefix_examples():
    assert theta_prefix(zn(1), 4) == [1, 2, 0, 0, 2]
    assert theta_prefix(by_name("E8"), 2) == [1, 0, 240]
    assert theta_prefix(by_name("A2"), 0) == [1]


def test_lll_scrambled_z4_gives_identity():
    L, _ = scramble(zn(4), seed=7, steps=40)
    assert L.gram != zn(4).gram
    red, t = lll_reduce(L)
    assert [list(r) for r in red.gram] == [[int(i == j) for j in range(4)] for i in range(4)]


def test_lll_on_reduced_and_rank_one():
    e8 = by_name("E8")
    red, t = lll_reduce(e8)
    assert abs(linalg.det(t)) == 1 and red.same_lattice(e8)
    one = IntegerLattice.from_basis([[3]])
    red1, t1 = lll_reduce(one)
    assert red1.gram == one.gram and [list(r) for r in t1] == [[1]]


def _is_lll_reduced(g, delta=Fraction(3, 4)):
    n = len(g)
    # Gram–Schmidt data from the Gram matrix
    mu = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (g[i][j] - sum(mu[j][k] * mu[i][k] * b[k] for k in range(j))) / b[j]
        b[i] = g[i][i] - sum(mu[i][k] ** 2 * b[k] for k in range(i))
    size = all(abs(mu[i][j]) <= Fraction(1, 2) for i in range(n) for j in range(i))
    lovasz = all(b[i] >= (delta - mu[i][i - 1] ** 2) * b[i - 1] for i in range(1, n))
    return size and lovasz


@settings(max_examples=50, deadline=None)
@given(small_lattices())
def test_lll_preserves_lattice(L):
    red, t = lll_reduce(L)
    assert abs(linalg.det(t)) == 1
    tg = linalg.matmul(linalg.matmul(t, L.gram), linalg.transpose(t))
    assert tg == [list(r) for r in red.gram]
    assert red.same_lattice(L)
    assert _is_lll_reduced([list(r) for r in red.gram])


@settings(max_examples=30, deadline=None)
@given(small_lattices())
def test_lll_gram_congruence(L):
    g, t = lll_gram(L.gram)
    assert linalg.matmul(linalg.matmul(t, L.gram), linalg.transpose(t)) == [list(r) for r in g]


@settings(max_examples=40, deadline=None)
@given(small_lattices())
def test_minimum_is_first_theta_entry(L):
    mu = minimum_norm(L)
    theta = theta_prefix(L, mu)
    assert theta[mu] > 0 and not any(theta[1:mu])


@settings(max_examples=30, deadline=None)
@given(small_lattices(max_rank=4))
def test_short_vectors_basis_invariant(L):
    M, _ = scramble(L, seed=L.rank)
    a = sorted(m for _, m in short_vectors(L, 5))
    b = sorted(m for _, m in short_vectors(M, 5))
    assert a == b


def test_short_vector_array_signed():
    arr, norms = short_vector_array(by_name("D4"), 2)
    assert arr.shape == (24, 4) and set(norms.tolist()) == {2}

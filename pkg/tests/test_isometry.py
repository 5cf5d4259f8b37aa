import math

import pytest
from hypothesis import given, settings

from niemeier import linalg
from niemeier.catalog import by_name, zn
from niemeier.isometry import (IsometryError, IsometryGroup, SearchStats, automorphism_group, chain_order,
                               group_from_document, group_to_document, is_isometric, orbit_of, orbits,
                               pointwise_stabilizer)
from niemeier.reduction import short_vectors
from niemeier.roots import weyl_group_order

from helpers import scramble, small_lattices

E8_ORDER = 696729600


def congruent(u, g_from, g_to) -> bool:
    return linalg.matmul(linalg.matmul(u, g_from), linalg.transpose(u)) == [list(r) for r in g_to]


def closure(gens, n):
    """All products of the generators, by breadth-first search."""
    eye = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    seen = {eye}
    frontier = [eye]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                p = tuple(tuple(r) for r in linalg.matmul(a, g))
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return seen


@pytest.mark.parametrize("n", range(1, 7))
def test_aut_zn_order(n):
    G = automorphism_group(zn(n))
    assert G.order == 2 ** n * math.factorial(n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_aut_zn_explicit_closure(n):
    G = automorphism_group(zn(n))
    elems = closure(G.generators, n)
    assert len(elems) == G.order
    assert all(congruent(u, zn(n).gram, zn(n).gram) for u in elems)


def test_e8_order_two_methods():
    e8 = by_name("E8")
    assert automorphism_group(e8).order == E8_ORDER
    assert weyl_group_order(e8) == E8_ORDER


def test_e8_order_from_simple_reflections():
    e8 = by_name("E8")
    g = e8.gram
    refl = []
    for i in range(8):
        refl.append([[int(k == j) - g[k][i] * int(j == i) for j in range(8)] for k in range(8)])
    assert chain_order(e8, refl) == E8_ORDER


@pytest.mark.parametrize("name,order", [
    ("A2", 12), ("D4", 1152), ("E6", 103680), ("E7", 2903040),
    ("Dplus16", 685597979049984000), ("E8+E8", 2 * E8_ORDER ** 2),
])
def test_known_orders(name, order):
    assert automorphism_group(by_name(name)).order == order


def test_generators_preserve_gram():
    for name in ("E8", "Dplus12", "E7"):
        G = automorphism_group(by_name(name))
        for u in G.generators:
            assert congruent(u, G.lattice.gram, G.lattice.gram)
            assert abs(linalg.det(u)) == 1


def test_group_constructor_rejects_non_isometry():
    with pytest.raises((IsometryError, ValueError)):
        IsometryGroup(zn(2), (((1, 1), (0, 1)),), 1)


def test_orbits_examples():
    z2 = zn(2)
    P = orbits(automorphism_group(z2), [(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert P.sizes() == [4]
    trivial = IsometryGroup.generated_by(z2, [])
    assert trivial.order == 1
    assert orbits(trivial, [(1, 0), (0, 1), (1, 1)]).sizes() == [1, 1, 1]
    e8 = by_name("E8")
    roots = short_vectors(e8, 2).signed(2)
    assert orbits(automorphism_group(e8), roots).sizes() == [240]


def test_orbit_representative_is_minimal():
    e8 = by_name("E8")
    roots = short_vectors(e8, 2).signed(2)
    P = orbits(automorphism_group(e8), roots)
    assert P.representatives() == [min(roots)]


def test_orbits_requires_closed_set():
    with pytest.raises((IsometryError, ValueError)):
        orbits(automorphism_group(zn(2)), [(1, 0)])


def test_pointwise_stabilizer_examples():
    assert pointwise_stabilizer(automorphism_group(zn(2)), [(1, 0)]).order == 2
    assert pointwise_stabilizer(automorphism_group(zn(3)), [(1, 0, 0), (0, 1, 0)]).order == 2
    e8 = by_name("E8")
    r = short_vectors(e8, 2).coords()[0]
    H = pointwise_stabilizer(automorphism_group(e8), [r])
    assert H.order == E8_ORDER // 240
    for u in H.generators:
        assert tuple(linalg.vecmat(r, u)) == tuple(r)


@pytest.mark.parametrize("name", ["Z5", "D4", "E6", "Dplus12", "E8+Z4"])
def test_orbit_stabilizer_identity(name):
    L = by_name(name)
    G = automorphism_group(L)
    for v in short_vectors(L, 3).coords()[:6]:
        assert len(orbit_of(G, v)) * pointwise_stabilizer(G, [v]).order == G.order


def test_search_stats():
    st = SearchStats()
    G = automorphism_group(by_name("D4"), st)
    prod = 1
    for s in st.orbit_sizes:
        prod *= s
    assert prod == G.order and st.generators == len(G.generators)


def test_is_isometric_scrambled_z4():
    L, u = scramble(zn(4), seed=11, steps=30)
    U = is_isometric(L, zn(4))
    assert U is not None and congruent(U, zn(4).gram, L.gram)


def test_is_isometric_rejections():
    assert is_isometric(by_name("E8+E8"), zn(16)) is None
    assert is_isometric(by_name("E8+E8"), by_name("Dplus16")) is None


def test_is_isometric_reflexive():
    L = by_name("D4")
    U = is_isometric(L, L)
    assert U is not None and congruent(U, L.gram, L.gram)


@pytest.mark.parametrize("name", ["E8", "Dplus12", "E8+Z16", "NiemeierA1_24", "OddLeech"])
def test_is_isometric_large_scrambles(name):
    L = by_name(name)
    M, _ = scramble(L, seed=5, steps=40)
    U = is_isometric(L, M)
    assert U is not None and congruent(U, M.gram, L.gram)
    if L.rank < 24:
        V = is_isometric(M, L)
        assert V is not None and congruent(V, L.gram, M.gram)


def test_non_basis_frame_groups():
    # short vectors of NiemeierA1_24 span only an index-4096 sublattice
    G = automorphism_group(by_name("NiemeierA1_24"))
    assert G.order == 2 ** 24 * 244823040
    assert automorphism_group(by_name("OddLeech")).order == 2 ** 12 * 244823040


@settings(max_examples=25, deadline=None)
@given(small_lattices(max_rank=4))
def test_is_isometric_symmetric(L):
    M, _ = scramble(L, seed=L.determinant)
    U, V = is_isometric(L, M), is_isometric(M, L)
    assert U is not None and V is not None
    assert congruent(U, M.gram, L.gram)


@settings(max_examples=25, deadline=None)
@given(small_lattices(max_rank=4))
def test_random_group_properties(L):
    G = automorphism_group(L)
    assert G.order % 2 == 0  # -1 is always an automorphism
    vecs = short_vectors(L, max(L.gram[i][i] for i in range(L.rank))).signed()
    P = orbits(G, vecs)
    assert sum(P.sizes()) == len(vecs)
    for o in P.orbits[:3]:
        assert o.size * pointwise_stabilizer(G, [o.representative]).order == G.order


def test_group_document_round_trip():
    G = automorphism_group(by_name("D4"))
    H = group_from_document(group_to_document(G), G.lattice)
    assert H.order == G.order and H.generators == G.generators


def test_contains_and_apply():
    G = automorphism_group(zn(3))
    minus = tuple(tuple(-int(i == j) for j in range(3)) for i in range(3))
    assert G.contains(minus)
    assert G.apply(minus, (1, 2, 3)) == (-1, -2, -3)


def test_deterministic_generators():
    L = by_name("E7")
    g1 = automorphism_group(L, SearchStats())
    g2 = automorphism_group(L, SearchStats())
    assert g1.generators == g2.generators

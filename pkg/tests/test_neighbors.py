from fractions import Fraction
from math import gcd

import pytest

from niemeier.catalog import by_name, zn
from niemeier.isometry import is_isometric
from niemeier.lattice import is_even, is_unimodular
from niemeier.mass import genus_mass
from niemeier.neighbors import (NeighborError, even_neighbors, format_type, genus_enumerate,
                                genus_report_lines, intersection_index, make_record, mass_check,
                                two_neighbor, type_of)
from niemeier.reduction import minimum_norm, short_vectors, theta_prefix
from niemeier.roots import root_decomposition


def test_two_neighbor_of_z4_is_z4():
    M = two_neighbor(zn(4), (1, 1, 1, 1))
    assert is_unimodular(M) and minimum_norm(M) == 1
    assert is_isometric(M, zn(4)) is not None


def test_two_neighbor_z8_gives_e8():
    M = two_neighbor(zn(8), (1,) * 8)
    assert is_unimodular(M) and is_even(M) and minimum_norm(M) == 2
    assert is_isometric(M, by_name("E8")) is not None


def test_two_neighbors_of_e8():
    e8 = by_name("E8")
    sv = short_vectors(e8, 8)
    # v/2 has norm 1 when norm(v) = 4, so the neighbour is odd
    v4 = next(v for v, m in sv if m == 4)
    assert is_isometric(two_neighbor(e8, v4), zn(8)) is not None
    v8 = next(v for v, m in sv if m == 8 and gcd(*v) == 1)
    M = two_neighbor(e8, v8)
    assert is_even(M) and is_isometric(M, e8) is not None


def test_neighbor_intersection_has_index_two():
    L = zn(8)
    M = two_neighbor(L, (1,) * 8)
    assert intersection_index(L, M) == (2, 2)


def test_neighbor_relation_is_symmetric():
    L = zn(12)
    M = two_neighbor(L, (1,) * 8 + (2, 0, 0, 0))
    # w in L but not in M: 2w is primitive in M and the step back recovers L
    w = next(row for row in L.basis if not M.contains(row))
    u = tuple(int(c) for c in M.coordinates([2 * x for x in w]))
    assert two_neighbor(M, u).same_lattice(L)


@pytest.mark.parametrize("v,msg", [((2, 0, 0, 0), "primitive"), ((1, 1, 0, 0), "norm"), ((1, 1), "length")])
def test_two_neighbor_errors(v, msg):
    with pytest.raises(NeighborError, match=msg):
        two_neighbor(zn(4), v)


def test_even_neighbors_of_z8():
    pair = even_neighbors(zn(8))
    e8 = by_name("E8")
    assert is_isometric(pair.even_a, e8) is not None
    assert is_isometric(pair.even_b, e8) is not None


def test_even_neighbors_require_rank_multiple_of_eight():
    with pytest.raises(NeighborError):
        even_neighbors(zn(9))
    with pytest.raises(NeighborError):
        even_neighbors(by_name("E8"))


def test_z24_neighbors_are_isometric_d24():
    pair = even_neighbors(zn(24))
    assert str(root_decomposition(pair.even_a)) == str(root_decomposition(pair.even_b)) == "D24"
    assert is_isometric(pair.even_a, pair.even_b) is not None
    assert format_type(type_of(zn(24))) == "(D24, D24)"


def test_min_one_rule_rank_16():
    # an odd lattice with a norm-1 vector has isometric even neighbours
    pair = even_neighbors(by_name("E8+Z8"))
    assert is_isometric(pair.even_a, pair.even_b) is not None


def test_odd_leech_neighbours():
    pair = even_neighbors(by_name("OddLeech"))
    labels = sorted(str(root_decomposition(x)) for x in (pair.even_a, pair.even_b))
    assert labels == ["A1^24", "∅"]
    leech = pair.even_a if minimum_norm(pair.even_a) == 4 else pair.even_b
    assert theta_prefix(leech, 3) == [1, 0, 0, 0]
    assert format_type(type_of(by_name("OddLeech"))) == "(∅, A1^24)"


def test_type_of_e8_plus_z16_contains_e8():
    a, b = type_of(by_name("E8+Z16"))
    assert ("E", 8) in a.components and ("E", 8) in b.components


def test_core_is_common_even_sublattice():
    pair = even_neighbors(zn(16))
    for M in (pair.odd_lattice, pair.even_a, pair.even_b):
        assert M.contains_lattice(pair.core)
        assert intersection_index(M, pair.core)[0] == 2


@pytest.mark.parametrize("seed,count", [("Z1", 1), ("Z4", 1), ("Z8", 1), ("E8", 1), ("Z9", 2), ("E8+E8", 2),
                                        ("Z12", 3)])
def test_small_genera_saturate_mass(seed, count):
    records = genus_enumerate(by_name(seed))
    assert len(records) == count
    rep = mass_check(records)
    assert rep.passed and rep.difference == 0


def test_rank_sixteen_even_classes_are_distinct():
    records = genus_enumerate(by_name("E8+E8"))
    labels = sorted(r.root_label for r in records)
    assert labels == ["D16", "E8^2"]
    a, b = (r.lattice for r in records)
    assert theta_prefix(a, 4) == theta_prefix(b, 4)
    assert is_isometric(a, b) is None


def test_mass_check_examples():
    full = genus_enumerate(by_name("Z9"))
    assert mass_check(full).difference == 0
    partial = mass_check(full[:1])
    assert not partial.passed and partial.difference < 0
    one = mass_check([make_record(zn(1))])
    assert one.total == one.target == Fraction(1, 2) and one.passed


def test_mass_check_empty_needs_rank():
    with pytest.raises(NeighborError):
        mass_check([])
    rep = mass_check([], rank=8, parity="even")
    assert rep.difference == -genus_mass(8, "even")


def test_max_classes_and_resume():
    first = genus_enumerate(by_name("Z12"), max_classes=1)
    assert len(first) == 1
    rest = genus_enumerate(by_name("Z12"), known=first)
    assert len(rest) == 3 and mass_check(rest).passed


def test_on_new_callback_sees_every_class():
    seen = []
    records = genus_enumerate(by_name("Z9"), on_new=seen.append)
    assert {r.name for r in seen} == {r.name for r in records}


def test_workers_give_same_classes():
    a = genus_enumerate(by_name("Z12"))
    b = genus_enumerate(by_name("Z12"), workers=2)
    assert [r.fingerprint for r in a] == [r.fingerprint for r in b]
    assert [r.aut_order for r in a] == [r.aut_order for r in b]


def test_report_lines():
    records = [r.with_type() for r in genus_enumerate(by_name("Z8"))]
    lines = genus_report_lines(records)
    assert len(lines) == 2
    assert lines[0].split("\t")[1:5] == ["1", "odd", "1", str(2 ** 8 * 40320)]
    assert lines[-1].endswith("pass")
    assert "(E8, E8)" in lines[0]
    structured = genus_report_lines(records, "structured")
    assert '"pass": true' in structured[-1]


def test_seed_must_be_unimodular():
    with pytest.raises(NeighborError):
        genus_enumerate(by_name("A2"))

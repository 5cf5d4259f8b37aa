from fractions import Fraction
from math import factorial

import pytest

from niemeier.catalog import by_name
from niemeier.isometry import automorphism_group
from niemeier.mass import MassFormulaError, even_mass_bernoulli, genus_mass


def test_rank_one_odd():
    assert genus_mass(1, "odd") == Fraction(1, 2)


@pytest.mark.parametrize("n", range(1, 9))
def test_small_odd_ranks_are_zn(n):
    # Z^n is the only odd unimodular lattice for n <= 8
    assert genus_mass(n, "odd") == Fraction(1, 2 ** n * factorial(n))


def test_rank_eight_even():
    assert genus_mass(8, "even") == Fraction(1, 696729600)
    assert genus_mass(8, "even") == Fraction(1, automorphism_group(by_name("E8")).order)


def test_rank_sixteen_even_from_groups():
    a = automorphism_group(by_name("E8+E8")).order
    b = automorphism_group(by_name("Dplus16")).order
    assert genus_mass(16, "even") == Fraction(1, a) + Fraction(1, b)


@pytest.mark.parametrize("rank", [8, 16, 24, 32])
def test_even_mass_matches_bernoulli_form(rank):
    assert genus_mass(rank, "even") == even_mass_bernoulli(rank)


def test_rank_nine_odd():
    # Z^9 and E8+Z1
    expected = Fraction(1, 2 ** 9 * factorial(9)) + Fraction(1, 2 * 696729600)
    assert genus_mass(9, "odd") == expected


@pytest.mark.parametrize("args", [(12, "even"), (0, "odd"), (8, "neither"), (-3, "even")])
def test_unsupported_arguments(args):
    with pytest.raises(MassFormulaError):
        genus_mass(*args)


def test_bernoulli_form_rejects_bad_rank():
    with pytest.raises(MassFormulaError):
        even_mass_bernoulli(12)

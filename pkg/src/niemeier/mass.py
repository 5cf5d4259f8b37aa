"""Exact Minkowski–Siegel masses of unimodular genera.

The mass is the standard mass (a product of Gamma and zeta values) times the
ratio of the true 2-adic mass to the standard 2-adic mass.  Both are exact
rationals: the powers of pi cancel, zeta at even integers is a Bernoulli
number and the Dirichlet L-value at odd integers (character of Q(i)) is an
Euler number.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

from sympy import bernoulli, euler


class MassFormulaError(ValueError):
    pass


def _q(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _gamma_half(j: int) -> tuple[Fraction, Fraction]:
    """Gamma(j/2) as (rational, power of pi)."""
    if j % 2 == 0:
        return Fraction(factorial(j // 2 - 1)), Fraction(0)
    k = (j - 1) // 2
    return Fraction(factorial(2 * k), 4 ** k * factorial(k)), Fraction(1, 2)


def _zeta_even(m: int) -> tuple[Fraction, Fraction]:
    return abs(_q(bernoulli(m))) * Fraction(2 ** m, 2 * factorial(m)), Fraction(m)


def _beta_odd(m: int) -> tuple[Fraction, Fraction]:
    # L(m, chi_-4) for odd m
    k = (m - 1) // 2
    return abs(_q(euler(2 * k))) * Fraction(1, 4 ** (k + 1) * factorial(2 * k)), Fraction(m)


@lru_cache(maxsize=None)
def standard_mass(n: int) -> Fraction:
    """2 π^{-n(n+1)/4} Π Γ(j/2) · ζ(2)ζ(4)…ζ(2s-2) · ζ_D(s) for det-1 forms."""
    s = (n + 1) // 2
    val, pi_exp = Fraction(2), Fraction(-n * (n + 1), 4)
    for j in range(1, n + 1):
        a, b = _gamma_half(j)
        val *= a
        pi_exp += b
    for j in range(1, s):
        a, b = _zeta_even(2 * j)
        val *= a
        pi_exp += b
    if n % 2 == 0:
        # D = (-1)^s: ζ(s) when s is even, L(s, χ_{-4}) when s is odd
        a, b = _zeta_even(s) if s % 2 == 0 else _beta_odd(s)
        val *= a
        pi_exp += b
    assert pi_exp == 0
    return val


def _standard_2_mass(n: int) -> Fraction:
    s = (n + 1) // 2
    v = Fraction(2)
    for j in range(1, s):
        v *= 1 - Fraction(1, 4 ** j)
    if n % 2 == 0:
        # (D/2) = +1 since D = ±1 ≡ ±1 (mod 8)
        v *= 1 - Fraction(1, 2 ** s)
    return 1 / v


def _species_factor(s: int, sign: int = 1) -> Fraction:
    """Diagonal factor M(f_q) of a 2-adic constituent of the given species."""
    v = Fraction(2)
    if s % 2:
        for i in range(2, s, 2):
            v *= 1 - Fraction(1, 2 ** i)
    else:
        for i in range(2, s, 2):
            v *= 1 - Fraction(1, 2 ** i)
        v *= 1 - sign * Fraction(1, 2 ** (s // 2))
    return 1 / v


def _two_adic_mass(n: int, even: bool) -> Fraction:
    if even:
        # type II constituent: species n+, type factor 2^{-n}
        return _species_factor(n, 1) / 2 ** n
    # type I: the quadratic space on characteristic-orthogonal classes mod 2
    octane = n % 8
    if n == 1:
        return _species_factor(1) / 4
    if n % 2:
        return _species_factor(n - 1, 1 if octane in (1, 7) else -1) / 4
    if n % 4 == 0:
        return _species_factor(n - 2, 1 if octane == 0 else -1) / 4
    return _species_factor(n, 1) / 4


def genus_mass(rank: int, parity: str) -> Fraction:
    """Σ 1/|Aut| over the genus of positive definite unimodular lattices."""
    if parity not in ("even", "odd"):
        raise MassFormulaError("parity must be 'even' or 'odd'")
    if rank < 1:
        raise MassFormulaError("rank must be positive")
    even = parity == "even"
    if even and rank % 8:
        raise MassFormulaError("even unimodular lattices need rank divisible by 8")
    return standard_mass(rank) * _two_adic_mass(rank, even) / _standard_2_mass(rank)


def even_mass_bernoulli(rank: int) -> Fraction:
    """Closed form |B_k|/(2k) Π_{j<k} |B_2j|/(4j) for even genera, k = rank/2."""
    if rank % 8:
        raise MassFormulaError("even unimodular lattices need rank divisible by 8")
    k = rank // 2
    v = abs(_q(bernoulli(k))) / (2 * k)
    for j in range(1, k):
        v *= abs(_q(bernoulli(2 * j))) / (4 * j)
    return v

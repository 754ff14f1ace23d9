"""Scalar backends: rationals, prime fields, truncated Laurent series."""

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quizlab.errors import (
    NoSuchRootError,
    NotHolomorphicAtOriginError,
    PrecisionUnderflowError,
)
from quizlab.exact import (
    LaurentSeries,
    PrimeFieldElement,
    laurent_arith,
    laurent_limit,
    modular_root_of_unity,
    multiplicative_order,
    prime_field_from_rational,
    rational_from_str,
    rational_to_str,
    smallest_prime_modulus,
)

rationals = st.fractions(
    min_value=-100, max_value=100, max_denominator=50
)


@given(rationals, rationals, rationals)
def test_rational_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a * (b + c) == a * b + a * c
    # Fractions are always reduced with positive denominator
    from math import gcd

    assert gcd(a.numerator, a.denominator) == 1 and a.denominator > 0


def test_rational_string_codec():
    q = Fraction(-14, 6)
    assert rational_to_str(q) == "-7/3"
    assert rational_from_str("-7/3") == q
    assert rational_from_str("5") == Fraction(5)


def eps(exp=1, coeff=1):
    return LaurentSeries.monomial(coeff, exp)


def test_laurent_telescoping_product():
    a = eps(-1) + LaurentSeries.from_rational(1)  # e^-1 + 1
    assert laurent_arith(a, eps(1), "mul") == LaurentSeries.from_pairs([(0, 1), (1, 1)])


def test_laurent_cancellation_sum():
    a = LaurentSeries.from_pairs([(0, 1), (1, 1)])
    b = LaurentSeries.from_pairs([(0, 1), (1, -1)])
    assert laurent_arith(a, b, "add") == LaurentSeries.from_rational(2)


def test_laurent_monomial_product():
    half_over_eps = eps(-1, Fraction(1, 2))
    two_eps_sq = eps(2, 2)
    assert laurent_arith(half_over_eps, two_eps_sq, "mul") == eps(1)


def test_laurent_limit_examples():
    assert laurent_limit(LaurentSeries.from_pairs([(0, 3), (1, 2)])) == 3
    assert laurent_limit(LaurentSeries.zero()) == 0
    with pytest.raises(NotHolomorphicAtOriginError):
        laurent_limit(LaurentSeries.from_pairs([(-1, 1), (0, 1)]))


def test_laurent_limit_ignores_higher_terms():
    rng = random.Random(7)
    for _ in range(50):
        a = LaurentSeries.from_pairs(
            [(k, Fraction(rng.randint(-5, 5))) for k in range(0, 4)]
        )
        b = LaurentSeries.from_pairs(
            [(k, Fraction(rng.randint(-5, 5))) for k in range(0, 4)]
        )
        assert laurent_limit(a + eps(1) * b) == laurent_limit(a)


def test_laurent_truncation_tracks_bound():
    long_series = LaurentSeries.from_pairs([(k, 1) for k in range(12)])
    t = long_series.truncate(8)
    assert t.bound == 8
    assert t.coefficient(7) == 1
    with pytest.raises(PrecisionUnderflowError):
        t.coefficient(9)


def test_laurent_substitute():
    s = LaurentSeries.from_pairs([(-1, Fraction(1, 2)), (1, 3)])
    assert s.substitute(Fraction(1, 2)) == 1 + Fraction(3, 2)
    with pytest.raises(ZeroDivisionError):
        s.substitute(Fraction(0))


def test_laurent_pair_serialization_roundtrip():
    pairs = [(-2, Fraction(5, 3)), (0, Fraction(-1)), (3, Fraction(7))]
    s = LaurentSeries.from_pairs(pairs)
    assert s.to_pairs() == pairs
    assert LaurentSeries.from_pairs(s.to_pairs()) == s


def test_modular_root_of_unity_examples():
    assert modular_root_of_unity(5, 4) == PrimeFieldElement(2, 5)
    assert modular_root_of_unity(7, 1) == PrimeFieldElement(1, 7)
    with pytest.raises(NoSuchRootError):
        modular_root_of_unity(5, 3)


def test_modular_root_exhaustive_oracle():
    # brute force: 2 is the first base whose power has order exactly 4 mod 5
    p, d = 5, 4
    orders = {a: multiplicative_order(PrimeFieldElement(a, p)) for a in range(1, p)}
    first = min(a for a, order in orders.items() if order == d)
    assert modular_root_of_unity(p, d).residue == first


@pytest.mark.parametrize("d", [1, 2, 3, 4, 6, 8, 12, 31])
def test_root_order_property(d):
    p = smallest_prime_modulus(d)
    assert p > 2 * d and (p - 1) % d == 0
    root = modular_root_of_unity(p, d)
    assert (root ** d).residue == 1
    for q in range(1, d):
        if d % q == 0:
            assert (root ** q).residue != 1


def test_prime_field_from_rational():
    x = prime_field_from_rational(Fraction(1, 2), 7)
    assert (x * PrimeFieldElement(2, 7)).residue == 1
    with pytest.raises(ZeroDivisionError):
        prime_field_from_rational(Fraction(1, 7), 7)

"""Circuit evaluation, expansion, size accounting and the generic computation."""

import random
from fractions import Fraction

import pytest

from quizlab.circuit import (
    Circuit,
    CircuitBuilder,
    generic_computation,
    generic_parameters_used,
)
from quizlab.errors import ArityMismatchError, ExpansionCapExceededError
from quizlab.exact import LaurentRing, LaurentSeries
from quizlab.families import (
    build_circuit,
    easy_power_sum,
    expand_family,
    univariate_d,
)
from quizlab.poly import Polynomial
from conftest import random_fraction


def test_power_sum_eval_example():
    circ = build_circuit(easy_power_sum(1, 2))
    value = circ.evaluate([Fraction(1)] * 3, [Fraction(1), Fraction(1)])
    assert value == 3  # 1 + (X1 + X2) at (1, 1)


def test_power_sum_t_zero():
    circ = build_circuit(easy_power_sum(2, 2))
    rng = random.Random(3)
    for _ in range(10):
        params = [Fraction(0)] + [random_fraction(rng) for _ in range(2)]
        inputs = [random_fraction(rng) for _ in range(2)]
        assert circ.evaluate(params, inputs) == 0


def test_expand_examples():
    assert build_circuit(easy_power_sum(1, 1)).expand([2, 3]) == Polynomial.make(
        1, {(0,): Fraction(2), (1,): Fraction(6)}
    )
    assert build_circuit(univariate_d(2)).expand([2]) == Polynomial.make(
        1, {(0,): Fraction(7), (1,): Fraction(14), (2,): Fraction(28)}
    )
    assert build_circuit(easy_power_sum(2, 2)).expand([0, 3, 4]).is_zero()


def test_expand_symbolic():
    # circuit computing t * (u * X), one parameter pair, one input
    b = CircuitBuilder(n_inputs=1, n_params=2)
    out = b.mul(b.param(0), b.mul(b.param(1), b.input(0)))
    circ = b.finish(out)
    sym = circ.expand_symbolic()
    assert sym == Polynomial.make(3, {(1, 1, 1): Fraction(1)})

    sym2 = build_circuit(easy_power_sum(1, 1)).expand_symbolic()
    # T + T*U*X in variables (T, U, X)
    assert sym2 == Polynomial.make(3, {(1, 0, 0): Fraction(1), (1, 1, 1): Fraction(1)})

    b = CircuitBuilder(n_inputs=1, n_params=0)
    circ = b.finish(b.const(5))
    assert circ.expand_symbolic() == Polynomial.make(1, {(0,): Fraction(5)})


def test_symbolic_substitution_consistency(rng):
    circ = build_circuit(easy_power_sum(2, 2))
    sym = circ.expand_symbolic()
    for _ in range(10):
        params = [random_fraction(rng) for _ in range(3)]
        inputs = [random_fraction(rng) for _ in range(2)]
        assert sym.evaluate(params + inputs) == circ.evaluate(params, inputs)


def test_eval_matches_expand_all_families(rng):
    # 200 random (params, inputs) pairs per family
    from quizlab.families import hypercube_shift, kronecker_diag, neural_power

    for desc in (
        easy_power_sum(2, 2),
        univariate_d(5),
        neural_power(3),
        hypercube_shift(3),
        kronecker_diag(3),
    ):
        circ = build_circuit(desc)
        for _ in range(200):
            params = [random_fraction(rng, span=5) for _ in range(circ.n_params)]
            inputs = [random_fraction(rng, span=5) for _ in range(circ.n_inputs)]
            expanded = circ.expand(params)
            assert expanded.evaluate(inputs) == circ.evaluate(params, inputs)


def test_laurent_substitution_homomorphism():
    # evaluating over Laurent parameters then substituting e = 1/16 agrees
    # with evaluating over rationals at the substituted parameters
    circ = build_circuit(easy_power_sum(1, 2))
    ring = LaurentRing(64)
    germ = [
        LaurentSeries.monomial(Fraction(1, 2), -1),
        LaurentSeries.from_pairs([(0, 1), (1, 1)]),
        LaurentSeries.epsilon(),
    ]
    inputs = [ring.from_rational(Fraction(2)), ring.from_rational(Fraction(-3))]
    laurent_value = circ.evaluate(germ, inputs, ring)
    at_sixteenth = laurent_value.substitute(Fraction(1, 16))
    rational_params = [g.substitute(Fraction(1, 16)) for g in germ]
    assert at_sixteenth == circ.evaluate(rational_params, [Fraction(2), Fraction(-3)])


def test_generic_computation_shape():
    g = generic_computation(1, 1)
    assert g.n_params == 9
    assert sum(g.essential_mul_flags()) == 1
    for L in range(1, 5):
        for n in range(1, 5):
            c = generic_computation(L, n)
            assert c.n_params == (L + n + 1) ** 2
            assert sum(c.essential_mul_flags()) == L
            assert generic_parameters_used(L, n) <= c.n_params


def test_generic_affine_case():
    # L = 0 realizes exactly the affine forms c0 + sum c_j X_j
    circ = generic_computation(0, 2)
    assert circ.n_params == 9  # (0 + 2 + 1)^2, padded past the 3 used slots
    params = [Fraction(x) for x in (5, 2, -3)] + [Fraction(0)] * 6
    f = circ.expand(params)
    assert f == Polynomial.make(
        2, {(0, 0): Fraction(5), (1, 0): Fraction(2), (0, 1): Fraction(-3)}
    )


def test_generic_realizes_square():
    # brute force: parameters selecting p1 = X * X, output = p1
    circ = generic_computation(1, 1)
    params = [Fraction(0)] * 9
    params[1] = Fraction(1)  # left factor: X
    params[3] = Fraction(1)  # right factor: X
    params[6] = Fraction(1)  # output: p1
    assert circ.expand(params) == Polynomial.make(1, {(2,): Fraction(1)})
    assert circ.evaluate(params, [Fraction(3)]) == 9


def test_size_counts():
    b = CircuitBuilder(n_inputs=0, n_params=0)
    out = b.add(b.const(1), b.const(1))
    circ = b.finish(out)
    size = circ.size()
    assert size.gates == 1 and size.essential_muls == 0
    # shared const leaf: builder interning keeps a single node
    assert size.leaves == 1


def test_essential_flags():
    b = CircuitBuilder(n_inputs=1, n_params=1)
    x, t = b.input(0), b.param(0)
    scalar_mul = b.mul(t, x)       # param * input: not essential
    square = b.mul(x, x)           # input * input: essential
    chained = b.mul(square, t)     # essential-mul * param: not essential
    out = b.mul(square, scalar_mul)  # both sides involve inputs: essential
    circ = b.finish(out)
    flags = circ.essential_mul_flags()
    assert flags[scalar_mul] is False
    assert flags[square] is True
    assert flags[chained] is False
    assert flags[out] is True


def test_arity_checks():
    circ = build_circuit(easy_power_sum(1, 1))
    with pytest.raises(ArityMismatchError):
        circ.evaluate([Fraction(1)], [Fraction(1)])
    with pytest.raises(ArityMismatchError):
        circ.evaluate([Fraction(1), Fraction(1)], [])


def test_expansion_cap_reports_node():
    circ = build_circuit(easy_power_sum(3, 2))
    with pytest.raises(ExpansionCapExceededError) as info:
        circ.expand([1, 2, 3], cap=5)
    assert info.value.node is not None


def test_serialization_roundtrip():
    for desc in (easy_power_sum(2, 3), univariate_d(4)):
        circ = build_circuit(desc)
        text = circ.to_text()
        clone = Circuit.from_text(text)
        assert clone.to_text() == text
        params = [Fraction(i + 1) for i in range(circ.n_params)]
        assert clone.expand(params) == circ.expand(params)
    g = generic_computation(2, 2)
    assert Circuit.from_text(g.to_text()).to_text() == g.to_text()

"""Family constructors, their dual-path oracles, curves and the formula emitter."""

import math
import random
from fractions import Fraction

import pytest

from quizlab.errors import CapExceededError, QuizlabError, UnsupportedTaskError
from quizlab.families import (
    CURVE_FIXED_DIRECTION,
    CURVE_POWER_TOWER,
    CURVE_ROOT_SHIFT,
    TASK_DERIVATIVE,
    TASK_ELIMINATION,
    FamilyDescriptor,
    beta_curve,
    build_circuit,
    circuit_gate_bound,
    easy_power_sum,
    elimination_poly,
    emit_formula,
    expand_family,
    hypercube_shift,
    kronecker_diag,
    neural_power,
    univariate_d,
)
from quizlab.poly import Polynomial
from conftest import random_fraction

ALL_DESK_DESCRIPTORS = (
    easy_power_sum(2, 2),
    univariate_d(6),
    neural_power(3),
    hypercube_shift(3),
    kronecker_diag(3),
)


def test_descriptor_validation():
    with pytest.raises(UnsupportedTaskError):
        FamilyDescriptor("easy-power-sum", task="derivative", l=1, n=1)
    with pytest.raises(QuizlabError):
        FamilyDescriptor("univariate-d")
    assert easy_power_sum(2, 3).param_arity == 4
    assert univariate_d(5).param_arity == 1
    assert kronecker_diag(4).param_arity == 5


def test_expand_family_examples():
    f = expand_family(easy_power_sum(1, 1), [1, 2])
    assert f == Polynomial.make(1, {(0,): Fraction(1), (1,): Fraction(2)})
    g = expand_family(univariate_d(2, TASK_DERIVATIVE), [2])
    assert g == Polynomial.make(1, {(0,): Fraction(14), (1,): Fraction(56)})
    # any (D+1)-th root of unity in Q, i.e. t = 1, kills the family
    assert expand_family(univariate_d(5), [1]).is_zero()


def test_neural_power_eval_example():
    circ = build_circuit(neural_power(2))
    value = circ.evaluate([Fraction(1)] * 3, [Fraction(1), Fraction(1)])
    assert value == 4  # 1 * (1 + 1)^2


def test_dual_path_equivalence(rng):
    for desc in ALL_DESK_DESCRIPTORS:
        circ = build_circuit(desc.base())
        for _ in range(25):
            point = [random_fraction(rng) for _ in range(desc.param_arity)]
            assert circ.expand(point) == expand_family(desc.base(), point), desc.label()


def test_gate_bounds_across_desk_scale():
    for l in range(1, 9):
        for n in range(1, 9):
            if l * n > 8:
                continue
            desc = easy_power_sum(l, n)
            assert build_circuit(desc).size().gates <= 2 * n + 3 * l - 1
    for n in range(1, 6):
        desc = hypercube_shift(n)
        assert build_circuit(desc).size().gates <= 5 * n
        assert circuit_gate_bound(desc) == 5 * n
    for n in range(1, 7):
        desc = neural_power(n)
        bound = 2 * n + 2 * math.ceil(math.log2(n)) if n > 1 else 2
        assert build_circuit(desc).size().gates <= bound


def test_power_sum_essential_multiplications():
    # the family is computable with 2l - 2 essential multiplications
    for l, n in ((1, 1), (2, 2), (3, 2), (2, 3)):
        circ = build_circuit(easy_power_sum(l, n))
        assert circ.size().essential_muls == max(2 * l - 2, 0)


def test_hypercube_essential_multiplications():
    for n in range(1, 6):
        circ = build_circuit(hypercube_shift(n))
        assert circ.size().essential_muls == n - 1


def test_univariate_circuit_reported_count():
    # no fixed budget for this family: the construction's count is reported
    for d in (2, 3, 7, 16):
        size = build_circuit(univariate_d(d)).size()
        assert size.gates <= 6 * math.ceil(math.log2(d + 1)) + 4


def test_power_sum_term_count():
    rng = random.Random(5)
    desc = easy_power_sum(2, 2)
    for _ in range(5):
        point = [Fraction(rng.randint(1, 9)) for _ in range(3)]
        f = expand_family(desc, point)
        assert f.term_count() == math.comb(2 ** 2 - 1 + 2, 2) == 10


def test_degeneration_at_t_zero(rng):
    for desc in (easy_power_sum(2, 2), neural_power(3)):
        u = [Fraction(0)] + [random_fraction(rng) for _ in range(desc.param_arity - 1)]
        assert expand_family(desc, u).is_zero()
    base = None
    for _ in range(5):
        u = [Fraction(0)] + [random_fraction(rng) for _ in range(3)]
        f = expand_family(hypercube_shift(3), u)
        base = f if base is None else base
        assert f == base
    # the t = 0 hypercube polynomial is the binary weight form
    assert base == Polynomial.make(
        3, {(1, 0, 0): Fraction(1), (0, 1, 0): Fraction(2), (0, 0, 1): Fraction(4)}
    )


def test_elimination_poly_examples():
    f = elimination_poly(2, 0, [7, 9])
    assert f == Polynomial.make(
        1,
        {(4,): Fraction(1), (3,): Fraction(-6), (2,): Fraction(11), (1,): Fraction(-6)},
    )
    g = elimination_poly(2, 1, [1, 1])
    assert g == Polynomial.make(
        1,
        {
            (4,): Fraction(1),
            (3,): Fraction(-10),
            (2,): Fraction(35),
            (1,): Fraction(-50),
            (0,): Fraction(24),
        },
    )
    with pytest.raises(CapExceededError):
        elimination_poly(11, 1, [1] * 11)


def test_elimination_both_paths_agree(rng):
    # the op self-checks its two product routes; exercise it on random data
    for _ in range(50):
        t = random_fraction(rng)
        u = [random_fraction(rng) for _ in range(3)]
        f = elimination_poly(3, t, u)
        assert f.coefficient((8,)) == 1  # monic of degree 2^3


def test_elimination_matches_task_expansion(rng):
    desc = hypercube_shift(3, TASK_ELIMINATION)
    for _ in range(10):
        point = [random_fraction(rng) for _ in range(4)]
        assert expand_family(desc, point) == elimination_poly(3, point[0], point[1:])


def test_beta_curves():
    curve = beta_curve(easy_power_sum(1, 2), CURVE_POWER_TOWER, 2)
    assert curve(Fraction(5)) == (5, 2, 4)
    curve = beta_curve(neural_power(2), CURVE_FIXED_DIRECTION, (1, 0))
    assert curve(Fraction(3)) == (3, 1, 0)
    curve = beta_curve(univariate_d(4), CURVE_ROOT_SHIFT, 1)
    assert curve(Fraction(1, 2)) == (Fraction(3, 2),)
    with pytest.raises(QuizlabError):
        beta_curve(univariate_d(4), CURVE_POWER_TOWER, 2)


def test_emit_formula_structure():
    rep = emit_formula(1)
    assert rep.equation_count == 18
    tokens = rep.text.split()
    assert tokens.count("EX") == 3  # X1, T, U1
    v_equations = sum(1 for tok in tokens if tok.startswith("V"))
    assert v_equations == 18
    for n in range(1, 4):
        rep = emit_formula(n)
        assert rep.equation_count == 16 * n * n + 2
        assert emit_formula(n).text == rep.text  # canonical output


def test_emit_formula_cubic_growth():
    counts = {n: emit_formula(n).symbol_count for n in range(1, 7)}
    ratios = {n: counts[n] / n ** 3 for n in counts}
    fitted = max(ratios.values())
    assert all(counts[n] <= fitted * n ** 3 for n in counts)
    # the dominant term is the K = 16 n^2 + 2 equations of O(n) tokens each
    assert fitted < 400

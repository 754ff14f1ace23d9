"""Quiz-game rounds: exact, approximative, fibers, information hiding."""

import random
from fractions import Fraction

import pytest

from quizlab.approx import GermInstance, border_demo_germ, border_family_circuit
from quizlab.errors import (
    InconsistentSystemError,
    NoFiberSamplerError,
    NonIdentifyingPointsError,
    NoStableClusterError,
    NotHolomorphicAtOriginError,
    UnderdeterminedSystemError,
)
from quizlab.exact import LaurentSeries
from quizlab.families import (
    TASK_CHARPOLY,
    TASK_DERIVATIVE,
    TASK_ELIMINATION,
    TASK_INTEGRAL,
    easy_power_sum,
    expand_family,
    hypercube_shift,
    kronecker_diag,
    neural_power,
    univariate_d,
)
from quizlab.identify import IdentificationSequence
from quizlab.poly import Polynomial
from quizlab.protocol import (
    MODE_NUMERIC,
    MODE_SYMBOLIC,
    ApproxGameConfig,
    Strategy,
    builtin_strategy,
    decide_equal,
    fiber_image,
    player_interpolate,
    run_approx,
    run_exact,
    symmetric_integer_points,
)
from conftest import lagrange_interpolate, random_fraction


def border_strategy() -> Strategy:
    return Strategy(
        question_points=IdentificationSequence.from_points([(1, 0), (0, 1), (1, 1)]),
        target_support=((2, 0), (1, 1), (0, 2)),
    )


def test_pinned_transcript_d2_t2():
    transcript = run_exact(univariate_d(2), [2])
    assert transcript.strategy_points == ((0,), (1,), (-1,))
    assert transcript.quizmaster_message == ("7/1", "49/1", "21/1")
    assert transcript.player_message == ("7/1", "14/1", "28/1")
    assert transcript.verdict == "accept"


def test_transcript_matches_lagrange_oracle():
    # independent route: Lagrange interpolation at the same points
    values = [Fraction(7), Fraction(49), Fraction(21)]
    coeffs = lagrange_interpolate([0, 1, -1], values)
    assert coeffs == [Fraction(7), Fraction(14), Fraction(28)]


def test_zero_family_round():
    transcript = run_exact(univariate_d(2), [1])
    assert transcript.quizmaster_message == ("0/1", "0/1", "0/1")
    assert transcript.player_message == ("0/1", "0/1", "0/1")
    assert transcript.verdict == "accept"


def test_derivative_round():
    transcript = run_exact(univariate_d(2, TASK_DERIVATIVE), [2])
    assert transcript.player_message == ("14/1", "56/1")
    assert transcript.verdict == "accept"


def test_player_interpolate_examples():
    coeffs = player_interpolate(
        [Fraction(7), Fraction(49), Fraction(21)],
        [(0,), (1,), (-1,)],
        ((0,), (1,), (2,)),
    )
    assert coeffs == [Fraction(7), Fraction(14), Fraction(28)]
    zeros = player_interpolate(
        [Fraction(0)] * 3, [(0,), (1,), (-1,)], ((0,), (1,), (2,))
    )
    assert zeros == [Fraction(0)] * 3
    with pytest.raises(InconsistentSystemError):
        player_interpolate([Fraction(0), Fraction(1)], [(0,), (0,)], ((0,),))
    with pytest.raises(UnderdeterminedSystemError):
        player_interpolate([Fraction(0), Fraction(0)], [(5,), (5,)], ((0,), (1,)))


def test_decide_equal_examples():
    support = ((0,), (1,), (2,), (3,))
    zero = ((0,),), (Fraction(0),)
    theta_at_one = support, expand_family(univariate_d(3), [1]).coeff_vector(support)
    points = symmetric_integer_points(5)
    assert decide_equal(theta_at_one, zero, points)
    a = (((0,), (1,)), (Fraction(1), Fraction(2)))
    b = (((1,), (0,)), (Fraction(2), Fraction(1)))  # same polynomial, permuted
    assert decide_equal(a, b, points)
    x = (((1,),), (Fraction(1),))
    x_squared = (((2,),), (Fraction(1),))
    assert not decide_equal(x, x_squared, [(0,), (1,), (2,)])


def test_winning_strategy_small_sweep(rng):
    cases = [
        univariate_d(4),
        univariate_d(4, TASK_DERIVATIVE),
        univariate_d(4, TASK_INTEGRAL),
        easy_power_sum(2, 2),
        neural_power(2),
        hypercube_shift(2, TASK_ELIMINATION),
        kronecker_diag(2, TASK_CHARPOLY),
    ]
    for desc in cases:
        strategy = builtin_strategy(desc, seed=1)
        for _ in range(10):
            hidden = [random_fraction(rng) for _ in range(desc.param_arity)]
            transcript = run_exact(desc, hidden, strategy=strategy)
            assert transcript.verdict == "accept", desc.label()


def test_non_identifying_points_error():
    desc = univariate_d(2)
    bad = Strategy(
        question_points=IdentificationSequence.from_points([(1,), (1,), (1,)]),
        target_support=((0,), (1,), (2,)),
    )
    with pytest.raises(NonIdentifyingPointsError):
        run_exact(desc, [2], strategy=bad)


def test_inconsistent_support_signals_nonmembership():
    # declare a support that cannot explain the values of a cubic family
    desc = univariate_d(3)
    strategy = Strategy(
        question_points=IdentificationSequence.from_points(
            list(symmetric_integer_points(4))
        ),
        target_support=((0,), (1,)),
    )
    with pytest.raises(InconsistentSystemError):
        run_exact(desc, [2], strategy=strategy)


def test_quizmaster_message_factors_through_theta(rng):
    # hidden points in the same fiber produce identical messages
    desc = hypercube_shift(3)
    strategy = builtin_strategy(desc, seed=4)
    hiddens = [
        (Fraction(0),) + tuple(random_fraction(rng) for _ in range(3))
        for _ in range(4)
    ]
    messages = {
        run_exact(desc, h, strategy=strategy).quizmaster_message for h in hiddens
    }
    assert len(messages) == 1


def test_information_hiding_audit():
    desc = easy_power_sum(2, 2)
    strategy = builtin_strategy(desc, seed=9)
    t1 = run_exact(desc, (0, 3, 5), strategy=strategy)
    t2 = run_exact(desc, (0, -2, 7), strategy=strategy)
    assert t1.export(include_hidden=False) == t2.export(include_hidden=False)
    assert "withheld" in t1.export(include_hidden=False)
    audit = t1.export(include_hidden=True)
    assert "3/1" in audit.split("hidden: ")[1]
    redacted = t1.redacted()
    assert redacted.hidden is None and redacted.hidden_withheld


def test_fiber_image_examples(rng):
    for desc in (easy_power_sum(2, 2), neural_power(2), hypercube_shift(3)):
        strategy = builtin_strategy(desc, seed=2)
        vectors = fiber_image(
            desc, strategy, (0,) * desc.param_arity, samples=30, seed=5
        )
        assert len(vectors) == 1
    # the hypercube fiber value is the binary weight polynomial, not zero
    desc = hypercube_shift(3)
    vectors = fiber_image(desc, builtin_strategy(desc, seed=2), (0, 1, 1, 1), 10, 3)
    expected = expand_family(desc, (0, 9, 9, 9)).coeff_vector(desc.base_support())
    assert vectors == (tuple(expected),)


def test_fiber_requires_degeneration():
    desc = easy_power_sum(2, 2)
    with pytest.raises(NoFiberSamplerError):
        fiber_image(desc, None, (1, 0, 0), samples=5, seed=0)


def test_approx_symbolic_border():
    target = Polynomial.make(2, {(1, 1): Fraction(1)})
    config = ApproxGameConfig(germ=border_demo_germ(), mode=MODE_SYMBOLIC)
    transcript = run_approx(border_family_circuit(2), border_strategy(), config, target)
    assert transcript.verdict == "accept"
    assert transcript.player_message == ("0/1", "1/1", "0/1")


def test_approx_constant_germ_reduces_to_exact(rng):
    for desc in (easy_power_sum(2, 2), univariate_d(3, TASK_DERIVATIVE)):
        strategy = builtin_strategy(desc, seed=3)
        hidden = tuple(random_fraction(rng) for _ in range(desc.param_arity))
        exact = run_exact(desc, hidden, strategy=strategy)
        config = ApproxGameConfig(
            germ=GermInstance.constant(hidden), mode=MODE_SYMBOLIC
        )
        target = expand_family(desc.base(), hidden)
        approx = run_approx(desc, strategy, config, target)
        assert approx.verdict == exact.verdict == "accept"
        assert approx.player_message == exact.player_message


def test_approx_diverging_germ():
    desc = easy_power_sum(1, 2)
    config = ApproxGameConfig(
        germ=GermInstance.make([LaurentSeries.monomial(1, -1), 1, 1]),
        mode=MODE_SYMBOLIC,
    )
    target = expand_family(desc, (1, 1, 1))
    with pytest.raises(NotHolomorphicAtOriginError):
        run_approx(desc, None, config, target)


def test_approx_numeric_mode():
    target = Polynomial.make(2, {(1, 1): Fraction(1)})
    schedule = tuple(Fraction(1, 2 ** k) for k in range(1, 13))
    config = ApproxGameConfig(
        germ=border_demo_germ(),
        mode=MODE_NUMERIC,
        sample_schedule=schedule,
        cluster_tolerance=Fraction(1, 64),
    )
    transcript = run_approx(border_family_circuit(2), border_strategy(), config, target)
    assert transcript.verdict == "accept"


def test_approx_numeric_no_cluster():
    # an exploding germ never clusters under exact tolerance zero
    desc = easy_power_sum(1, 1)
    germ = GermInstance.make([LaurentSeries.monomial(1, -1), 1])
    schedule = tuple(Fraction(1, 2 ** k) for k in range(1, 9))
    config = ApproxGameConfig(
        germ=germ, mode=MODE_NUMERIC, sample_schedule=schedule
    )
    target = expand_family(desc, (1, 1))
    with pytest.raises(NoStableClusterError):
        run_approx(desc, None, config, target)


def test_symmetric_points():
    assert symmetric_integer_points(5) == ((0,), (1,), (-1,), (2,), (-2,))

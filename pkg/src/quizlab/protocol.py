"""Exact and approximative quiz-game protocols as one-round state machines.

One exact run: the quizmaster hides a parameter point, answers the player's
fixed evaluation questions about the hidden polynomial by running the
family circuit, the player interpolates exactly on a declared support and
re-encodes (optionally differentiating, integrating, or repacking vertex
values into an elimination/characteristic polynomial), and the quizmaster
compares the player's encoding against a reference encoding computed
directly from the hidden point.  Both encodings are compared by evaluation
at identification points.

The approximative run replaces the hidden point by a Laurent germ (symbolic
mode, the authoritative path: interpolation happens over truncated Laurent
scalars and the answer is the termwise value at the origin) or by a finite
sample schedule (numeric mode: candidate accumulation values are clusters
covering at least half of the schedule's tail).  A constant germ reproduces
the exact game bit for bit.

Message order is quizmaster -> player -> quizmaster; questions are fixed up
front, never adaptive.  Transcripts exported by the quizmaster redact the
hidden data; two hidden points with the same base polynomial produce
byte-identical redacted transcripts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .approx import GermInstance, sequence_from_germ
from .circuit import Circuit
from .errors import (
    ArityMismatchError,
    NoFiberSamplerError,
    NonIdentifyingPointsError,
    NoStableClusterError,
    QuizlabError,
    UnderdeterminedSystemError,
)
from .exact import (
    DEFAULT_LAURENT_PRECISION,
    RATIONALS,
    LaurentRing,
    laurent_limit,
    rational_to_str,
)
from .families import (
    KRONECKER_DIAG,
    TASK_CHARPOLY,
    TASK_DERIVATIVE,
    TASK_ELIMINATION,
    TASK_IDENTITY,
    TASK_INTEGRAL,
    FamilyDescriptor,
    build_circuit_cached,
    expand_family,
)
from .identify import IdentificationSequence, sample_sequence, verify_linear_span
from .kronecker import build_theta_matrix, char_poly
from .poly import Monomial, Polynomial, from_coeff_vector
from .witness import solve_exact

POST_IDENTITY = "identity"
POST_DIFFERENTIATE = "differentiate"
POST_INTEGRATE = "integrate"
POST_ELIMINATION = "elimination-repack"
POST_CHARPOLY = "charpoly-repack"

TASK_TO_POST = {
    TASK_IDENTITY: POST_IDENTITY,
    TASK_DERIVATIVE: POST_DIFFERENTIATE,
    TASK_INTEGRAL: POST_INTEGRATE,
    TASK_ELIMINATION: POST_ELIMINATION,
    TASK_CHARPOLY: POST_CHARPOLY,
}

MODE_SYMBOLIC = "symbolic"
MODE_NUMERIC = "numeric"

VERDICT_ACCEPT = "accept"
VERDICT_REJECT = "reject"


@dataclass(frozen=True)
class Strategy:
    """The player's strategy: fixed questions, declared support, re-encoding."""

    question_points: IdentificationSequence
    target_support: tuple[Monomial, ...]
    post_map: str = POST_IDENTITY

    def __post_init__(self):
        if len(self.target_support) > self.question_points.length:
            raise QuizlabError(
                "need at least as many question points as support monomials"
            )


@dataclass(frozen=True)
class ApproxGameConfig:
    """Hidden data for one approximative run.

    Symbolic mode needs a germ.  Numeric mode needs a germ plus a sample
    schedule of at least 8 epsilon values, or an explicit parameter
    sequence of at least 8 points; values within ``cluster_tolerance`` of
    each other are clustered when hunting for accumulation candidates.
    """

    germ: GermInstance | None = None
    explicit_sequence: tuple[tuple[Fraction, ...], ...] | None = None
    sample_schedule: tuple[Fraction, ...] = ()
    mode: str = MODE_SYMBOLIC
    cluster_tolerance: Fraction = Fraction(0)
    precision: int | None = None

    def __post_init__(self):
        if self.mode not in (MODE_SYMBOLIC, MODE_NUMERIC):
            raise QuizlabError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_SYMBOLIC and self.germ is None:
            raise QuizlabError("symbolic mode requires a germ")
        if self.mode == MODE_NUMERIC:
            count = (
                len(self.explicit_sequence)
                if self.explicit_sequence is not None
                else len(self.sample_schedule)
            )
            if count < 8:
                raise QuizlabError("numeric mode requires at least 8 samples")


@dataclass(frozen=True)
class GameTranscript:
    """Full record of one run; ``hidden`` is retained for audit export only."""

    family: str
    mode: str
    strategy_points: tuple[tuple[int, ...], ...]
    strategy_support: tuple[Monomial, ...]
    post_map: str
    quizmaster_message: tuple[str, ...]
    player_support: tuple[Monomial, ...]
    player_message: tuple[str, ...]
    reference_support: tuple[Monomial, ...]
    reference: tuple[str, ...]
    verdict: str
    hidden: tuple | None = None
    hidden_withheld: bool = False

    def export(self, include_hidden: bool = False) -> str:
        """Structured-text serialization; the quizmaster export redacts hidden."""

        def fmt_monos(monos) -> str:
            return ";".join(",".join(str(e) for e in m) for m in monos)

        def fmt_points(points) -> str:
            return ";".join(",".join(str(x) for x in p) for p in points)

        lines = [
            "transcript v1",
            f"family: {self.family}",
            f"mode: {self.mode}",
            f"post_map: {self.post_map}",
            f"strategy.points: {fmt_points(self.strategy_points)}",
            f"strategy.support: {fmt_monos(self.strategy_support)}",
            f"quizmaster_message: {';'.join(self.quizmaster_message)}",
            f"player_support: {fmt_monos(self.player_support)}",
            f"player_message: {';'.join(self.player_message)}",
            f"reference_support: {fmt_monos(self.reference_support)}",
            f"reference: {';'.join(self.reference)}",
            f"verdict: {self.verdict}",
        ]
        if include_hidden and self.hidden is not None:
            lines.append(
                "hidden: " + ",".join(rational_to_str(Fraction(x)) for x in self.hidden)
            )
        else:
            lines.append("hidden: withheld")
        return "\n".join(lines) + "\n"

    def redacted(self) -> "GameTranscript":
        return replace(self, hidden=None, hidden_withheld=True)


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------

def symmetric_integer_points(count: int) -> tuple[tuple[int, ...], ...]:
    """0, 1, -1, 2, -2, ... as 1-dimensional points; always identifying."""
    points: list[tuple[int, ...]] = [(0,)]
    step = 1
    while len(points) < count:
        points.append((step,))
        if len(points) < count:
            points.append((-step,))
        step += 1
    return tuple(points[:count])


def builtin_strategy(desc: FamilyDescriptor, seed: int = 0) -> Strategy:
    """The library's winning strategy for a family/task.

    Interpolates the base family on its full generic support.  Univariate
    families use the fixed symmetric points 0, 1, -1, ...; multivariate
    families draw points from a small box and re-draw (deterministically)
    until the linear-span certificate passes.
    """
    base = desc.base()
    support = base.base_support()
    m = len(support)
    if base.input_arity == 1:
        points = IdentificationSequence.from_points(
            symmetric_integer_points(m), source_set_size=0, seed=None
        )
    else:
        box = max(4 * m, 8)
        attempt = 0
        while True:
            candidate = sample_sequence(base.input_arity, m, box, seed + attempt)
            if verify_linear_span(candidate, support):
                points = candidate
                break
            attempt += 1
            if attempt > 64:
                raise QuizlabError("could not find identifying question points")
    return Strategy(
        question_points=points,
        target_support=support,
        post_map=TASK_TO_POST[desc.task],
    )


# ---------------------------------------------------------------------------
# Player and quizmaster computations
# ---------------------------------------------------------------------------

def player_interpolate(
    values: Sequence,
    points: IdentificationSequence | Sequence[Sequence[int]],
    support: Sequence[Monomial],
):
    """Unique exact solution of the evaluation system on the support.

    The system matrix is rational (integer points); the values may be
    rationals or Laurent series.  Raises InconsistentSystemError when the
    values cannot come from the declared support, and
    UnderdeterminedSystemError when the points do not pin down the support.
    """
    pts = points.points if isinstance(points, IdentificationSequence) else points
    pts = [tuple(p) for p in pts]
    if len(values) != len(pts):
        raise ArityMismatchError("one value per question point required")
    rows = []
    for point in pts:
        row = []
        for mono in support:
            entry = Fraction(1)
            for e, x in zip(mono, point):
                entry *= Fraction(x) ** e
            row.append(entry)
        rows.append(row)
    return solve_exact(rows, list(values))


def apply_post_map(
    post: str,
    support: Sequence[Monomial],
    coeffs: Sequence,
    n_inputs: int,
    ring=RATIONALS,
) -> tuple[tuple[Monomial, ...], tuple]:
    """The player's re-encoding after interpolation."""
    if post == POST_IDENTITY:
        return tuple(tuple(m) for m in support), tuple(coeffs)
    f = from_coeff_vector(support, coeffs, n_inputs, ring)
    if post == POST_DIFFERENTIATE:
        g = f.derivative(0)
        new_support = tuple((j,) for j in range(max(len(support) - 1, 1)))
        return new_support, g.coeff_vector(new_support)
    if post == POST_INTEGRATE:
        g = f.integral(0)
        new_support = tuple((j,) for j in range(1, len(support) + 1))
        return new_support, g.coeff_vector(new_support)
    if post in (POST_ELIMINATION, POST_CHARPOLY):
        degree = 2 ** n_inputs
        y = Polynomial.variable(1, 0, ring)
        product = Polynomial.constant(1, ring.one, ring)
        for j in range(degree):
            vertex = [
                ring.from_rational(Fraction((j >> i) & 1)) for i in range(n_inputs)
            ]
            root = f.evaluate(vertex)
            product = product * (y - Polynomial.make(1, {(0,): root}, ring))
        new_support = tuple((j,) for j in range(degree + 1))
        return new_support, product.coeff_vector(new_support)
    raise QuizlabError(f"unknown post map {post!r}")


def reference_encoding(
    desc: FamilyDescriptor, hidden: Sequence[Fraction]
) -> tuple[tuple[Monomial, ...], tuple]:
    """The quizmaster's reference v' computed directly from the hidden point.

    Uses the closed-form family oracle; the characteristic-polynomial task
    goes through the composed matrix and the exact Faddeev-LeVerrier
    recurrence, a route fully independent of the player's product of roots.
    """
    support = desc.task_support()
    if desc.variant == KRONECKER_DIAG and desc.task == TASK_CHARPOLY:
        theta, _ = build_theta_matrix(desc.k, hidden[0], hidden[1:])
        reference_poly = char_poly(theta)
    else:
        reference_poly = expand_family(desc, hidden)
    return support, reference_poly.coeff_vector(support)


def decide_equal(
    f_enc: tuple[Sequence[Monomial], Sequence],
    g_enc: tuple[Sequence[Monomial], Sequence],
    points: IdentificationSequence | Sequence[Sequence[int]],
    tolerance: Fraction | None = None,
) -> bool:
    """Equality of two encodings by evaluation at identification points.

    With identifying points this decides polynomial equality; with
    arbitrary points the test is one-sided (False is conclusive, True is
    not).  ``tolerance`` switches to |lhs - rhs| <= tolerance per point,
    used only by the numeric approximative mode.
    """
    pts = points.points if isinstance(points, IdentificationSequence) else points

    def value(enc, point):
        support, coeffs = enc
        total = Fraction(0)
        for mono, c in zip(support, coeffs):
            term = Fraction(c)
            for e, x in zip(mono, point):
                term *= Fraction(x) ** e
            total += term
        return total

    for point in pts:
        lhs, rhs = value(f_enc, point), value(g_enc, point)
        if tolerance is None:
            if lhs != rhs:
                return False
        elif abs(lhs - rhs) > tolerance:
            return False
    return True


def _verdict_points(
    strategy: Strategy,
    support_star: Sequence[Monomial],
    support_ref: Sequence[Monomial],
) -> Sequence[Sequence[int]]:
    """Identification points for the output carrier comparison."""
    arity = len(support_star[0]) if support_star else 1
    if arity == 1:
        degree = 0
        for mono in tuple(support_star) + tuple(support_ref):
            degree = max(degree, mono[0])
        return symmetric_integer_points(degree + 1)
    return strategy.question_points.points


# ---------------------------------------------------------------------------
# Games
# ---------------------------------------------------------------------------

def _format_values(values, ring) -> tuple[str, ...]:
    return tuple(ring.to_str(v) for v in values)


def run_exact(
    desc: FamilyDescriptor,
    hidden: Sequence,
    strategy: Strategy | None = None,
    circuit: Circuit | None = None,
) -> GameTranscript:
    """One exact game round; the task is the descriptor's task."""
    strategy = strategy if strategy is not None else builtin_strategy(desc)
    if strategy.post_map != TASK_TO_POST[desc.task]:
        raise QuizlabError(
            f"strategy post map {strategy.post_map!r} does not realize task {desc.task!r}"
        )
    hidden_point = tuple(Fraction(x) for x in hidden)
    if len(hidden_point) != desc.param_arity:
        raise ArityMismatchError(
            f"hidden point must have arity {desc.param_arity}, got {len(hidden_point)}"
        )
    circ = circuit if circuit is not None else build_circuit_cached(desc.base())
    values = [
        circ.evaluate(hidden_point, [Fraction(x) for x in p])
        for p in strategy.question_points.points
    ]
    try:
        coeffs = player_interpolate(values, strategy.question_points, strategy.target_support)
    except UnderdeterminedSystemError as exc:
        raise NonIdentifyingPointsError(str(exc)) from exc
    support_star, v_star = apply_post_map(
        strategy.post_map, strategy.target_support, coeffs, desc.input_arity
    )
    support_ref, v_ref = reference_encoding(desc, hidden_point)
    check_points = _verdict_points(strategy, support_star, support_ref)
    accepted = decide_equal((support_star, v_star), (support_ref, v_ref), check_points)
    return GameTranscript(
        family=desc.label(),
        mode="exact",
        strategy_points=strategy.question_points.points,
        strategy_support=strategy.target_support,
        post_map=strategy.post_map,
        quizmaster_message=_format_values(values, RATIONALS),
        player_support=support_star,
        player_message=_format_values(v_star, RATIONALS),
        reference_support=support_ref,
        reference=_format_values(v_ref, RATIONALS),
        verdict=VERDICT_ACCEPT if accepted else VERDICT_REJECT,
        hidden=hidden_point,
    )


def _target_task_encoding(
    target: Polynomial, post: str, n_inputs: int
) -> tuple[tuple[Monomial, ...], tuple]:
    """Apply the game's task to the target polynomial H."""
    if post == POST_IDENTITY:
        support = target.support()
        return support, target.coeff_vector(support)
    if post == POST_DIFFERENTIATE:
        g = target.derivative(0)
    elif post == POST_INTEGRATE:
        g = target.integral(0)
    else:
        y = Polynomial.variable(1, 0)
        g = Polynomial.constant(1, 1)
        for j in range(2 ** n_inputs):
            vertex = [Fraction((j >> i) & 1) for i in range(n_inputs)]
            g = g * (y - Polynomial.constant(1, target.evaluate(vertex)))
    support = g.support()
    return support, g.coeff_vector(support)


def run_approx(
    desc_or_circuit: FamilyDescriptor | Circuit,
    strategy: Strategy | None,
    config: ApproxGameConfig,
    target: Polynomial,
) -> GameTranscript:
    """One approximative game round against a target polynomial H.

    Symbolic mode evaluates the whole player pipeline over truncated
    Laurent scalars and takes the termwise value at the origin as the
    single accumulation candidate; a pole in any player coefficient raises
    NotHolomorphicAtOriginError (the boundedness condition fails).  Numeric
    mode evaluates a finite schedule exactly and reports the dominant
    cluster of the tail half, or raises NoStableClusterError.
    """
    if isinstance(desc_or_circuit, FamilyDescriptor):
        desc = desc_or_circuit
        circ = build_circuit_cached(desc.base())
        if strategy is None:
            strategy = builtin_strategy(desc)
        n_inputs = desc.input_arity
        label = desc.label()
        post = TASK_TO_POST[desc.task]
    else:
        desc = None
        circ = desc_or_circuit
        if strategy is None:
            raise QuizlabError("an explicit strategy is required for a raw circuit")
        n_inputs = circ.n_inputs
        label = f"circuit(n={circ.n_inputs},r={circ.n_params})"
        post = strategy.post_map
    if strategy.post_map != post:
        raise QuizlabError("strategy post map does not realize the requested task")
    support_ref, v_ref = _target_task_encoding(target, post, n_inputs)

    if config.mode == MODE_SYMBOLIC:
        germ = config.germ
        if len(germ.components) != circ.n_params:
            raise ArityMismatchError(
                f"germ has arity {len(germ.components)}, circuit needs {circ.n_params}"
            )
        precision = config.precision or germ.precision or DEFAULT_LAURENT_PRECISION
        ring = LaurentRing(precision)
        values = [
            circ.evaluate(
                list(germ.components),
                [ring.from_rational(Fraction(x)) for x in point],
                ring,
            )
            for point in strategy.question_points.points
        ]
        coeffs = player_interpolate(values, strategy.question_points, strategy.target_support)
        support_star, laurent_star = apply_post_map(
            post, strategy.target_support, coeffs, n_inputs, ring
        )
        v_star = tuple(laurent_limit(c) for c in laurent_star)
        check_points = _verdict_points(strategy, support_star, support_ref)
        accepted = decide_equal(
            (support_star, v_star), (support_ref, v_ref), check_points
        )
        message = _format_values(values, ring)
        mode = "approx-symbolic"
        hidden = None
    else:
        if config.explicit_sequence is not None:
            sequence = [tuple(Fraction(x) for x in u) for u in config.explicit_sequence]
        else:
            sequence = sequence_from_germ(config.germ, config.sample_schedule)
        vectors = []
        for u_k in sequence:
            values_k = [
                circ.evaluate(u_k, [Fraction(x) for x in p], RATIONALS)
                for p in strategy.question_points.points
            ]
            coeffs_k = player_interpolate(
                values_k, strategy.question_points, strategy.target_support
            )
            _, v_k = apply_post_map(post, strategy.target_support, coeffs_k, n_inputs)
            vectors.append(tuple(v_k))
        tail = vectors[len(vectors) // 2 :]
        tol = config.cluster_tolerance

        def close(a, b) -> bool:
            return all(abs(x - y) <= tol for x, y in zip(a, b))

        best_index, best_coverage = None, 0
        for i, candidate in enumerate(tail):
            coverage = sum(1 for other in tail if close(candidate, other))
            if coverage >= best_coverage:
                best_index, best_coverage = i, coverage
        if best_index is None or 2 * best_coverage < len(tail):
            raise NoStableClusterError(
                f"no cluster covers half of the schedule tail (best {best_coverage}/{len(tail)})"
            )
        v_star = tail[best_index]
        support_star = apply_post_map(
            post, strategy.target_support, [Fraction(0)] * len(strategy.target_support), n_inputs
        )[0]
        check_points = _verdict_points(strategy, support_star, support_ref)
        accepted = decide_equal(
            (support_star, v_star),
            (support_ref, v_ref),
            check_points,
            tolerance=tol if tol else None,
        )
        message = tuple(
            ";".join(rational_to_str(x) for x in vec) for vec in vectors
        )
        mode = "approx-numeric"
        hidden = None

    return GameTranscript(
        family=label,
        mode=mode,
        strategy_points=strategy.question_points.points,
        strategy_support=strategy.target_support,
        post_map=post,
        quizmaster_message=tuple(message),
        player_support=support_star,
        player_message=tuple(rational_to_str(Fraction(x)) for x in v_star),
        reference_support=support_ref,
        reference=tuple(rational_to_str(Fraction(x)) for x in v_ref),
        verdict=VERDICT_ACCEPT if accepted else VERDICT_REJECT,
        hidden=hidden,
    )


def fiber_image(
    desc: FamilyDescriptor,
    strategy: Strategy | None,
    base_point: Sequence,
    samples: int,
    seed: int,
) -> tuple[tuple[Fraction, ...], ...]:
    """Distinct player vectors over a sampled fiber of the base point.

    Every in-scope family degenerates at t = 0: the base polynomial no
    longer depends on the direction parameters, so the whole fiber
    {(0, u)} maps to one quizmaster message and hence one player vector.
    Only such t = 0 bases have a known fiber sampler.
    """
    base = tuple(Fraction(x) for x in base_point)
    if len(base) != desc.param_arity:
        raise ArityMismatchError(
            f"base point must have arity {desc.param_arity}, got {len(base)}"
        )
    if base[0] != 0:
        raise NoFiberSamplerError(
            "no fiber sampler for bases with a nonzero t coordinate"
        )
    strategy = strategy if strategy is not None else builtin_strategy(desc)
    circ = build_circuit_cached(desc.base())
    rng = random.Random(seed)
    seen: set[tuple[Fraction, ...]] = set()
    for _ in range(samples):
        fiber_point = (Fraction(0),) + tuple(
            Fraction(rng.randint(-8, 8)) for _ in range(desc.param_arity - 1)
        )
        values = [
            circ.evaluate(fiber_point, [Fraction(x) for x in p])
            for p in strategy.question_points.points
        ]
        coeffs = player_interpolate(values, strategy.question_points, strategy.target_support)
        _, v = apply_post_map(
            strategy.post_map, strategy.target_support, coeffs, desc.input_arity
        )
        seen.add(tuple(v))
    return tuple(sorted(seen))

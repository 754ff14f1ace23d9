"""Exact-rank witness matrices for the representation-size lower bounds.

Every lower-bound argument in scope reduces to the nonsingularity of one
finite matrix: a derivative-vector matrix along parameter curves, a scaled
root-of-unity Vandermonde matrix, or the hypercube coefficient matrix.
This module assembles those matrices and computes their rank exactly.

Rank over the rationals uses Bareiss fraction-free elimination after
clearing denominators row by row; rank over a prime field uses plain
Gaussian elimination.  Root-of-unity matrices are verified modulo a prime
p = 1 (mod D+1): the entries live in Z[zeta] and reduce to F_p through a
ring morphism, so a nonzero determinant mod p certifies a nonzero
determinant over the complex numbers.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .errors import CapExceededError, NonLinearCurveError, QuizlabError
from .exact import (
    PrimeFieldElement,
    modular_root_of_unity,
    smallest_prime_modulus,
)
from .families import (
    CURVE_FIXED_DIRECTION,
    CURVE_POWER_TOWER,
    EASY_POWER_SUM,
    HYPERCUBE_SHIFT,
    KRONECKER_DIAG,
    NEURAL_POWER,
    UNIVARIATE_D,
    FamilyDescriptor,
    beta_curve,
    expand_family,
)
from .poly import Monomial, Polynomial

VARIANT_BASE = "base"
VARIANT_DERIVATIVE = "derivative"
VARIANT_INTEGRAL = "integral"

DESK_CAPS = {
    EASY_POWER_SUM: ("n*l", 8),
    NEURAL_POWER: ("n", 6),
    HYPERCUBE_SHIFT: ("n", 5),
    KRONECKER_DIAG: ("k", 5),
    UNIVARIATE_D: ("d", 64),
}


@dataclass(frozen=True)
class ExactMatrix:
    """Rectangular matrix over the rationals or one prime field."""

    entries: tuple[tuple, ...]

    def __post_init__(self):
        widths = {len(row) for row in self.entries}
        if len(widths) > 1:
            raise QuizlabError("ragged matrix")

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "ExactMatrix":
        return ExactMatrix(tuple(tuple(row) for row in rows))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def rank(self) -> int:
        return exact_rank(self)

    def to_text(self) -> str:
        lines = []
        for row in self.entries:
            lines.append(",".join(str(x) for x in row))
        return "\n".join(lines) + "\n"


def _rank_prime_field(rows: list[list[PrimeFieldElement]], p: int) -> int:
    grid = [[e.residue for e in row] for row in rows]
    m, n = len(grid), len(grid[0])
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, m) if grid[r][col] % p), None)
        if pivot is None:
            continue
        grid[rank], grid[pivot] = grid[pivot], grid[rank]
        inv = pow(grid[rank][col], p - 2, p)
        for r in range(rank + 1, m):
            factor = grid[r][col] * inv % p
            if factor:
                grid[r] = [(a - factor * b) % p for a, b in zip(grid[r], grid[rank])]
        rank += 1
        if rank == min(m, n):
            break
    return rank


def _rank_bareiss(rows: list[list[Fraction]]) -> int:
    # Clear denominators per row (rank-invariant), then run fraction-free
    # elimination: every intermediate entry is a minor, so divisions are exact.
    grid: list[list[int]] = []
    for row in rows:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        grid.append([int(x * lcm) for x in row])
    m, n = len(grid), len(grid[0])
    rank = 0
    prev_pivot = 1
    for col in range(n):
        pivot = next((r for r in range(rank, m) if grid[r][col]), None)
        if pivot is None:
            continue
        grid[rank], grid[pivot] = grid[pivot], grid[rank]
        for r in range(rank + 1, m):
            for c in range(col + 1, n):
                grid[r][c] = (
                    grid[rank][col] * grid[r][c] - grid[r][col] * grid[rank][c]
                ) // prev_pivot
            grid[r][col] = 0
        prev_pivot = grid[rank][col]
        rank += 1
        if rank == min(m, n):
            break
    return rank


def exact_rank(matrix: ExactMatrix) -> int:
    """Rank over the entry field, via exact elimination."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    sample = matrix.entries[0][0]
    if isinstance(sample, PrimeFieldElement):
        return _rank_prime_field([list(r) for r in matrix.entries], sample.modulus)
    rows = [[Fraction(x) for x in row] for row in matrix.entries]
    return _rank_bareiss(rows)


def solve_exact(
    matrix_rows: Sequence[Sequence[Fraction]], rhs: Sequence, ring=None
):
    """Solve A x = b exactly, where A is rational and b lives in any module
    over the rationals (Fractions or Laurent series).

    Returns the unique solution.  Raises InconsistentSystemError when no
    solution exists and UnderdeterminedSystemError when the solution is not
    unique.  Scalar multiplications of b entries use left-multiplication by
    Fractions, which every supported coefficient type implements.
    """
    from .errors import InconsistentSystemError, UnderdeterminedSystemError

    a = [[Fraction(x) for x in row] for row in matrix_rows]
    b = list(rhs)
    if len(a) != len(b):
        raise QuizlabError("matrix and right-hand side differ in length")
    m = len(a)
    n = len(a[0]) if a else 0
    pivot_cols: list[int] = []
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, m) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        b[row], b[pivot] = b[pivot], b[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        b[row] = inv * b[row]
        for r in range(m):
            if r != row and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[row])]
                b[r] = b[r] - factor * b[row]
        pivot_cols.append(col)
        row += 1
    for r in range(row, m):
        if b[r]:
            raise InconsistentSystemError(
                "values are not explainable within the declared support"
            )
    if len(pivot_cols) < n:
        raise UnderdeterminedSystemError(
            f"system rank {len(pivot_cols)} < {n} unknowns"
        )
    return [b[pivot_cols.index(c)] for c in range(n)]


# ---------------------------------------------------------------------------
# Witness matrices
# ---------------------------------------------------------------------------

def evaluation_matrix(
    points: Sequence[Sequence[int]], support: Sequence[Monomial]
) -> ExactMatrix:
    """Rows: one per point; columns: monomial values at that point."""
    rows = []
    for point in points:
        row = []
        for mono in support:
            value = Fraction(1)
            for e, x in zip(mono, point):
                value *= Fraction(x) ** e
            row.append(value)
        rows.append(row)
    return ExactMatrix.from_rows(rows)


def derivative_matrix(
    desc: FamilyDescriptor,
    curves: Sequence[Callable[[Fraction], Sequence[Fraction]]],
) -> ExactMatrix:
    """Coefficient vectors of the t-slope of the family along each curve.

    The in-scope families are linear in t along their curves, so the t^1
    coefficient is f(1) - f(0); linearity itself is verified with a second
    difference at t = 2 and violations are reported with the offending
    degree.
    """
    support = desc.base().base_support()
    rows = []
    for curve in curves:
        f0 = expand_family(desc.base(), curve(Fraction(0)))
        f1 = expand_family(desc.base(), curve(Fraction(1)))
        f2 = expand_family(desc.base(), curve(Fraction(2)))
        if f2 - f1 - f1 + f0 != Polynomial.zero(desc.input_arity):
            raise NonLinearCurveError(
                "family expansion is not linear in t along the curve", degree=2
            )
        rows.append((f1 - f0).coeff_vector(support))
    return ExactMatrix.from_rows(rows)


def roots_of_unity_matrix(d_degree: int, variant: str) -> tuple[ExactMatrix, int]:
    """The root-of-unity slope matrix for the univariate family, mod p.

    Rows are indexed by the (D+1)-th roots of unity zeta (realized as the
    powers of an element of exact order D+1 in F_p); row entries are the
    coefficients of (D+1) * zeta^D * sum_k c_k zeta^k X^{e_k} with
    (c_k, e_k) depending on the task variant:

    * base:       c_k = 1,       e_k = k,     k = 0..D  (width D+1)
    * derivative: c_k = k,       e_k = k - 1, k = 1..D  (width D)
    * integral:   c_k = 1/(k+1), e_k = k + 1, k = 0..D  (width D+1)

    Returns the matrix over F_p together with p.
    """
    if variant not in (VARIANT_BASE, VARIANT_DERIVATIVE, VARIANT_INTEGRAL):
        raise QuizlabError(f"unknown roots-of-unity variant {variant!r}")
    d = d_degree + 1
    p = smallest_prime_modulus(d)
    zeta = modular_root_of_unity(p, d)
    lead = PrimeFieldElement(d % p, p)
    if variant == VARIANT_BASE:
        ks = list(range(0, d_degree + 1))
        scales = [PrimeFieldElement(1, p)] * len(ks)
    elif variant == VARIANT_DERIVATIVE:
        ks = list(range(1, d_degree + 1))
        scales = [PrimeFieldElement(k % p, p) for k in ks]
    else:
        ks = list(range(0, d_degree + 1))
        scales = [PrimeFieldElement(k + 1, p).inverse() for k in ks]
    rows = []
    for j in range(d):
        root = zeta ** j
        prefix = lead * root ** d_degree
        rows.append([prefix * scale * root ** k for scale, k in zip(scales, ks)])
    return ExactMatrix.from_rows(rows), p


def roots_of_unity_rank(d_degree: int, variant: str) -> int:
    """Exact rank of the root-of-unity slope matrix, certified mod p."""
    matrix, _ = roots_of_unity_matrix(d_degree, variant)
    return exact_rank(matrix)


def hypercube_lk_coefficients(n: int, cap: int = 5) -> list[Polynomial]:
    """The direction polynomials L_1..L_{2^n} of the hypercube coefficients.

    Write prod_{j < 2^n} (Y - (j + T * m_j(U))) = Y^{2^n} + B_1 Y^{2^n - 1}
    + ... + B_{2^n} with m_j(U) = prod_i U_i^[j]_i.  Working mod T^2 gives
    B_k = const + T * L_k, and the T-linear part of the product is
    -sum_j m_j(U) * prod_{i != j} (Y - i), so each quotient by (Y - j) is
    computed by synthetic division of the integer polynomial prod (Y - i).
    Returns [L_1, ..., L_{2^n}] as polynomials in U_1..U_n.
    """
    if n > cap:
        raise CapExceededError(f"hypercube coefficient cap: n={n} exceeds {cap}")
    size = 2 ** n
    # f0 = prod_{j<size} (Y - j) as integer coefficients, degree ascending.
    f0 = [Fraction(1)]
    for j in range(size):
        f0 = [Fraction(0)] + f0
        f0 = [c - j * f0_next for c, f0_next in zip(f0, f0[1:] + [Fraction(0)])]
    # t_linear[d] = coefficient Polynomial (in U) of Y^d in the T-linear part
    t_linear: list[Polynomial] = [Polynomial.zero(n) for _ in range(size)]
    for j in range(size):
        # synthetic division: f0 / (Y - j), degree size-1, ascending coeffs
        quotient = [Fraction(0)] * size
        carry = Fraction(0)
        for deg in range(size, 0, -1):
            carry = f0[deg] + j * carry
            quotient[deg - 1] = carry
        mono = tuple((j >> i) & 1 for i in range(n))
        m_j = Polynomial.make(n, {mono: Fraction(1)})
        for deg in range(size):
            if quotient[deg]:
                t_linear[deg] = t_linear[deg] - m_j.scale(quotient[deg])
    # B_k multiplies Y^{size-k}; its T-linear part is t_linear[size - k]
    return [t_linear[size - k] for k in range(1, size + 1)]


def hypercube_lk_matrix(
    n: int, points: Sequence[Sequence[int]], cap: int = 5
) -> ExactMatrix:
    """The matrix (L_k(u_l))_{k,l} at the given 2^n integer points."""
    size = 2 ** n
    if len(points) != size:
        raise QuizlabError(f"need exactly {size} points, got {len(points)}")
    lks = hypercube_lk_coefficients(n, cap=cap)
    rows = []
    for lk in lks:
        rows.append([lk.evaluate([Fraction(x) for x in u]) for u in points])
    return ExactMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessReport:
    family: str
    expected_rank: int
    trials: int
    success_count: int
    achieved_ranks: tuple[int, ...]
    seeds: tuple[int, ...]
    elapsed_seconds: float

    @property
    def success_rate(self) -> float:
        return self.success_count / self.trials if self.trials else 0.0

    def to_csv(self) -> str:
        lines = ["seed,achieved_rank,expected_rank,success"]
        for seed, rank in zip(self.seeds, self.achieved_ranks):
            lines.append(f"{seed},{rank},{self.expected_rank},{int(rank == self.expected_rank)}")
        return "\n".join(lines) + "\n"

    def to_text(self, include_timing: bool = False) -> str:
        lines = [
            f"family: {self.family}",
            f"expected_rank: {self.expected_rank}",
            f"trials: {self.trials}",
            f"success_count: {self.success_count}",
            f"achieved_ranks: {','.join(str(r) for r in self.achieved_ranks)}",
            f"seeds: {','.join(str(s) for s in self.seeds)}",
        ]
        if include_timing:
            lines.append(f"elapsed_seconds: {self.elapsed_seconds:.3f}")
        return "\n".join(lines) + "\n"


def expected_rank(desc: FamilyDescriptor) -> int:
    """The lower-bound constant K for each family."""
    if desc.variant == EASY_POWER_SUM:
        return comb(2 ** desc.l - 1 + desc.n, desc.n)
    if desc.variant == NEURAL_POWER:
        return comb(2 * desc.n - 1, desc.n - 1)
    if desc.variant in (HYPERCUBE_SHIFT, KRONECKER_DIAG):
        return 2 ** desc.input_arity
    return desc.d + 1


def check_desk_cap(desc: FamilyDescriptor) -> None:
    if desc.variant == EASY_POWER_SUM:
        if desc.n * desc.l > 8:
            raise CapExceededError(f"desk cap n*l <= 8 exceeded: n*l = {desc.n * desc.l}")
        return
    name, cap = DESK_CAPS[desc.variant]
    value = {"n": desc.n, "k": desc.k, "d": desc.d}[name]
    if value > cap:
        raise CapExceededError(f"desk cap {name} <= {cap} exceeded: {name} = {value}")


def _sample_distinct(rng: random.Random, count: int, box: int) -> list[int]:
    return rng.sample(range(1, box + 1), count)


def _ray_of(direction: tuple[int, ...]) -> tuple[int, ...]:
    g = 0
    for x in direction:
        g = math.gcd(g, x)
    return tuple(x // g for x in direction)


def _sample_directions(
    rng: random.Random, count: int, box: int, arity: int
) -> list[tuple[int, ...]]:
    """Directions with pairwise distinct rays.

    Two proportional directions give proportional rows of the degree-n
    coefficient matrix, so they can never be part of a rank witness; the
    sampler rejects them the way the power-sum sampler rejects repeated
    base points.
    """
    rays: dict[tuple[int, ...], tuple[int, ...]] = {}
    while len(rays) < count:
        direction = tuple(rng.randint(1, box) for _ in range(arity))
        rays.setdefault(_ray_of(direction), direction)
    return sorted(rays.values())


def lower_bound_report(
    desc: FamilyDescriptor, trials: int, seed: int
) -> WitnessReport:
    """Randomized rank experiment for one family's lower-bound matrix.

    Curve and point collections live in a nonempty Zariski-open set, so a
    random draw from the integer box [1, 4K] achieves rank K generically.
    The univariate family is deterministic (modular root-of-unity matrix).
    """
    check_desk_cap(desc)
    k_expected = expected_rank(desc)
    started = time.monotonic()
    ranks: list[int] = []
    seeds: list[int] = []
    for trial in range(trials):
        trial_seed = seed * 1_000_003 + trial
        seeds.append(trial_seed)
        rng = random.Random(trial_seed)
        box = 4 * k_expected
        if desc.variant == EASY_POWER_SUM:
            rhos = _sample_distinct(rng, k_expected, box)
            curves = [beta_curve(desc.base(), CURVE_POWER_TOWER, rho) for rho in rhos]
            matrix = derivative_matrix(desc.base(), curves)
        elif desc.variant == NEURAL_POWER:
            directions = _sample_directions(rng, k_expected, box, desc.n)
            curves = [
                beta_curve(desc.base(), CURVE_FIXED_DIRECTION, direction)
                for direction in directions
            ]
            matrix = derivative_matrix(desc.base(), curves)
        elif desc.variant in (HYPERCUBE_SHIFT, KRONECKER_DIAG):
            n = desc.input_arity
            points: set[tuple[int, ...]] = set()
            while len(points) < 2 ** n:
                points.add(tuple(rng.randint(1, box) for _ in range(n)))
            matrix = hypercube_lk_matrix(n, sorted(points))
        else:  # univariate-d, deterministic modular witness
            ranks.append(roots_of_unity_rank(desc.d, VARIANT_BASE))
            continue
        ranks.append(exact_rank(matrix))
    success = sum(1 for r in ranks if r == k_expected)
    return WitnessReport(
        family=desc.label(),
        expected_rank=k_expected,
        trials=trials,
        success_count=success,
        achieved_ranks=tuple(ranks),
        seeds=tuple(seeds),
        elapsed_seconds=time.monotonic() - started,
    )

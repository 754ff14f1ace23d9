"""Kronecker sum/product algebra and exact characteristic polynomials.

Matrices are dense rational grids even though the composed diagonal
matrices are diagonal: diagonality is something this module verifies, not
assumes.  Characteristic polynomials use the Faddeev-LeVerrier recurrence,
which stays inside exact rational arithmetic with only integer divisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CapExceededError, QuizlabError
from .families import binary_digit, theta_diagonal_values
from .poly import Polynomial

THETA_CAP = 8


@dataclass(frozen=True)
class SquareMatrix:
    """Immutable square matrix over the rationals."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        for row in self.entries:
            if len(row) != n:
                raise QuizlabError("matrix is not square")

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "SquareMatrix":
        return SquareMatrix(tuple(tuple(Fraction(x) for x in row) for row in rows))

    @staticmethod
    def identity(n: int) -> "SquareMatrix":
        return SquareMatrix.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def diagonal(values: Sequence) -> "SquareMatrix":
        vals = [Fraction(v) for v in values]
        n = len(vals)
        return SquareMatrix.from_rows(
            [[vals[i] if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def is_diagonal(self) -> bool:
        return all(
            self.entries[i][j] == 0
            for i in range(self.dimension)
            for j in range(self.dimension)
            if i != j
        )

    def diagonal_values(self) -> tuple[Fraction, ...]:
        return tuple(self.entries[i][i] for i in range(self.dimension))

    def __add__(self, other: "SquareMatrix") -> "SquareMatrix":
        if self.dimension != other.dimension:
            raise QuizlabError("dimension mismatch in matrix addition")
        return SquareMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def scale(self, scalar) -> "SquareMatrix":
        s = Fraction(scalar)
        return SquareMatrix(
            tuple(tuple(s * x for x in row) for row in self.entries)
        )

    def __matmul__(self, other: "SquareMatrix") -> "SquareMatrix":
        if self.dimension != other.dimension:
            raise QuizlabError("dimension mismatch in matrix product")
        n = self.dimension
        rows = []
        for row in self.entries:
            acc = [Fraction(0)] * n
            for a, other_row in zip(row, other.entries):
                if a:  # skipping zeros keeps sparse instances near-linear
                    acc = [x + a * y for x, y in zip(acc, other_row)]
            rows.append(tuple(acc))
        return SquareMatrix(tuple(rows))

    def trace(self) -> Fraction:
        return sum(self.entries[i][i] for i in range(self.dimension))

    def to_text(self) -> str:
        return "\n".join(
            ",".join(f"{x.numerator}/{x.denominator}" for x in row)
            for row in self.entries
        ) + "\n"


def kron_product(a: SquareMatrix, b: SquareMatrix) -> SquareMatrix:
    """Block matrix (a_ij * B), an (nm x nm) square matrix."""
    n, m = a.dimension, b.dimension
    rows = []
    for i in range(n):
        for k in range(m):
            row = []
            for j in range(n):
                for ell in range(m):
                    row.append(a.entries[i][j] * b.entries[k][ell])
            rows.append(tuple(row))
    return SquareMatrix(tuple(rows))


def kron_sum(a: SquareMatrix, b: SquareMatrix) -> SquareMatrix:
    """A (+) B = A (x) Id_m + Id_n (x) B."""
    return kron_product(a, SquareMatrix.identity(b.dimension)) + kron_product(
        SquareMatrix.identity(a.dimension), b
    )


def char_poly(a: SquareMatrix) -> Polynomial:
    """Monic characteristic polynomial det(Y * Id - A), exactly.

    Faddeev-LeVerrier recurrence: M_1 = Id, c_1 = -tr(A); then
    M_{k+1} = A M_k + c_k Id and c_{k+1} = -tr(A M_{k+1}) / (k + 1).
    All divisions are exact over the rationals.
    """
    n = a.dimension
    y = Polynomial.variable(1, 0)
    result = y ** n
    m = SquareMatrix.identity(n)
    c = Fraction(0)
    for k in range(1, n + 1):
        am = a @ m
        c = -am.trace() / k
        result = result + (y ** (n - k)).scale(c)
        m = am + SquareMatrix.identity(n).scale(c)
    return result


def build_theta_matrix(
    k: int, s, u: Sequence, cap: int = THETA_CAP
) -> tuple[SquareMatrix, int]:
    """The 2^k-dimensional composed diagonal matrix and its operation count.

    Built with exactly k-1 Kronecker sums, k-1 Kronecker products, one
    scalar multiple and one matrix addition (2k operations):
    (sum_i diag(0, 2^(k-i))) + s * diag(1, u_k) (x) ... (x) diag(1, u_1).
    """
    if k > cap:
        raise CapExceededError(f"theta-matrix cap: k={k} exceeds {cap}")
    s = Fraction(s)
    coords = [Fraction(x) for x in u]
    if len(coords) != k:
        raise QuizlabError(f"expected {k} direction parameters, got {len(coords)}")
    ops = 0
    shift = SquareMatrix.diagonal([0, 2 ** (k - 1)])
    for i in range(2, k + 1):
        shift = kron_sum(shift, SquareMatrix.diagonal([0, 2 ** (k - i)]))
        ops += 1
    product = SquareMatrix.diagonal([1, coords[k - 1]])
    for i in range(k - 1, 0, -1):
        product = kron_product(product, SquareMatrix.diagonal([1, coords[i - 1]]))
        ops += 1
    scaled = product.scale(s)
    ops += 1
    theta = shift + scaled
    ops += 1
    return theta, ops


def verify_lemma_identities(
    k: int, s, u: Sequence, cap: int = 5
) -> tuple[bool, bool, bool]:
    """Exact checks of the three composed-diagonal identities.

    (1) the Kronecker-sum fold of the diag(0, 2^(k-i)) blocks equals
        diag(0, 1, ..., 2^k - 1);
    (2) the Kronecker-product fold of the diag(1, u_i) blocks equals
        Diag(prod_i u_i^[j]_i : 0 <= j < 2^k);
    (3) char_poly of the composed matrix equals the product
        prod_j (Y - (j + s * prod_i u_i^[j]_i)).
    """
    if k > cap:
        raise CapExceededError(f"lemma-identity cap: k={k} exceeds {cap}")
    s = Fraction(s)
    coords = [Fraction(x) for x in u]
    if len(coords) != k:
        raise QuizlabError(f"expected {k} direction parameters, got {len(coords)}")

    shift = SquareMatrix.diagonal([0, 2 ** (k - 1)])
    for i in range(2, k + 1):
        shift = kron_sum(shift, SquareMatrix.diagonal([0, 2 ** (k - i)]))
    first = shift == SquareMatrix.diagonal(list(range(2 ** k)))

    product = SquareMatrix.diagonal([1, coords[k - 1]])
    for i in range(k - 1, 0, -1):
        product = kron_product(product, SquareMatrix.diagonal([1, coords[i - 1]]))
    expected_diag = []
    for j in range(2 ** k):
        value = Fraction(1)
        for i in range(1, k + 1):
            if binary_digit(j, i):
                value *= coords[i - 1]
        expected_diag.append(value)
    second = product == SquareMatrix.diagonal(expected_diag)

    theta, _ = build_theta_matrix(k, s, coords)
    roots = theta_diagonal_values(k, s, coords)
    y = Polynomial.variable(1, 0)
    expected_charpoly = Polynomial.constant(1, 1)
    for root in roots:
        expected_charpoly = expected_charpoly * (y - Polynomial.constant(1, root))
    third = char_poly(theta) == expected_charpoly

    return (first, second, third)

"""Exact scalar backends: rationals, prime fields, truncated Laurent series.

Rationals are ``fractions.Fraction`` (always reduced, denominator > 0);
this module only adds the ``num/den`` string codec.  Prime fields carry the
modulus on every element so mixed-modulus arithmetic fails loudly.  Laurent
series in one indeterminate ``e`` (for epsilon) are finite coefficient
windows with an explicit knowledge bound: a series is either exact (a
Laurent polynomial) or known only below some order, and every operation
propagates that bound.

A shared ring-adapter protocol (``RationalRing``, ``PrimeFieldRing``,
``LaurentRing``) lets circuit evaluation and polynomial arithmetic run over
any of the three backends with one code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    NoSuchRootError,
    NotHolomorphicAtOriginError,
    PrecisionUnderflowError,
    QuizlabError,
)

DEFAULT_LAURENT_PRECISION = 8


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------

def rational_to_str(q: Fraction) -> str:
    """Serialize a rational as ``num/den`` (den always present and positive)."""
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(text: str) -> Fraction:
    """Parse ``num/den`` or a bare integer string."""
    return Fraction(text.strip())


# ---------------------------------------------------------------------------
# Prime fields
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    """Trial-division primality test; moduli in scope are tiny."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def smallest_prime_modulus(d: int) -> int:
    """Smallest prime p = 1 (mod d) with p > 2d.

    This is the deterministic modulus-selection rule used for every modular
    root-of-unity witness, so reports are reproducible.
    """
    if d < 1:
        raise ValueError(f"order must be positive, got {d}")
    p = 2 * d + 1
    while not ((p - 1) % d == 0 and is_prime(p)):
        p += 1
    return p


@dataclass(frozen=True)
class PrimeFieldElement:
    """Residue in [0, p) for a prime modulus p."""

    residue: int
    modulus: int

    def __post_init__(self):
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    def _check(self, other: "PrimeFieldElement") -> None:
        if self.modulus != other.modulus:
            raise QuizlabError(
                f"mixed moduli {self.modulus} and {other.modulus}"
            )

    def __add__(self, other: "PrimeFieldElement") -> "PrimeFieldElement":
        self._check(other)
        return PrimeFieldElement((self.residue + other.residue) % self.modulus, self.modulus)

    def __sub__(self, other: "PrimeFieldElement") -> "PrimeFieldElement":
        self._check(other)
        return PrimeFieldElement((self.residue - other.residue) % self.modulus, self.modulus)

    def __mul__(self, other: "PrimeFieldElement") -> "PrimeFieldElement":
        self._check(other)
        return PrimeFieldElement((self.residue * other.residue) % self.modulus, self.modulus)

    def __neg__(self) -> "PrimeFieldElement":
        return PrimeFieldElement(-self.residue % self.modulus, self.modulus)

    def __pow__(self, k: int) -> "PrimeFieldElement":
        return PrimeFieldElement(pow(self.residue, k, self.modulus), self.modulus)

    def inverse(self) -> "PrimeFieldElement":
        if self.residue == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.modulus}")
        return PrimeFieldElement(pow(self.residue, self.modulus - 2, self.modulus), self.modulus)

    def __bool__(self) -> bool:
        return self.residue != 0

    def __str__(self) -> str:
        return f"{self.residue} (mod {self.modulus})"


def prime_field_from_rational(q: Fraction, p: int) -> PrimeFieldElement:
    """Reduce num/den mod p; fails if p divides the denominator."""
    if q.denominator % p == 0:
        raise ZeroDivisionError(f"denominator of {q} not invertible mod {p}")
    num = q.numerator % p
    den_inv = pow(q.denominator % p, p - 2, p)
    return PrimeFieldElement(num * den_inv % p, p)


def multiplicative_order(a: PrimeFieldElement) -> int:
    """Order of a in the multiplicative group mod p (a must be nonzero)."""
    if a.residue == 0:
        raise ValueError("0 has no multiplicative order")
    k, acc = 1, a.residue
    while acc != 1:
        acc = acc * a.residue % a.modulus
        k += 1
    return k


def modular_root_of_unity(p: int, d: int) -> PrimeFieldElement:
    """Element of multiplicative order exactly d in the field with p elements.

    Deterministic: tries bases a = 2, 3, ... and returns the first
    a^((p-1)/d) whose order is exactly d.  Requires d | p - 1.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if (p - 1) % d != 0:
        raise NoSuchRootError(f"no element of order {d} mod {p}: {d} does not divide {p - 1}")
    if d == 1:
        return PrimeFieldElement(1, p)
    exponent = (p - 1) // d
    for a in range(2, p):
        candidate = PrimeFieldElement(pow(a, exponent, p), p)
        if candidate.residue != 1 and multiplicative_order(candidate) == d:
            return candidate
    raise NoSuchRootError(f"no element of order {d} mod {p}")  # unreachable for prime p


# ---------------------------------------------------------------------------
# Truncated Laurent series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentSeries:
    """Laurent series in one indeterminate e, truncated at ``bound``.

    ``coeffs[i]`` is the coefficient of e^(low + i); the first and last
    stored coefficients are nonzero.  ``bound`` is the absolute exponent at
    which knowledge stops: coefficients at exponents >= bound are unknown.
    ``bound is None`` means the value is an exact Laurent polynomial.  The
    identically-zero exact series is ``coeffs == ()`` with ``bound None``;
    an all-cancelled truncated result keeps its bound (zero below e^bound).
    """

    low: int = 0
    coeffs: tuple[Fraction, ...] = ()
    bound: int | None = None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero() -> "LaurentSeries":
        return LaurentSeries(0, (), None)

    @staticmethod
    def from_rational(q: Fraction | int) -> "LaurentSeries":
        q = Fraction(q)
        if q == 0:
            return LaurentSeries.zero()
        return LaurentSeries(0, (q,), None)

    @staticmethod
    def monomial(coeff: Fraction | int, exponent: int) -> "LaurentSeries":
        coeff = Fraction(coeff)
        if coeff == 0:
            return LaurentSeries.zero()
        return LaurentSeries(exponent, (coeff,), None)

    @staticmethod
    def epsilon(exponent: int = 1) -> "LaurentSeries":
        return LaurentSeries.monomial(1, exponent)

    @staticmethod
    def from_pairs(pairs) -> "LaurentSeries":
        """Build from (exponent, rational) pairs, the serialization format."""
        terms: dict[int, Fraction] = {}
        for exp, q in pairs:
            q = Fraction(q)
            if q != 0:
                terms[int(exp)] = terms.get(int(exp), Fraction(0)) + q
        return _normalize(terms, None)

    # -- inspection -----------------------------------------------------------

    def is_exact(self) -> bool:
        return self.bound is None

    def is_zero(self) -> bool:
        """True only for the identically-zero exact series."""
        return not self.coeffs and self.bound is None

    def significant_terms(self) -> int:
        return sum(1 for c in self.coeffs if c != 0)

    def coefficient(self, exponent: int) -> Fraction:
        """Coefficient of e^exponent; raises if it lies beyond the bound."""
        if self.bound is not None and exponent >= self.bound:
            raise PrecisionUnderflowError(
                f"coefficient of e^{exponent} unknown: series truncated at O(e^{self.bound})"
            )
        i = exponent - self.low
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def to_pairs(self) -> list[tuple[int, Fraction]]:
        return [(self.low + i, c) for i, c in enumerate(self.coeffs) if c != 0]

    def __bool__(self) -> bool:
        # A truncated all-zero window is only "zero so far", so it stays truthy.
        return bool(self.coeffs) or self.bound is not None

    def __str__(self) -> str:
        parts = []
        for exp, c in self.to_pairs():
            if exp == 0:
                parts.append(f"{c}")
            elif exp == 1:
                parts.append(f"{c}*e")
            else:
                parts.append(f"{c}*e^{exp}")
        if not parts:
            parts.append("0")
        body = " + ".join(parts)
        if self.bound is not None:
            body += f" + O(e^{self.bound})"
        return body

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        other = _coerce(other)
        bound = _min_bound(self.bound, other.bound)
        terms: dict[int, Fraction] = {}
        for series in (self, other):
            for i, c in enumerate(series.coeffs):
                exp = series.low + i
                if bound is not None and exp >= bound:
                    continue
                terms[exp] = terms.get(exp, Fraction(0)) + c
        return _normalize(terms, bound)

    def __radd__(self, other) -> "LaurentSeries":
        return self.__add__(other)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        other = _coerce(other)
        return self + (-other)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.low, tuple(-c for c in self.coeffs), self.bound)

    def __mul__(self, other) -> "LaurentSeries":
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero()
        bound = None
        if self.bound is not None:
            bound = self.bound + _effective_low(other)
        if other.bound is not None:
            b2 = other.bound + _effective_low(self)
            bound = b2 if bound is None else min(bound, b2)
        terms: dict[int, Fraction] = {}
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                exp = self.low + i + other.low + j
                if bound is not None and exp >= bound:
                    continue
                terms[exp] = terms.get(exp, Fraction(0)) + a * b
        return _normalize(terms, bound)

    def __rmul__(self, other) -> "LaurentSeries":
        return self.__mul__(other)

    def truncate(self, precision: int) -> "LaurentSeries":
        """Keep at most ``precision`` leading terms, marking the rest unknown."""
        if precision < 1:
            raise ValueError("precision must be positive")
        if not self.coeffs:
            return self
        span = len(self.coeffs)
        if span <= precision:
            return self
        cap = self.low + precision
        bound = cap if self.bound is None else min(self.bound, cap)
        terms = {self.low + i: c for i, c in enumerate(self.coeffs) if self.low + i < bound}
        return _normalize(terms, bound)

    def substitute(self, value: Fraction) -> Fraction:
        """Evaluate an exact Laurent polynomial at a nonzero rational point."""
        if not self.is_exact():
            raise PrecisionUnderflowError("cannot substitute into a truncated series")
        value = Fraction(value)
        if value == 0:
            if self.low < 0 and self.coeffs:
                raise ZeroDivisionError("substitution at the pole e = 0")
            return self.coefficient(0) if self.coeffs else Fraction(0)
        total = Fraction(0)
        for i, c in enumerate(self.coeffs):
            total += c * value ** (self.low + i)
        return total


def _coerce(x) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentSeries.from_rational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to LaurentSeries")


def _min_bound(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _effective_low(s: LaurentSeries) -> int:
    # For an all-cancelled window the lowest possibly-nonzero order is the bound.
    if s.coeffs:
        return s.low
    return s.bound if s.bound is not None else 0


def _normalize(terms: dict[int, Fraction], bound: int | None) -> LaurentSeries:
    exps = sorted(e for e, c in terms.items() if c != 0)
    if not exps:
        return LaurentSeries(bound if bound is not None else 0, (), bound)
    low, high = exps[0], exps[-1]
    coeffs = tuple(terms.get(e, Fraction(0)) for e in range(low, high + 1))
    return LaurentSeries(low, coeffs, bound)


def laurent_arith(
    a: LaurentSeries,
    b: LaurentSeries,
    op: str,
    precision: int | None = None,
) -> LaurentSeries:
    """Public add/sub/mul with the default truncation policy applied.

    Results keep full exactness while they fit in ``precision`` significant
    terms; longer results are truncated and their bound recorded.  A result
    with no significant term that is not provably zero raises
    PrecisionUnderflowError.
    """
    precision = DEFAULT_LAURENT_PRECISION if precision is None else precision
    if op == "add":
        out = a + b
    elif op == "sub":
        out = a - b
    elif op == "mul":
        out = a * b
    else:
        raise ValueError(f"unknown op {op!r}")
    out = out.truncate(precision)
    if not out.coeffs and out.bound is not None:
        raise PrecisionUnderflowError(
            f"result has no significant term below O(e^{out.bound}); retry with higher precision"
        )
    return out


def laurent_limit(a: LaurentSeries) -> Fraction:
    """Value at e = 0 of a series holomorphic at the origin.

    Returns the coefficient of e^0.  Raises NotHolomorphicAtOriginError if a
    negative-exponent coefficient is nonzero, and PrecisionUnderflowError if
    truncation hides the constant coefficient.
    """
    for exp, c in a.to_pairs():
        if exp < 0 and c != 0:
            raise NotHolomorphicAtOriginError(
                f"pole at origin: nonzero coefficient {c} at e^{exp}"
            )
    if a.bound is not None and a.bound <= 0:
        raise PrecisionUnderflowError(
            f"constant coefficient unknown: series truncated at O(e^{a.bound})"
        )
    return a.coefficient(0) if (a.coeffs or a.bound is not None) else Fraction(0)


# ---------------------------------------------------------------------------
# Ring adapters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalRing:
    """Adapter for exact rational arithmetic."""

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def from_rational(self, q: Fraction) -> Fraction:
        return Fraction(q)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a) -> bool:
        return a == 0

    def to_str(self, a) -> str:
        return rational_to_str(a)


@dataclass(frozen=True)
class PrimeFieldRing:
    """Adapter for the field with ``modulus`` elements."""

    modulus: int

    @property
    def zero(self) -> PrimeFieldElement:
        return PrimeFieldElement(0, self.modulus)

    @property
    def one(self) -> PrimeFieldElement:
        return PrimeFieldElement(1, self.modulus)

    def from_rational(self, q: Fraction) -> PrimeFieldElement:
        return prime_field_from_rational(Fraction(q), self.modulus)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a) -> bool:
        return a.residue == 0

    def to_str(self, a) -> str:
        return str(a.residue)


@dataclass(frozen=True)
class LaurentRing:
    """Adapter for truncated Laurent arithmetic at a fixed precision."""

    precision: int = DEFAULT_LAURENT_PRECISION

    @property
    def zero(self) -> LaurentSeries:
        return LaurentSeries.zero()

    @property
    def one(self) -> LaurentSeries:
        return LaurentSeries.from_rational(1)

    def from_rational(self, q: Fraction) -> LaurentSeries:
        return LaurentSeries.from_rational(Fraction(q))

    def add(self, a, b):
        return (a + b).truncate(self.precision)

    def sub(self, a, b):
        return (a - b).truncate(self.precision)

    def mul(self, a, b):
        return (a * b).truncate(self.precision)

    def neg(self, a):
        return -a

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def to_str(self, a) -> str:
        return str(a)


RATIONALS = RationalRing()

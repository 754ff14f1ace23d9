"""Robust arithmetic circuits: labeled DAGs with parameter and input leaves.

A circuit is a topologically ordered node list with one output.  Leaves are
inputs X_i, raw parameter coordinates, rational constants, or parameter
leaves given by a polynomial in the parameter coordinates (the division-free
case of a robust parameter function; the concrete families need ``u_i - 1``
style leaves to meet their documented gate budgets).  Internal nodes are
binary add/sub/mul gates.  Gate counts and leaf counts are reported
separately; family size bounds are checked against gates only.

Evaluation is ring-generic.  Expansion (symbolic or at fixed parameters) is
evaluation over a polynomial ring with a term-count cap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ArityMismatchError,
    ExpansionCapExceededError,
    QuizlabError,
)
from .exact import RATIONALS, rational_from_str, rational_to_str
from .poly import Polynomial, PolynomialRing, evaluate_rational_poly

DEFAULT_EXPANSION_CAP = 200_000

INPUT = "input"
PARAM = "param"
CONST = "const"
POLY_PARAM = "poly_param"
ADD = "add"
SUB = "sub"
MUL = "mul"

_LEAF_KINDS = (INPUT, PARAM, CONST, POLY_PARAM)
_GATE_KINDS = (ADD, SUB, MUL)


@dataclass(frozen=True)
class Node:
    """One circuit node.

    ``a``/``b`` are child indices for gates; ``a`` is the input or parameter
    index for input/param leaves.  ``value`` carries the constant of a const
    leaf; ``payload`` carries the parameter polynomial of a poly_param leaf
    (a Polynomial in the circuit's r parameter coordinates).
    """

    kind: str
    a: int = -1
    b: int = -1
    value: Fraction | None = None
    payload: Polynomial | None = None


@dataclass(frozen=True)
class CircuitSize:
    gates: int
    leaves: int
    essential_muls: int


@dataclass(frozen=True)
class Circuit:
    """Immutable circuit; node children always point to earlier indices."""

    nodes: tuple[Node, ...]
    output: int
    n_inputs: int
    n_params: int

    def __post_init__(self):
        for i, node in enumerate(self.nodes):
            if node.kind in _GATE_KINDS:
                if not (0 <= node.a < i and 0 <= node.b < i):
                    raise QuizlabError(f"node {i} has forward or invalid children")
            elif node.kind == INPUT:
                if not 0 <= node.a < self.n_inputs:
                    raise QuizlabError(f"node {i} reads input {node.a}, arity {self.n_inputs}")
            elif node.kind == PARAM:
                if not 0 <= node.a < self.n_params:
                    raise QuizlabError(f"node {i} reads param {node.a}, arity {self.n_params}")
            elif node.kind == POLY_PARAM:
                if node.payload is None or node.payload.nvars != self.n_params:
                    raise QuizlabError(f"node {i} parameter polynomial has wrong arity")
            elif node.kind == CONST:
                if node.value is None:
                    raise QuizlabError(f"node {i} constant missing value")
            else:
                raise QuizlabError(f"node {i} has unknown kind {node.kind!r}")
        if not 0 <= self.output < len(self.nodes):
            raise QuizlabError("output index out of range")

    # -- evaluation -------------------------------------------------------------

    def evaluate(self, params, inputs, ring=RATIONALS):
        """Value of the final result at (params, inputs), over any ring."""
        if len(params) != self.n_params:
            raise ArityMismatchError(
                f"expected {self.n_params} parameters, got {len(params)}"
            )
        if len(inputs) != self.n_inputs:
            raise ArityMismatchError(f"expected {self.n_inputs} inputs, got {len(inputs)}")
        values: list = []
        for i, node in enumerate(self.nodes):
            try:
                if node.kind == INPUT:
                    v = inputs[node.a]
                elif node.kind == PARAM:
                    v = params[node.a]
                elif node.kind == CONST:
                    v = ring.from_rational(node.value)
                elif node.kind == POLY_PARAM:
                    v = evaluate_rational_poly(node.payload, params, ring)
                elif node.kind == ADD:
                    v = ring.add(values[node.a], values[node.b])
                elif node.kind == SUB:
                    v = ring.sub(values[node.a], values[node.b])
                else:
                    v = ring.mul(values[node.a], values[node.b])
            except ExpansionCapExceededError as exc:
                raise ExpansionCapExceededError(f"{exc} (at node {i})", node=i) from exc
            values.append(v)
        return values[self.output]

    def expand(self, params, cap: int | None = DEFAULT_EXPANSION_CAP) -> Polynomial:
        """Exact polynomial in the inputs at fixed rational parameters."""
        params = [Fraction(p) for p in params]
        ring = PolynomialRing(self.n_inputs, RATIONALS, cap)
        point = [ring.variable(i) for i in range(self.n_inputs)]
        lifted = [ring.from_rational(p) for p in params]
        return self.evaluate(lifted, point, ring)

    def expand_symbolic(self, cap: int | None = DEFAULT_EXPANSION_CAP) -> Polynomial:
        """Full symbolic final result in r + n variables (params then inputs)."""
        r, n = self.n_params, self.n_inputs
        ring = PolynomialRing(r + n, RATIONALS, cap)
        params = [ring.variable(j) for j in range(r)]
        inputs = [ring.variable(r + i) for i in range(n)]
        return self.evaluate(params, inputs, ring)

    # -- size accounting ----------------------------------------------------------

    def input_dependence(self) -> tuple[bool, ...]:
        """Per node: does its value depend (transitively) on an input."""
        dep: list[bool] = []
        for node in self.nodes:
            if node.kind == INPUT:
                dep.append(True)
            elif node.kind in _GATE_KINDS:
                dep.append(dep[node.a] or dep[node.b])
            else:
                dep.append(False)
        return tuple(dep)

    def essential_mul_flags(self) -> tuple[bool, ...]:
        """Mul gates whose operands both involve inputs; scalar muls are free."""
        dep = self.input_dependence()
        return tuple(
            node.kind == MUL and dep[node.a] and dep[node.b] for node in self.nodes
        )

    def size(self) -> CircuitSize:
        gates = sum(1 for n in self.nodes if n.kind in _GATE_KINDS)
        leaves = sum(1 for n in self.nodes if n.kind in _LEAF_KINDS)
        essential = sum(self.essential_mul_flags())
        return CircuitSize(gates=gates, leaves=leaves, essential_muls=essential)

    # -- serialization -------------------------------------------------------------

    def to_text(self) -> str:
        """Canonical JSON document; round-trips bit-exactly."""
        nodes = []
        for i, node in enumerate(self.nodes):
            rec: dict = {"id": i, "kind": node.kind}
            if node.kind in (INPUT, PARAM):
                rec["args"] = [node.a]
            elif node.kind == CONST:
                rec["args"] = [rational_to_str(node.value)]
            elif node.kind == POLY_PARAM:
                rec["args"] = [[list(m), c] for m, c in node.payload.to_pairs()]
            else:
                rec["args"] = [node.a, node.b]
            nodes.append(rec)
        doc = {"n": self.n_inputs, "r": self.n_params, "nodes": nodes, "output": self.output}
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"

    @staticmethod
    def from_text(text: str) -> "Circuit":
        doc = json.loads(text)
        n, r = doc["n"], doc["r"]
        nodes: list[Node] = []
        for rec in doc["nodes"]:
            kind, args = rec["kind"], rec["args"]
            if kind in (INPUT, PARAM):
                nodes.append(Node(kind, a=args[0]))
            elif kind == CONST:
                nodes.append(Node(kind, value=rational_from_str(args[0])))
            elif kind == POLY_PARAM:
                terms = {tuple(m): rational_from_str(c) for m, c in args}
                nodes.append(Node(kind, payload=Polynomial.make(r, terms)))
            else:
                nodes.append(Node(kind, a=args[0], b=args[1]))
        return Circuit(tuple(nodes), doc["output"], n, r)


class CircuitBuilder:
    """Incremental builder with construction-time sharing of identical nodes."""

    def __init__(self, n_inputs: int, n_params: int):
        self.n_inputs = n_inputs
        self.n_params = n_params
        self._nodes: list[Node] = []
        self._cache: dict = {}

    def _intern(self, key, node: Node) -> int:
        if key in self._cache:
            return self._cache[key]
        self._nodes.append(node)
        idx = len(self._nodes) - 1
        self._cache[key] = idx
        return idx

    def input(self, i: int) -> int:
        return self._intern((INPUT, i), Node(INPUT, a=i))

    def param(self, j: int) -> int:
        return self._intern((PARAM, j), Node(PARAM, a=j))

    def const(self, q) -> int:
        q = Fraction(q)
        return self._intern((CONST, q), Node(CONST, value=q))

    def poly_param(self, payload: Polynomial) -> int:
        key = (POLY_PARAM, frozenset(payload.terms.items()))
        return self._intern(key, Node(POLY_PARAM, payload=payload))

    def add(self, a: int, b: int) -> int:
        return self._intern((ADD, a, b), Node(ADD, a=a, b=b))

    def sub(self, a: int, b: int) -> int:
        return self._intern((SUB, a, b), Node(SUB, a=a, b=b))

    def mul(self, a: int, b: int) -> int:
        return self._intern((MUL, a, b), Node(MUL, a=a, b=b))

    def sum_of(self, indices: list[int]) -> int:
        if not indices:
            return self.const(0)
        acc = indices[0]
        for idx in indices[1:]:
            acc = self.add(acc, idx)
        return acc

    def product_of(self, indices: list[int]) -> int:
        if not indices:
            return self.const(1)
        acc = indices[0]
        for idx in indices[1:]:
            acc = self.mul(acc, idx)
        return acc

    def power(self, base: int, k: int) -> int:
        """base^k by binary powering (k >= 1)."""
        if k < 1:
            raise ValueError("power requires k >= 1")
        if k == 1:
            return base
        half = self.power(base, k // 2)
        sq = self.mul(half, half)
        return self.mul(sq, base) if k % 2 else sq

    def finish(self, output: int) -> Circuit:
        return Circuit(tuple(self._nodes), output, self.n_inputs, self.n_params)


def generic_computation(L: int, n: int) -> Circuit:
    """Generic computation of all n-variate polynomials needing <= L essential muls.

    Parameter layout (row-major blocks, padded to (L+n+1)^2 total):
    for each step i = 1..L, first the left-factor coefficients over the
    basis (1, X_1..X_n, p_1..p_{i-1}), then the right-factor coefficients
    over the same basis; after all steps, the output coefficients over
    (1, X_1..X_n, p_1..p_L); remaining slots are unused padding.
    """
    if L < 0 or n < 1:
        raise ValueError("need L >= 0 and n >= 1")
    r = (L + n + 1) ** 2
    b = CircuitBuilder(n_inputs=n, n_params=r)
    xs = [b.input(i) for i in range(n)]
    next_param = 0

    def affine(products: list[int]) -> int:
        nonlocal next_param
        basis = xs + products
        terms = [b.param(next_param)]  # coefficient of 1
        next_param += 1
        for elem in basis:
            terms.append(b.mul(b.param(next_param), elem))
            next_param += 1
        return b.sum_of(terms)

    products: list[int] = []
    for _ in range(L):
        left = affine(products)
        right = affine(products)
        products.append(b.mul(left, right))
    out = affine(products)
    if next_param > r:
        raise QuizlabError("parameter layout exceeded the declared arity")
    return b.finish(out)


def generic_parameters_used(L: int, n: int) -> int:
    """Number of non-padding slots in the generic computation's layout."""
    return sum(2 * (1 + n + i) for i in range(L)) + (1 + n + L)

"""Flattened arithmetic circuits: rank-1 operations over linear combinations.

Each operation reads ``left * right = output`` where left and right are
linear combinations of variables and output is a single variable.  Variable
0 is the constant one, variables 1..m are public, the rest are private.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping, Sequence

from .errors import InternalInconsistency, MissingInput
from .field import PrimeField
from .hashing import hash_bytes

LinearCombination = dict[int, int]
ONE = 0


def lc(*terms: tuple[int, int]) -> LinearCombination:
    out: LinearCombination = {}
    for var, coeff in terms:
        out[var] = out.get(var, 0) + coeff
    return out


def lc_add(a: Mapping[int, int] | None, b: Mapping[int, int] | None, p: int) -> LinearCombination:
    out = dict(a or {})
    for var, coeff in (b or {}).items():
        out[var] = (out.get(var, 0) + coeff) % p
    return {k: v for k, v in out.items() if v}


def lc_eval(terms, values: Sequence[int | None], p: int) -> int:
    """Evaluate a linear combination given as a mapping or as (var, coeff) pairs."""
    if isinstance(terms, Mapping):
        terms = terms.items()
    acc = 0
    for var, coeff in terms:
        v = values[var]
        if v is None:
            raise InternalInconsistency(f"operand reads variable {var} before it is assigned")
        acc += coeff * v
    return acc % p


@dataclass(frozen=True)
class Operation:
    left: tuple[tuple[int, int], ...]
    right: tuple[tuple[int, int], ...]
    output: int

    @staticmethod
    def make(left: Mapping[int, int], right: Mapping[int, int], output: int, p: int) -> Operation:
        def canon(m):
            return tuple(sorted((k, v % p) for k, v in m.items() if v % p))
        return Operation(canon(left), canon(right), output)


@dataclass
class Circuit:
    field: PrimeField
    names: list[str]
    num_public: int
    inputs: tuple[int, ...]
    operations: list[Operation] = dc_field(default_factory=list)

    def __post_init__(self):
        self.validate()
        self._export: str | None = None

    @property
    def num_vars(self) -> int:
        """n: index of the last variable (the one-variable is index 0)."""
        return len(self.names) - 1

    @property
    def num_ops(self) -> int:
        return len(self.operations)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def role(self, i: int) -> str:
        if i == ONE:
            return "one"
        return "public" if i <= self.num_public else "private"

    def validate(self):
        n = self.num_vars
        if self.names[0] != "one":
            raise InternalInconsistency("variable 0 must be the constant one")
        if not 0 <= self.num_public <= n:
            raise InternalInconsistency("public prefix out of range")
        assigned = set(self.inputs)
        if ONE in assigned:
            raise InternalInconsistency("the one-variable cannot be an input")
        for j, op in enumerate(self.operations, 1):
            for var, _ in op.left + op.right:
                if not 0 <= var <= n:
                    raise InternalInconsistency(f"operation {j} references unknown variable {var}")
            if op.output == ONE or not 0 < op.output <= n:
                raise InternalInconsistency(f"operation {j} has an invalid output variable")
            if op.output in assigned:
                raise InternalInconsistency(f"variable {op.output} assigned more than once")
            assigned.add(op.output)
        missing = set(range(1, n + 1)) - assigned
        if missing:
            raise InternalInconsistency(f"variables never assigned: {sorted(missing)[:5]}")

    def export(self) -> str:
        """Line-oriented text form, one operation per line; also the hashing preimage of the id."""
        if self._export is None:
            lines = [
                "zkpol-circuit v1",
                f"field {self.field.p}",
                f"vars {len(self.names)} public {self.num_public} ops {self.num_ops}",
            ]
            inputs = set(self.inputs)
            for i, name in enumerate(self.names):
                kind = "input" if i in inputs else "wire"
                lines.append(f"var {i} {self.role(i)} {kind} {name}")

            def fmt(terms):
                return ",".join(f"{v}:{c}" for v, c in terms) or "-"

            for j, op in enumerate(self.operations, 1):
                lines.append(f"op {j} L {fmt(op.left)} R {fmt(op.right)} O {op.output}")
            self._export = "\n".join(lines) + "\n"
        return self._export

    @property
    def circuit_id(self) -> bytes:
        return hash_bytes(self.export().encode())


class CircuitBuilder:
    def __init__(self, field: PrimeField):
        self.field = field
        self.names = ["one"]
        self.inputs: list[int] = []
        self.operations: list[Operation] = []

    def var(self, name: str) -> int:
        """Allocate a variable that some later operation will assign."""
        self.names.append(name)
        return len(self.names) - 1

    def input(self, name: str) -> int:
        i = self.var(name)
        self.inputs.append(i)
        return i

    def enforce(self, left: Mapping[int, int], right: Mapping[int, int], output: int):
        self.operations.append(Operation.make(left, right, output, self.field.p))

    def mul(self, left: Mapping[int, int], right: Mapping[int, int], name: str) -> int:
        out = self.var(name)
        self.enforce(left, right, out)
        return out

    def build(self, num_public: int) -> Circuit:
        return Circuit(self.field, list(self.names), num_public, tuple(self.inputs), list(self.operations))


@dataclass(frozen=True)
class Witness:
    """Full assignment v_0..v_n with v_0 = 1."""

    values: tuple[int, ...]
    num_public: int
    field: PrimeField

    @property
    def public(self) -> tuple[int, ...]:
        return self.values[1:self.num_public + 1]

    @property
    def private(self) -> tuple[int, ...]:
        return self.values[self.num_public + 1:]

    def replace(self, index: int, value: int) -> Witness:
        vals = list(self.values)
        vals[index] = value % self.field.p
        return Witness(tuple(vals), self.num_public, self.field)


def satisfies(circuit: Circuit, values: Sequence[int]) -> bool:
    """Per-operation check of left * right == output."""
    p = circuit.field.p
    for op in circuit.operations:
        a = sum(c * values[v] for v, c in op.left)
        b = sum(c * values[v] for v, c in op.right)
        if (a * b - values[op.output]) % p:
            return False
    return True


def compute_witness(circuit: Circuit, inputs: Mapping[str | int, int]) -> Witness:
    """Forward-evaluate every operation from the given input assignment."""
    p = circuit.field.p
    values: list[int | None] = [None] * len(circuit.names)
    values[ONE] = 1
    given = {}
    for key, v in inputs.items():
        idx = key if isinstance(key, int) else circuit.index(key)
        given[idx] = int(v) % p
    for i in circuit.inputs:
        if i not in given:
            raise MissingInput(f"no value for input {circuit.names[i]!r}")
        values[i] = given[i]
    for op in circuit.operations:
        a = lc_eval(op.left, values, p)
        b = lc_eval(op.right, values, p)
        out = a * b % p
        prev = values[op.output]
        if prev is not None and prev != out:
            raise InternalInconsistency(f"variable {circuit.names[op.output]!r} evaluates inconsistently")
        values[op.output] = out
    if any(v is None for v in values):
        raise InternalInconsistency("some variables were never assigned")
    return Witness(tuple(values), circuit.num_public, circuit.field)

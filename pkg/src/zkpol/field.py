"""Prime-field arithmetic.

Hot paths (polynomials, curve formulas) work on canonical ``int`` values
through :class:`PrimeField` methods; :class:`FieldElement` is the boxed value
type used at API boundaries and in tests.
"""
from __future__ import annotations

import random
from functools import total_ordering

from .errors import DecodeError, DivisionByZero

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_probable_prime(n: int, rounds: int = 40) -> bool:
    """Miller-Rabin with `rounds` random bases; error below 4**-rounds."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field of integers modulo a prime ``p``."""

    __slots__ = ("p", "nbytes", "_hash")

    def __init__(self, p: int, check: bool = True):
        if check and not is_probable_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.p = p
        self.nbytes = (p.bit_length() + 7) // 8
        self._hash = hash(("PrimeField", p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return self._hash

    @property
    def bits(self) -> int:
        return self.p.bit_length()

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value, self)

    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    def one(self) -> FieldElement:
        return FieldElement(1, self)

    def random(self, rng: random.Random, nonzero: bool = False) -> FieldElement:
        lo = 1 if nonzero else 0
        return FieldElement(rng.randrange(lo, self.p), self)

    # raw-int arithmetic
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return pow(a, -1, self.p)

    def batch_inv(self, values: list[int]) -> list[int]:
        """Montgomery's trick: one inversion for the whole list."""
        p = self.p
        prefix = [1] * (len(values) + 1)
        for i, v in enumerate(values):
            if v % p == 0:
                raise DivisionByZero("inverse of zero")
            prefix[i + 1] = prefix[i] * v % p
        acc = pow(prefix[-1], -1, p)
        out = [0] * len(values)
        for i in range(len(values) - 1, -1, -1):
            out[i] = acc * prefix[i] % p
            acc = acc * values[i] % p
        return out

    def sqrt(self, a: int) -> int | None:
        """Square root for p = 3 (mod 4); None for non-residues."""
        if self.p % 4 != 3:
            raise NotImplementedError("sqrt implemented for p = 3 mod 4 only")
        a %= self.p
        y = pow(a, (self.p + 1) // 4, self.p)
        return y if y * y % self.p == a else None

    def encode(self, a: int) -> bytes:
        return (a % self.p).to_bytes(self.nbytes, "big")

    def decode(self, data: bytes) -> int:
        if len(data) != self.nbytes:
            raise DecodeError(f"expected {self.nbytes} bytes, got {len(data)}")
        v = int.from_bytes(data, "big")
        if v >= self.p:
            raise DecodeError("non-canonical field encoding")
        return v


@total_ordering
class FieldElement:
    """An immutable element of a :class:`PrimeField`."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        if isinstance(value, FieldElement):
            value = value.value
        self.value = value % field.p
        self.field = field

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("operands from different fields")
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value + b, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value - b, self.field)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(b - self.value, self.field)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * b, self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def inverse(self) -> FieldElement:
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * self.field.inv(b), self.field)

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(b * self.field.inv(self.value), self.field)

    def __pow__(self, k: int):
        if k < 0:
            return FieldElement(pow(self.field.inv(self.value), -k, self.field.p), self.field)
        return FieldElement(pow(self.value, k, self.field.p), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __lt__(self, other):
        return self.value < self._coerce(other)

    def __hash__(self):
        return hash((self.value, self.field.p))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElement({self.value}, p={self.field.p})"

    def to_bytes(self) -> bytes:
        return self.field.encode(self.value)

    @classmethod
    def from_bytes(cls, data: bytes, field: PrimeField) -> FieldElement:
        return cls(field.decode(data), field)


def field_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def field_inv(a: FieldElement) -> FieldElement:
    return a.inverse()

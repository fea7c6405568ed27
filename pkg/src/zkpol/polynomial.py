"""Dense univariate polynomials over a prime field.

Coefficients are canonical ints, lowest degree first, with no trailing
zeros; the zero polynomial has no coefficients.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import DivisionByZero
from .field import FieldElement, PrimeField

KARATSUBA_CUTOFF = 48


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _schoolbook(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return [v % p for v in out]


def _karatsuba(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    if min(len(a), len(b)) <= KARATSUBA_CUTOFF:
        return _schoolbook(a, b, p)
    half = n // 2
    a0, a1 = a[:half], a[half:]
    b0, b1 = b[:half], b[half:]
    z0 = _karatsuba(a0, b0, p) if a0 and b0 else []
    z2 = _karatsuba(a1, b1, p) if a1 and b1 else []
    sa = _add_lists(a0, a1, p)
    sb = _add_lists(b0, b1, p)
    z1 = _karatsuba(sa, sb, p) if sa and sb else []
    out = [0] * (len(a) + len(b) - 1)
    for i, v in enumerate(z0):
        out[i] += v
        z1[i] -= v
    for i, v in enumerate(z2):
        out[i + 2 * half] += v
        z1[i] -= v
    for i, v in enumerate(z1):
        out[i + half] += v
    return [v % p for v in out]


def _add_lists(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] = (out[i] + v) % p
    return out


class Polynomial:
    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs: Iterable[int | FieldElement], field: PrimeField):
        p = field.p
        self.coeffs = tuple(_trim([int(c) % p for c in coeffs]))
        self.field = field

    @classmethod
    def _raw(cls, coeffs: list[int], field: PrimeField) -> Polynomial:
        # coeffs must already be reduced
        obj = cls.__new__(cls)
        obj.coeffs = tuple(_trim(coeffs))
        obj.field = field
        return obj

    @classmethod
    def zero(cls, field: PrimeField) -> Polynomial:
        return cls._raw([], field)

    @classmethod
    def constant(cls, c: int, field: PrimeField) -> Polynomial:
        return cls([c], field)

    @classmethod
    def x(cls, field: PrimeField) -> Polynomial:
        return cls._raw([0, 1], field)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k: int) -> FieldElement:
        v = self.coeffs[k] if 0 <= k < len(self.coeffs) else 0
        return FieldElement(v, self.field)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.field.p))

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)}, p={self.field.p})"

    def __call__(self, x) -> FieldElement:
        return FieldElement(self.evaluate(int(x)), self.field)

    def evaluate(self, x: int) -> int:
        p = self.field.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    def __add__(self, other: Polynomial) -> Polynomial:
        return Polynomial._raw(_add_lists(self.coeffs, other.coeffs, self.field.p), self.field)

    def __neg__(self) -> Polynomial:
        p = self.field.p
        return Polynomial._raw([-c % p for c in self.coeffs], self.field)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        p = self.field.p
        if isinstance(other, (int, FieldElement)):
            k = int(other) % p
            return Polynomial._raw([c * k % p for c in self.coeffs], self.field)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Polynomial.zero(self.field)
        return Polynomial._raw(_karatsuba(self.coeffs, other.coeffs, p), self.field)

    __rmul__ = __mul__

    def scale(self, k: int) -> Polynomial:
        return self * k

    def divmod(self, divisor: Polynomial) -> tuple[Polynomial, Polynomial]:
        if divisor.is_zero():
            raise DivisionByZero("polynomial division by zero")
        p = self.field.p
        rem = list(self.coeffs)
        dc = divisor.coeffs
        dd = len(dc) - 1
        if len(rem) - 1 < dd:
            return Polynomial.zero(self.field), self
        lead_inv = pow(dc[-1], -1, p)
        quot = [0] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            q = rem[k] * lead_inv % p
            if q == 0:
                continue
            quot[k - dd] = q
            base = k - dd
            for i in range(dd + 1):
                rem[base + i] = (rem[base + i] - q * dc[i]) % p
        return Polynomial._raw(quot, self.field), Polynomial._raw(rem[:dd], self.field)

    def __floordiv__(self, other: Polynomial) -> Polynomial:
        return self.divmod(other)[0]

    def __mod__(self, other: Polynomial) -> Polynomial:
        return self.divmod(other)[1]


def vanishing_polynomial(d: int, field: PrimeField) -> Polynomial:
    """t(x) = (x - 1)(x - 2)...(x - d)."""
    p = field.p
    c = [1]
    for i in range(1, d + 1):
        nxt = [0] * (len(c) + 1)
        for k, v in enumerate(c):
            nxt[k + 1] += v
            nxt[k] -= i * v
        c = [v % p for v in nxt]
    return Polynomial._raw(c, field)


def lagrange_interpolate(xs: Sequence[int], ys: Sequence[int], field: PrimeField) -> Polynomial:
    """Plain Lagrange interpolation through (xs[j], ys[j]); xs must be distinct."""
    p = field.p
    n = len(xs)
    if n != len(ys):
        raise ValueError("xs and ys differ in length")
    if n == 0:
        return Polynomial.zero(field)
    # full product (x - x_0)...(x - x_{n-1})
    full = [1]
    for xi in xs:
        nxt = [0] * (len(full) + 1)
        for k, v in enumerate(full):
            nxt[k + 1] += v
            nxt[k] -= xi * v
        full = [v % p for v in nxt]
    denoms = []
    for j, xj in enumerate(xs):
        acc = 1
        for k, xk in enumerate(xs):
            if k != j:
                acc = acc * (xj - xk) % p
        denoms.append(acc)
    weights = field.batch_inv(denoms)
    return _combine_basis(full, xs, [y * w % p for y, w in zip(ys, weights)], p, field)


def _combine_basis(full: Sequence[int], xs: Sequence[int], cs: Sequence[int], p: int,
                   field: PrimeField) -> Polynomial:
    # sum_j cs[j] * full(x) / (x - xs[j]), each quotient by synthetic division
    n = len(xs)
    out = [0] * n
    for xj, cj in zip(xs, cs):
        if cj == 0:
            continue
        q = full[n]
        out[n - 1] += cj * q
        for k in range(n - 1, 0, -1):
            q = (full[k] + xj * q) % p
            out[k - 1] += cj * q
    return Polynomial._raw([v % p for v in out], field)


class ConsecutiveInterpolator:
    """Interpolation over the fixed points 1..d, with t(x) and weights precomputed."""

    def __init__(self, d: int, field: PrimeField):
        self.d = d
        self.field = field
        self.points = list(range(1, d + 1))
        self.target = vanishing_polynomial(d, field)
        p = field.p
        # 1 / prod_{k != j} (j - k) = (-1)^(d-j) / ((j-1)! (d-j)!)
        fact = [1] * (d + 1)
        for i in range(1, d + 1):
            fact[i] = fact[i - 1] * i % p
        inv = field.batch_inv([fact[j - 1] * fact[d - j] % p for j in self.points])
        self.weights = [w if (d - j) % 2 == 0 else -w % p for j, w in zip(self.points, inv)]

    def interpolate(self, values: Sequence[int]) -> Polynomial:
        """values[j-1] is the value at x = j."""
        p = self.field.p
        cs = [v * w % p for v, w in zip(values, self.weights)]
        return _combine_basis(self.target.coeffs, self.points, cs, p, self.field)

    def basis_at(self, s: int) -> list[int]:
        """Every Lagrange basis polynomial evaluated at s (s outside 1..d)."""
        p = self.field.p
        diffs = [(s - j) % p for j in self.points]
        inv = self.field.batch_inv(diffs)
        ts = self.target.evaluate(s)
        return [ts * w % p * i % p for w, i in zip(self.weights, inv)]

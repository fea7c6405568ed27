"""Supersingular curve y^2 = x^3 + x over F_p (p = 3 mod 4) with a symmetric pairing.

The curve has p + 1 points and embedding degree 2.  The distortion map
(x, y) -> (-x, i*y), with i^2 = -1 in F_p^2, turns the reduced Tate pairing
into a symmetric, non-degenerate bilinear map on the order-r subgroup.
"""
from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import DecodeError
from .field import FieldElement, PrimeField, is_probable_prime

_INF = (1, 1, 0)


@dataclass(frozen=True)
class CurveProfile:
    name: str
    p: int
    r: int
    cofactor: int
    mimc_rounds: int


# p = cofactor * r - 1, both prime, r = 2 (mod 3); found by searching upward
# from sha256("zkpol-<profile>-v1") truncated to the target size of r.
ORACLE = CurveProfile(
    name="oracle",
    p=0x795D2872710B4C63,
    r=0x4559CDF84098BDF,
    cofactor=28,
    mimc_rounds=4,
)
REALISTIC = CurveProfile(
    name="realistic",
    p=0x1C576AC3EB528E6CD5295EE566C71034B6223C3139D43A4594526F72CF5AFADE63,
    r=0x3A82ECEF512E9164D0D98A1BAAE54ABF67807C44986BD3244AFCC50E0F2F7147,
    cofactor=124,
    mimc_rounds=91,
)
PROFILES = {ORACLE.name: ORACLE, REALISTIC.name: REALISTIC}


# --- Jacobian formulas for a = 1, b = 0 -------------------------------------

def _jdouble(P, p):
    X1, Y1, Z1 = P
    if Z1 == 0 or Y1 == 0:
        return _INF
    YY = Y1 * Y1 % p
    S = 4 * X1 * YY % p
    ZZ = Z1 * Z1 % p
    M = (3 * X1 * X1 + ZZ * ZZ) % p
    X3 = (M * M - 2 * S) % p
    Y3 = (M * (S - X3) - 8 * YY * YY) % p
    Z3 = 2 * Y1 * Z1 % p
    return (X3, Y3, Z3)


def _jadd(P, Q, p):
    X1, Y1, Z1 = P
    X2, Y2, Z2 = Q
    if Z1 == 0:
        return Q
    if Z2 == 0:
        return P
    Z1Z1 = Z1 * Z1 % p
    Z2Z2 = Z2 * Z2 % p
    U1 = X1 * Z2Z2 % p
    U2 = X2 * Z1Z1 % p
    S1 = Y1 * Z2 * Z2Z2 % p
    S2 = Y2 * Z1 * Z1Z1 % p
    H = (U2 - U1) % p
    R = (S2 - S1) % p
    if H == 0:
        return _jdouble(P, p) if R == 0 else _INF
    HH = H * H % p
    HHH = H * HH % p
    V = U1 * HH % p
    X3 = (R * R - HHH - 2 * V) % p
    Y3 = (R * (V - X3) - S1 * HHH) % p
    Z3 = Z1 * Z2 * H % p
    return (X3, Y3, Z3)


def _jadd_affine(P, x2, y2, p):
    """P (Jacobian) + (x2, y2) (affine, not infinity)."""
    X1, Y1, Z1 = P
    if Z1 == 0:
        return (x2, y2, 1)
    Z1Z1 = Z1 * Z1 % p
    U2 = x2 * Z1Z1 % p
    S2 = y2 * Z1 * Z1Z1 % p
    H = (U2 - X1) % p
    R = (S2 - Y1) % p
    if H == 0:
        return _jdouble(P, p) if R == 0 else _INF
    HH = H * H % p
    HHH = H * HH % p
    V = X1 * HH % p
    X3 = (R * R - HHH - 2 * V) % p
    Y3 = (R * (V - X3) - Y1 * HHH) % p
    Z3 = Z1 * H % p
    return (X3, Y3, Z3)


def _jmul(x, y, k, p):
    if k == 0:
        return _INF
    acc = (x, y, 1)
    for bit in bin(k)[3:]:
        acc = _jdouble(acc, p)
        if bit == "1":
            acc = _jadd_affine(acc, x, y, p)
    return acc


class GroupElement:
    """A point on the curve, in affine coordinates; ``x is None`` is the identity."""

    __slots__ = ("x", "y", "engine")

    def __init__(self, x, y, engine: PairingEngine):
        self.x = x
        self.y = y
        self.engine = engine

    @property
    def is_identity(self) -> bool:
        return self.x is None

    def __add__(self, other: GroupElement) -> GroupElement:
        if self.is_identity:
            return other
        if other.is_identity:
            return self
        p = self.engine.p
        J = _jadd_affine((self.x, self.y, 1), other.x, other.y, p)
        return self.engine._from_jacobian(J)

    def __neg__(self) -> GroupElement:
        if self.is_identity:
            return self
        return GroupElement(self.x, -self.y % self.engine.p, self.engine)

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def __mul__(self, k) -> GroupElement:
        if isinstance(k, FieldElement):
            k = k.value
        if not isinstance(k, int):
            return NotImplemented
        return self.engine.exp(self, k)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.x == other.x and self.y == other.y and self.engine is other.engine

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        if self.is_identity:
            return "GroupElement(identity)"
        return f"GroupElement(0x{self.x:x}, 0x{self.y:x})"

    def to_bytes(self) -> bytes:
        return self.engine.encode_point(self)

    def hex(self) -> str:
        return self.to_bytes().hex()


class GTElement:
    """Element a + b*i of the order-r subgroup of F_p^2*."""

    __slots__ = ("a", "b", "engine")

    def __init__(self, a: int, b: int, engine: PairingEngine):
        self.a = a
        self.b = b
        self.engine = engine

    def __mul__(self, other: GTElement) -> GTElement:
        p = self.engine.p
        a, b = _f2_mul(self.a, self.b, other.a, other.b, p)
        return GTElement(a, b, self.engine)

    def __pow__(self, k) -> GTElement:
        if isinstance(k, FieldElement):
            k = k.value
        k %= self.engine.r
        a, b = _f2_pow(self.a, self.b, k, self.engine.p)
        return GTElement(a, b, self.engine)

    def inverse(self) -> GTElement:
        # unitary: the inverse is the conjugate
        return GTElement(self.a, -self.b % self.engine.p, self.engine)

    def is_one(self) -> bool:
        return self.a == 1 and self.b == 0

    def __eq__(self, other):
        if not isinstance(other, GTElement):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"GTElement(0x{self.a:x} + 0x{self.b:x}*i)"

    def to_bytes(self) -> bytes:
        f = self.engine.fp
        return f.encode(self.a) + f.encode(self.b)


def _f2_mul(a, b, c, d, p):
    ac = a * c
    bd = b * d
    return (ac - bd) % p, ((a + b) * (c + d) - ac - bd) % p


def _f2_sqr(a, b, p):
    return (a + b) * (a - b) % p, 2 * a * b % p


def _f2_pow(a, b, k, p):
    ra, rb = 1, 0
    if k == 0:
        return ra, rb
    ra, rb = a, b
    for bit in bin(k)[3:]:
        ra, rb = _f2_sqr(ra, rb, p)
        if bit == "1":
            ra, rb = _f2_mul(ra, rb, a, b, p)
    return ra, rb


class PairingEngine:
    """Group operations and the symmetric pairing for one curve profile.

    Scalars (exponents) live in ``fr``, the field of integers modulo the group
    order r; point coordinates live in ``fp``.
    """

    def __init__(self, profile: CurveProfile, check: bool = True):
        if check:
            if profile.p % 4 != 3:
                raise ValueError("p must be 3 mod 4")
            if not is_probable_prime(profile.p) or not is_probable_prime(profile.r):
                raise ValueError("p and r must be prime")
            if (profile.p + 1) != profile.cofactor * profile.r:
                raise ValueError("r * cofactor must equal p + 1")
        self.profile = profile
        self.name = profile.name
        self.p = profile.p
        self.r = profile.r
        self.cofactor = profile.cofactor
        self.fp = PrimeField(profile.p, check=False)
        self.fr = PrimeField(profile.r, check=False)
        self.identity = GroupElement(None, None, self)
        self.g = self.hash_to_point(b"zkpol-generator-v1")
        self._gt_one = GTElement(1, 0, self)
        self.point_size = 1 + 2 * self.fp.nbytes
        if check and self.pairing(self.g, self.g).is_one():
            raise ValueError("degenerate pairing")

    def __repr__(self):
        return f"PairingEngine({self.name!r}, r~2^{self.r.bit_length()})"

    # --- points ---------------------------------------------------------
    def is_on_curve(self, x: int, y: int) -> bool:
        p = self.p
        return (y * y - (x * x * x + x)) % p == 0

    def point(self, x: int, y: int) -> GroupElement:
        if not (0 <= x < self.p and 0 <= y < self.p) or not self.is_on_curve(x, y):
            raise DecodeError("point not on curve")
        return GroupElement(x, y, self)

    def in_subgroup(self, P: GroupElement) -> bool:
        if P.is_identity:
            return True
        J = _jmul(P.x, P.y, self.r, self.p)
        return J[2] == 0

    def _from_jacobian(self, J) -> GroupElement:
        X, Y, Z = J
        if Z == 0:
            return self.identity
        p = self.p
        zi = pow(Z, -1, p)
        zi2 = zi * zi % p
        return GroupElement(X * zi2 % p, Y * zi2 * zi % p, self)

    def exp(self, P: GroupElement, k: int) -> GroupElement:
        """k-fold sum of P; k is reduced modulo the group order r."""
        if isinstance(k, FieldElement):
            k = k.value
        if P.is_identity:
            return P
        k %= self.r
        return self._from_jacobian(_jmul(P.x, P.y, k, self.p))

    def exp_raw(self, P: GroupElement, k: int) -> GroupElement:
        """Scalar multiple without reducing k (for points outside the subgroup)."""
        if P.is_identity or k == 0:
            return self.identity
        return self._from_jacobian(_jmul(P.x, P.y, k, self.p))

    def multi_exp(self, points, scalars) -> GroupElement:
        """Sum of k_i * P_i using the bucket method."""
        p = self.p
        r = self.r
        terms = []
        for P, k in zip(points, scalars):
            if isinstance(k, FieldElement):
                k = k.value
            k %= r
            if k and not P.is_identity:
                terms.append((P.x, P.y, k))
        if not terms:
            return self.identity
        if len(terms) < 4:
            acc = _INF
            for x, y, k in terms:
                acc = _jadd(acc, _jmul(x, y, k, p), p)
            return self._from_jacobian(acc)
        c = max(2, len(terms).bit_length() - 2)
        mask = (1 << c) - 1
        windows = (r.bit_length() + c - 1) // c
        acc = _INF
        for w in range(windows - 1, -1, -1):
            for _ in range(c):
                acc = _jdouble(acc, p)
            shift = w * c
            buckets = [_INF] * (mask + 1)
            for x, y, k in terms:
                idx = (k >> shift) & mask
                if idx:
                    buckets[idx] = _jadd_affine(buckets[idx], x, y, p)
            running = _INF
            total = _INF
            for idx in range(mask, 0, -1):
                running = _jadd(running, buckets[idx], p)
                total = _jadd(total, running, p)
            acc = _jadd(acc, total, p)
        return self._from_jacobian(acc)

    def hash_to_point(self, tag: bytes) -> GroupElement:
        """Deterministic non-identity point of order r derived from `tag`."""
        fp = self.fp
        ctr = 0
        while True:
            digest = hashlib.sha256(tag + ctr.to_bytes(4, "big")).digest()
            digest += hashlib.sha256(digest).digest()
            x = int.from_bytes(digest, "big") % self.p
            ctr += 1
            y = fp.sqrt(x * x * x + x)
            if y is None:
                continue
            y = min(y, self.p - y)
            P = self.exp_raw(GroupElement(x, y, self), self.cofactor)
            if not P.is_identity:
                return P

    def random_scalar(self, rng: random.Random, nonzero: bool = True) -> int:
        return rng.randrange(1 if nonzero else 0, self.r)

    def random_element(self, rng: random.Random) -> GroupElement:
        return self.exp(self.g, self.random_scalar(rng))

    def encode_point(self, P: GroupElement) -> bytes:
        n = self.fp.nbytes
        if P.is_identity:
            return b"\x00" + bytes(2 * n)
        return b"\x04" + P.x.to_bytes(n, "big") + P.y.to_bytes(n, "big")

    def decode_point(self, data: bytes, subgroup: bool = True) -> GroupElement:
        n = self.fp.nbytes
        if len(data) != 1 + 2 * n:
            raise DecodeError(f"point encoding must be {1 + 2 * n} bytes")
        tag = data[0]
        if tag == 0:
            if any(data[1:]):
                raise DecodeError("identity encoding must be zero-padded")
            return self.identity
        if tag != 4:
            raise DecodeError(f"unknown point tag {tag:#x}")
        P = self.point(int.from_bytes(data[1:1 + n], "big"), int.from_bytes(data[1 + n:], "big"))
        if subgroup and not self.in_subgroup(P):
            raise DecodeError("point outside the prime-order subgroup")
        return P

    # --- pairing ----------------------------------------------------------
    def gt_one(self) -> GTElement:
        return self._gt_one

    def pairing(self, P: GroupElement, Q: GroupElement) -> GTElement:
        """Reduced Tate pairing e(P, phi(Q)) with phi the distortion map."""
        if P.is_identity or Q.is_identity:
            return self._gt_one
        p = self.p
        xp, yp = P.x, P.y
        xq, yq = Q.x, Q.y
        fa, fb = 1, 0
        xt, yt = xp, yp
        for bit in bin(self.r)[3:]:
            # tangent at T, evaluated at phi(Q) = (-xq, i*yq)
            lam = (3 * xt * xt + 1) * pow(2 * yt, -1, p) % p
            la = (lam * (xq + xt) - yt) % p
            fa, fb = _f2_sqr(fa, fb, p)
            fa, fb = _f2_mul(fa, fb, la, yq, p)
            x3 = (lam * lam - 2 * xt) % p
            yt = (lam * (xt - x3) - yt) % p
            xt = x3
            if bit == "1":
                if xt == xp:
                    # T = -P: vertical line lies in F_p and dies in the final exponentiation
                    xt = None
                    break
                lam = (yp - yt) * pow(xp - xt, -1, p) % p
                la = (lam * (xq + xt) - yt) % p
                fa, fb = _f2_mul(fa, fb, la, yq, p)
                x3 = (lam * lam - xt - xp) % p
                yt = (lam * (xt - x3) - yt) % p
                xt = x3
        # f^(p-1) = conj(f)^2 / norm(f), then raise to (p+1)/r
        norm_inv = pow((fa * fa + fb * fb) % p, -1, p)
        ca, cb = _f2_sqr(fa, -fb % p, p)
        ga, gb = ca * norm_inv % p, cb * norm_inv % p
        ra, rb = _f2_pow(ga, gb, self.cofactor, p)
        return GTElement(ra, rb, self)


def group_exp(base: GroupElement, k) -> GroupElement:
    return base.engine.exp(base, k)


def pairing(a: GroupElement, b: GroupElement) -> GTElement:
    return a.engine.pairing(a, b)


@lru_cache(maxsize=None)
def get_engine(name: str = "oracle") -> PairingEngine:
    try:
        profile = PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
    return PairingEngine(profile)


def supersingular_engine(p: int, mimc_rounds: int = 4) -> PairingEngine:
    """Engine for an arbitrary prime p = 3 (mod 4), using the largest prime factor of p + 1."""
    from sympy import factorint

    if p % 4 != 3 or not is_probable_prime(p):
        raise ValueError("p must be a prime congruent to 3 mod 4")
    r = max(factorint(p + 1))
    if r < 3:
        raise ValueError("p + 1 has no odd prime factor")
    return PairingEngine(CurveProfile(f"ss{p}", p, r, (p + 1) // r, mimc_rounds))

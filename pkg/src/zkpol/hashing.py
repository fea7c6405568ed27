"""SHA-256 for byte-level hashing and a MiMC-style cube sponge over a prime field."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .errors import EmptyInput
from .field import FieldElement, PrimeField

MIMC_SEED = b"zkpol-mimc-v1"


def hash_bytes(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def derive_round_constants(field: PrimeField, rounds: int, seed: bytes = MIMC_SEED) -> tuple[int, ...]:
    consts = [0]
    for i in range(1, rounds):
        digest = hash_bytes(seed + i.to_bytes(8, "big"))
        consts.append(int.from_bytes(digest, "big") % field.p)
    return tuple(consts)


@dataclass(frozen=True)
class AlgebraicHashParams:
    field: PrimeField
    rounds: int
    constants: tuple[int, ...]

    def __post_init__(self):
        if self.rounds < 2:
            raise ValueError("need at least two rounds")
        if len(self.constants) != self.rounds:
            raise ValueError("one round constant per round")
        if gcd(3, self.field.p - 1) != 1:
            raise ValueError(f"x^3 is not a permutation of F_{self.field.p}")

    @classmethod
    def derive(cls, field: PrimeField, rounds: int) -> AlgebraicHashParams:
        return cls(field, rounds, derive_round_constants(field, rounds))

    @classmethod
    def for_engine(cls, engine) -> AlgebraicHashParams:
        return cls.derive(engine.fr, engine.profile.mimc_rounds)


def permute_raw(params: AlgebraicHashParams, x: int) -> int:
    """The round function alone: x <- (x + c_i)^3 for every round constant."""
    p = params.field.p
    for c in params.constants:
        x = pow(x + c, 3, p)
    return x


def permute(params: AlgebraicHashParams, x: int) -> int:
    """Rounds followed by feed-forward of the input."""
    return (permute_raw(params, x) + x) % params.field.p


def hash_field(params: AlgebraicHashParams, inputs: Sequence[FieldElement | int]) -> FieldElement:
    if len(inputs) == 0:
        raise EmptyInput("hash_field needs at least one input")
    p = params.field.p
    state = 0
    for m in inputs:
        state = permute(params, (state + int(m)) % p)
    return FieldElement(state, params.field)


def chunk_size(field: PrimeField) -> int:
    size = field.bits // 8 - 1
    if size < 1:
        raise ValueError("field too small for byte-chunk mapping (need at least 16 bits)")
    return size


def bytes_to_field_chunks(data: bytes, field: PrimeField) -> list[int]:
    """Split a fixed-width encoding into big-endian chunks that always fit below p."""
    size = chunk_size(field)
    return [int.from_bytes(data[i:i + size], "big") for i in range(0, len(data), size)]

"""The fixed zk-PoL circuit family: hr = H(rand) and dig = H(pk, lon, lat, rand, time).

Which certificate fields are public inputs depends on the privacy level;
hr and dig are always public, placed after the level's public fields.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .circuit import ONE, Circuit, CircuitBuilder, LinearCombination, lc_add
from .errors import InvalidLevel
from .field import PrimeField
from .hashing import AlgebraicHashParams, bytes_to_field_chunks, chunk_size

# canonical order of certificate fields inside the digest
CERT_FIELDS = ("pk", "lon", "lat", "rand", "time")
COORD_BYTES = 4
TIME_BYTES = 8


class PrivacyLevel(IntEnum):
    L1 = 1
    L2 = 2
    L3 = 3
    L4 = 4

    @classmethod
    def parse(cls, value) -> PrivacyLevel:
        try:
            return cls(int(value))
        except (ValueError, TypeError):
            raise InvalidLevel(f"privacy level must be 1..4, got {value!r}") from None

    @property
    def public_params(self) -> tuple[str, ...]:
        """Certificate parameters disclosed to the server."""
        return _PUBLIC[self]

    @property
    def private_params(self) -> tuple[str, ...]:
        return tuple(x for x in ("pk", "coordinate", "rand", "time") if x not in _PUBLIC[self])

    @property
    def public_fields(self) -> tuple[str, ...]:
        """Public circuit input groups, in variable order."""
        out = []
        for f in ("pk", "lon", "lat", "time"):
            param = "coordinate" if f in ("lon", "lat") else f
            if param in _PUBLIC[self]:
                out.append(f)
        return tuple(out)


_PUBLIC = {
    PrivacyLevel.L1: (),
    PrivacyLevel.L2: ("coordinate",),
    PrivacyLevel.L3: ("coordinate", "time"),
    PrivacyLevel.L4: ("pk", "coordinate", "time"),
}


def encode_coordinate_part(micro_degrees: int) -> bytes:
    return micro_degrees.to_bytes(COORD_BYTES, "big", signed=True)


def encode_time(t: int) -> bytes:
    return t.to_bytes(TIME_BYTES, "big")


def certificate_field_elements(pk_bytes: bytes, lon: int, lat: int, rand: int, time: int,
                               field: PrimeField) -> dict[str, list[int]]:
    """Map each certificate field to its field-element chunks."""
    return {
        "pk": bytes_to_field_chunks(pk_bytes, field),
        "lon": bytes_to_field_chunks(encode_coordinate_part(lon), field),
        "lat": bytes_to_field_chunks(encode_coordinate_part(lat), field),
        "rand": [rand % field.p],
        "time": bytes_to_field_chunks(encode_time(time), field),
    }


def flatten_fields(chunks: dict[str, list[int]]) -> list[int]:
    return [v for f in CERT_FIELDS for v in chunks[f]]


@dataclass(frozen=True)
class CircuitLayout:
    """Number of field elements each certificate field occupies."""

    pk: int
    lon: int
    lat: int
    rand: int
    time: int

    @classmethod
    def for_field(cls, field: PrimeField, pk_size: int) -> CircuitLayout:
        size = chunk_size(field)

        def n(nbytes):
            return -(-nbytes // size)

        return cls(pk=n(pk_size), lon=n(COORD_BYTES), lat=n(COORD_BYTES), rand=1, time=n(TIME_BYTES))

    def count(self, name: str) -> int:
        return getattr(self, name)

    def names(self, name: str) -> list[str]:
        if name == "rand":
            return ["rand"]
        return [f"{name}.{k}" for k in range(self.count(name))]


def hash_gadget(b: CircuitBuilder, params: AlgebraicHashParams, inputs: list[LinearCombination],
                tag: str) -> LinearCombination:
    """Constrain the sponge over `inputs`; returns the final state as a linear combination.

    Every round costs two operations (square, then cube); every absorbed input
    costs one more to materialise the fed-forward state.
    """
    p = params.field.p
    state: LinearCombination = {}
    for k, m in enumerate(inputs):
        x0 = lc_add(state, m, p)
        x = x0
        for i, c in enumerate(params.constants):
            a = lc_add(x, {ONE: c}, p) if c else x
            sq = b.mul(a, a, f"{tag}.{k}.r{i}.sq")
            cu = b.mul({sq: 1}, a, f"{tag}.{k}.r{i}.cu")
            x = {cu: 1}
        s = b.mul(lc_add(x, x0, p), {ONE: 1}, f"{tag}.{k}.state")
        state = {s: 1}
    return state


def operations_per_hash(params: AlgebraicHashParams, num_inputs: int) -> int:
    """Structural count: (2R + 1) per absorbed element plus one output binding."""
    return num_inputs * (2 * params.rounds + 1) + 1


def build_zkpol_circuit(level, hash_params: AlgebraicHashParams, pk_size: int) -> Circuit:
    """Circuit proving knowledge of a certificate behind public hr and dig.

    `pk_size` is the byte length of an encoded public key.
    """
    level = PrivacyLevel.parse(level)
    field = hash_params.field
    layout = CircuitLayout.for_field(field, pk_size)
    b = CircuitBuilder(field)
    var_of: dict[str, int] = {}
    public_fields = level.public_fields
    for f in public_fields:
        for name in layout.names(f):
            var_of[name] = b.input(name)
    hr = b.var("hr")
    dig = b.var("dig")
    num_public = len(b.names) - 1
    for f in CERT_FIELDS:
        if f in public_fields:
            continue
        for name in layout.names(f):
            var_of[name] = b.input(name)

    def lcs(f):
        return [{var_of[name]: 1} for name in layout.names(f)]

    hr_state = hash_gadget(b, hash_params, lcs("rand"), "hr")
    b.enforce(hr_state, {ONE: 1}, hr)
    dig_inputs = [x for f in CERT_FIELDS for x in lcs(f)]
    dig_state = hash_gadget(b, hash_params, dig_inputs, "dig")
    b.enforce(dig_state, {ONE: 1}, dig)
    return b.build(num_public)


def build_hash_circuit(hash_params: AlgebraicHashParams, num_inputs: int) -> Circuit:
    """Stand-alone circuit for H(x_0..x_{k-1}) with the digest as its single public output."""
    b = CircuitBuilder(hash_params.field)
    out = b.var("out")
    xs = [b.input(f"x.{k}") for k in range(num_inputs)]
    state = hash_gadget(b, hash_params, [{x: 1} for x in xs], "h")
    b.enforce(state, {ONE: 1}, out)
    return b.build(1)


def witness_inputs(layout: CircuitLayout, chunks: dict[str, list[int]]) -> dict[str, int]:
    out = {}
    for f in CERT_FIELDS:
        names = layout.names(f)
        if len(names) != len(chunks[f]):
            raise ValueError(f"field {f} has {len(chunks[f])} chunks, layout expects {len(names)}")
        out.update(zip(names, chunks[f]))
    return out

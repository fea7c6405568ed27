"""Network identities: Schnorr signatures and DH-based sealed envelopes.

Both use the same curve as the pairing engine but a separate generator
derived from its own domain tag.
"""
from __future__ import annotations

import hmac
import random
import struct
from dataclasses import dataclass, field
from functools import lru_cache

from .curve import GroupElement, PairingEngine, get_engine
from .errors import DecodeError, OpenFailed
from .hashing import hash_bytes

ENVELOPE_VERSION = 1
KEYFILE_MAGIC = b"ZKPOLKEY"
KEYFILE_VERSION = 1
SIG_DOMAIN = b"zkpol-signature-v1"


@lru_cache(maxsize=None)
def signature_generator(engine: PairingEngine) -> GroupElement:
    return engine.hash_to_point(SIG_DOMAIN)


@dataclass(frozen=True)
class KeyPair:
    sk: int = field(repr=False)
    pk: GroupElement

    @property
    def engine(self) -> PairingEngine:
        return self.pk.engine

    def public_bytes(self) -> bytes:
        return self.pk.to_bytes()


def keygen(engine: PairingEngine, rng: random.Random) -> KeyPair:
    sk = rng.randrange(1, engine.r)
    return KeyPair(sk, engine.exp(signature_generator(engine), sk))


def _scalar_from_hash(engine: PairingEngine, *parts: bytes) -> int:
    return int.from_bytes(hash_bytes(b"".join(parts)), "big") % engine.r


def sign(keys: KeyPair, message: bytes) -> bytes:
    """Schnorr signature (e, s) over hash_bytes(message), with a deterministic nonce."""
    engine = keys.engine
    fr = engine.fr
    digest = hash_bytes(message)
    ctr = 0
    while True:
        k = _scalar_from_hash(engine, b"zkpol-nonce", fr.encode(keys.sk), digest, ctr.to_bytes(4, "big"))
        if k:
            break
        ctr += 1
    R = engine.exp(signature_generator(engine), k)
    e = _scalar_from_hash(engine, b"zkpol-challenge", R.to_bytes(), keys.pk.to_bytes(), digest)
    s = (k + e * keys.sk) % engine.r
    return fr.encode(e) + fr.encode(s)


def verify_sig(pk: GroupElement, message: bytes, signature: bytes) -> bool:
    engine = pk.engine
    fr = engine.fr
    if pk.is_identity or len(signature) != 2 * fr.nbytes:
        return False
    try:
        e = fr.decode(signature[:fr.nbytes])
        s = fr.decode(signature[fr.nbytes:])
    except DecodeError:
        return False
    G = signature_generator(engine)
    R = engine.exp(G, s) - engine.exp(pk, e)
    expected = _scalar_from_hash(engine, b"zkpol-challenge", R.to_bytes(), pk.to_bytes(), hash_bytes(message))
    return hmac.compare_digest(fr.encode(expected), fr.encode(e))


def _keystream(key: bytes, n: int) -> bytes:
    out = bytearray()
    ctr = 0
    while len(out) < n:
        out += hash_bytes(key + ctr.to_bytes(8, "big"))
        ctr += 1
    return bytes(out[:n])


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def seal(recipient_pk: GroupElement, payload: bytes, rng: random.Random) -> bytes:
    """Encrypt to `recipient_pk`: version || ephemeral pk || ciphertext || tag."""
    engine = recipient_pk.engine
    eph = keygen(engine, rng)
    shared = engine.exp(recipient_pk, eph.sk).to_bytes()
    key = hash_bytes(b"zkpol-kdf" + shared)
    ct = _xor(payload, _keystream(key, len(payload)))
    tag = hash_bytes(shared + ct)
    return bytes([ENVELOPE_VERSION]) + eph.pk.to_bytes() + ct + tag


def open_envelope(recipient: KeyPair, envelope: bytes) -> bytes:
    engine = recipient.engine
    size = engine.point_size
    if len(envelope) < 1 + size + 32 or envelope[0] != ENVELOPE_VERSION:
        raise OpenFailed("malformed envelope")
    try:
        eph = engine.decode_point(envelope[1:1 + size])
    except DecodeError as exc:
        raise OpenFailed(f"bad ephemeral key: {exc}") from exc
    ct = envelope[1 + size:-32]
    tag = envelope[-32:]
    shared = engine.exp(eph, recipient.sk).to_bytes()
    if not hmac.compare_digest(hash_bytes(shared + ct), tag):
        raise OpenFailed("authentication tag mismatch")
    key = hash_bytes(b"zkpol-kdf" + shared)
    return _xor(ct, _keystream(key, len(ct)))


def sign_and_seal(sender: KeyPair, recipient_pk: GroupElement, body: bytes, rng: random.Random) -> bytes:
    """Signed body (length-prefixed, then signature) sealed to the recipient."""
    signed = struct.pack(">I", len(body)) + body + sign(sender, body)
    return seal(recipient_pk, signed, rng)


def split_signed(payload: bytes) -> tuple[bytes, bytes]:
    """Inverse of the signing frame in :func:`sign_and_seal`: (body, signature)."""
    if len(payload) < 4:
        raise DecodeError("signed payload too short")
    (n,) = struct.unpack(">I", payload[:4])
    if 4 + n > len(payload):
        raise DecodeError("signed payload truncated")
    return payload[4:4 + n], payload[4 + n:]


# --- key files --------------------------------------------------------------

def _header(kind: bytes, engine: PairingEngine) -> bytes:
    name = engine.name.encode()[:22]
    return KEYFILE_MAGIC + bytes([KEYFILE_VERSION]) + kind + name.ljust(22, b"\0")


def export_public_key(keys: KeyPair) -> bytes:
    return _header(b"P", keys.engine) + keys.pk.to_bytes().hex().encode() + b"\n"


def export_secret_key(keys: KeyPair) -> bytes:
    """Explicit secret-key export; the only place sk is ever serialized."""
    return _header(b"S", keys.engine) + keys.engine.fr.encode(keys.sk).hex().encode() + b"\n"


def load_key_file(data: bytes, engine: PairingEngine | None = None) -> KeyPair | GroupElement:
    """A secret-key file loads as a KeyPair, a public-key file as its point."""
    if len(data) < 32 or data[:8] != KEYFILE_MAGIC or data[8] != KEYFILE_VERSION:
        raise DecodeError("not a zkpol key file")
    kind = data[9:10]
    profile = data[10:32].rstrip(b"\0").decode()
    engine = engine or get_engine(profile)
    if engine.name != profile:
        raise DecodeError(f"key file is for profile {profile!r}, not {engine.name!r}")
    try:
        body = bytes.fromhex(data[32:].decode().strip())
    except ValueError as exc:
        raise DecodeError("key body is not hex") from exc
    if kind == b"P":
        return engine.decode_point(body)
    if kind == b"S":
        sk = engine.fr.decode(body)
        if sk == 0:
            raise DecodeError("zero secret key")
        return KeyPair(sk, engine.exp(signature_generator(engine), sk))
    raise DecodeError(f"unknown key kind {kind!r}")

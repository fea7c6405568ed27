"""Single-process proof-of-work chain holding certificate digests and service records."""
from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .errors import DecodeError, DuplicateRecord, NothingToMine
from .field import PrimeField

DEFAULT_DIFFICULTY = 12
ZERO_HASH = bytes(32)
TAG_DIGEST = 0x01
TAG_RECORD = 0x02


@dataclass(frozen=True)
class CertificateDigest:
    dig: int

    def encode(self, field: PrimeField) -> bytes:
        return field.encode(self.dig)


@dataclass(frozen=True)
class ServiceRecord:
    pk_server: bytes
    ind: int
    hr: int

    def encode(self, field: PrimeField) -> bytes:
        return (struct.pack(">H", len(self.pk_server)) + self.pk_server
                + struct.pack(">Q", self.ind) + field.encode(self.hr))


Entry = Union[CertificateDigest, ServiceRecord]


def encode_entry(entry: Entry, field: PrimeField) -> bytes:
    tag = TAG_DIGEST if isinstance(entry, CertificateDigest) else TAG_RECORD
    payload = entry.encode(field)
    return bytes([tag]) + struct.pack(">I", len(payload)) + payload


def decode_entry(data: bytes, pos: int, field: PrimeField) -> tuple[Entry, int]:
    if pos + 5 > len(data):
        raise DecodeError("truncated entry header")
    tag = data[pos]
    (n,) = struct.unpack(">I", data[pos + 1:pos + 5])
    payload = data[pos + 5:pos + 5 + n]
    if len(payload) != n:
        raise DecodeError("truncated entry")
    if tag == TAG_DIGEST:
        entry = CertificateDigest(field.decode(payload))
    elif tag == TAG_RECORD:
        if len(payload) < 2:
            raise DecodeError("truncated service record")
        (k,) = struct.unpack(">H", payload[:2])
        pk = payload[2:2 + k]
        if len(payload) < 10 + k:
            raise DecodeError("truncated service record")
        (ind,) = struct.unpack(">Q", payload[2 + k:10 + k])
        entry = ServiceRecord(pk, ind, field.decode(payload[10 + k:]))
    else:
        raise DecodeError(f"unknown entry tag {tag:#x}")
    return entry, pos + 5 + n


@dataclass(frozen=True)
class Block:
    index: int
    prev_hash: bytes
    timestamp: int
    nonce: int
    entries: tuple[Entry, ...]
    block_hash: bytes

    def body(self, field: PrimeField) -> bytes:
        """Canonical serialization of every field except the hash."""
        return (_header(self.index, self.prev_hash, self.timestamp) + struct.pack(">Q", self.nonce)
                + _entries_blob(self.entries, field))

    def compute_hash(self, field: PrimeField) -> bytes:
        return hashlib.sha256(self.body(field)).digest()

    def to_bytes(self, field: PrimeField) -> bytes:
        body = self.body(field)
        return struct.pack(">I", len(body)) + body + self.block_hash

    def summary(self) -> str:
        kinds = "".join("D" if isinstance(e, CertificateDigest) else "R" for e in self.entries)
        return (f"#{self.index} hash={self.block_hash.hex()[:16]} prev={self.prev_hash.hex()[:16]} "
                f"t={self.timestamp} nonce={self.nonce} entries={len(self.entries)}:{kinds}")


def _header(index: int, prev_hash: bytes, timestamp: int) -> bytes:
    return struct.pack(">Q", index) + prev_hash + struct.pack(">q", timestamp)


def _entries_blob(entries, field: PrimeField) -> bytes:
    return struct.pack(">I", len(entries)) + b"".join(encode_entry(e, field) for e in entries)


def leading_zero_bits(h: bytes) -> int:
    v = int.from_bytes(h, "big")
    return len(h) * 8 - v.bit_length()


def meets_difficulty(h: bytes, difficulty: int) -> bool:
    return leading_zero_bits(h) >= difficulty


def search_nonce(prefix: bytes, suffix: bytes, start: int, difficulty: int) -> tuple[int, bytes]:
    base = hashlib.sha256(prefix)
    nonce = start
    while True:
        hasher = base.copy()
        hasher.update(struct.pack(">Q", nonce))
        hasher.update(suffix)
        digest = hasher.digest()
        if meets_difficulty(digest, difficulty):
            return nonce, digest
        nonce = (nonce + 1) & 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class ChainViolation:
    index: int
    reason: str


class Ledger:
    """Blocks from genesis plus a pending pool.  All mutation goes through one owner."""

    def __init__(self, field: PrimeField, difficulty: int = DEFAULT_DIFFICULTY, path: str | Path | None = None):
        self.field = field
        self.difficulty = difficulty
        self.blocks: list[Block] = []
        self.pending: list[Entry] = []
        self.mined_by: list[str] = []
        self.path = Path(path) if path else None
        self._records: set[ServiceRecord] = set()
        self._digests: set[int] = set()

    def __len__(self):
        return len(self.blocks)

    @property
    def head_hash(self) -> bytes:
        return self.blocks[-1].block_hash if self.blocks else ZERO_HASH

    def submit_entry(self, entry: Entry) -> int:
        """Add to the pending pool; returns the pool size."""
        if isinstance(entry, ServiceRecord):
            if entry in self._records or entry in self.pending:
                raise DuplicateRecord(f"service record already present: ind={entry.ind}")
        elif not isinstance(entry, CertificateDigest):
            raise TypeError(f"not a ledger entry: {entry!r}")
        self.pending.append(entry)
        return len(self.pending)

    def mine_block(self, miner_id: str, rng: random.Random, timestamp: int) -> Block:
        if not self.pending:
            raise NothingToMine("pending pool is empty")
        entries = tuple(self.pending)
        index = len(self.blocks)
        prefix = _header(index, self.head_hash, timestamp)
        suffix = _entries_blob(entries, self.field)
        nonce, digest = search_nonce(prefix, suffix, rng.getrandbits(64), self.difficulty)
        block = Block(index, self.head_hash, timestamp, nonce, entries, digest)
        self._append(block, miner_id)
        self.pending.clear()
        if self.path is not None:
            with open(self.path, "ab") as fh:
                fh.write(block.to_bytes(self.field))
        return block

    def _append(self, block: Block, miner_id: str):
        self.blocks.append(block)
        self.mined_by.append(miner_id)
        for e in block.entries:
            if isinstance(e, ServiceRecord):
                self._records.add(e)
            else:
                self._digests.add(e.dig)

    def contains_record(self, pk_server: bytes, ind: int, hr: int) -> bool:
        return ServiceRecord(pk_server, ind, hr) in self._records

    def contains_digest(self, dig: int) -> bool:
        return int(dig) in self._digests

    def validate_chain(self) -> ChainViolation | None:
        prev = ZERO_HASH
        for i, block in enumerate(self.blocks):
            if block.index != i:
                return ChainViolation(i, "index")
            if block.prev_hash != prev:
                return ChainViolation(i, "link")
            if block.compute_hash(self.field) != block.block_hash:
                return ChainViolation(i, "hash")
            if not meets_difficulty(block.block_hash, self.difficulty):
                return ChainViolation(i, "difficulty")
            prev = block.block_hash
        return None

    def serialize(self) -> bytes:
        return b"".join(b.to_bytes(self.field) for b in self.blocks)

    def save(self, path: str | Path):
        Path(path).write_bytes(self.serialize())

    @classmethod
    def from_bytes(cls, data: bytes, field: PrimeField, difficulty: int = DEFAULT_DIFFICULTY) -> Ledger:
        ledger = cls(field, difficulty)
        pos = 0
        while pos < len(data):
            if pos + 4 > len(data):
                raise DecodeError("truncated block length")
            (n,) = struct.unpack(">I", data[pos:pos + 4])
            body = data[pos + 4:pos + 4 + n]
            block_hash = data[pos + 4 + n:pos + 36 + n]
            if len(body) != n or len(block_hash) != 32:
                raise DecodeError("truncated block")
            pos += 36 + n
            ledger._append(_parse_body(body, block_hash, field), "?")
        return ledger

    @classmethod
    def load(cls, path: str | Path, field: PrimeField, difficulty: int = DEFAULT_DIFFICULTY) -> Ledger:
        return cls.from_bytes(Path(path).read_bytes(), field, difficulty)


def _parse_body(body: bytes, block_hash: bytes, field: PrimeField) -> Block:
    if len(body) < 60:
        raise DecodeError("truncated block header")
    index, = struct.unpack(">Q", body[:8])
    prev = body[8:40]
    timestamp, = struct.unpack(">q", body[40:48])
    nonce, = struct.unpack(">Q", body[48:56])
    count, = struct.unpack(">I", body[56:60])
    pos = 60
    entries = []
    for _ in range(count):
        entry, pos = decode_entry(body, pos, field)
        entries.append(entry)
    if pos != len(body):
        raise DecodeError("trailing bytes in block body")
    return Block(index, prev, timestamp, nonce, tuple(entries), block_hash)

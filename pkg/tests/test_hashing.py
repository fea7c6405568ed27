import hashlib
import random

import pytest
from hypothesis import given, settings, strategies as st

from zkpol.circuit import compute_witness
from zkpol.errors import EmptyInput
from zkpol.field import PrimeField
from zkpol.hashing import (AlgebraicHashParams, bytes_to_field_chunks, chunk_size, derive_round_constants,
                           hash_bytes, hash_field, permute, permute_raw)
from zkpol.zkcircuit import build_hash_circuit, operations_per_hash


def test_sha256_vectors():
    assert hash_bytes(b"").hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    assert hash_bytes(b"a").hex() == "ca978112ca1bbdcafac231b39a23dc4da786eff8147c4e72b9807785afee48bb"
    assert hash_bytes(b"abc").hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_sha256_fixture_corpus_distinct():
    corpus = [b"", b"a", b"b", b"ab", b"ba", b"\x00", b"\x00\x00", bytes(range(256)), b"zkpol"]
    digests = {hash_bytes(m) for m in corpus}
    assert len(digests) == len(corpus)


def test_raw_permutation_hand_vector():
    f = PrimeField(101)
    params = AlgebraicHashParams(f, 2, (0, 7))
    assert permute_raw(params, 3) == 15
    assert pow(34, 3) == 39304 and 39304 % 101 == 15
    assert permute(params, 3) == 18


def test_constants_derivation():
    f = PrimeField(101)
    consts = derive_round_constants(f, 4)
    assert consts[0] == 0
    for i in range(1, 4):
        digest = hashlib.sha256(b"zkpol-mimc-v1" + i.to_bytes(8, "big")).digest()
        assert consts[i] == int.from_bytes(digest, "big") % 101


def test_parameter_checks():
    with pytest.raises(ValueError):
        AlgebraicHashParams.derive(PrimeField(103), 4)  # 3 | 102
    with pytest.raises(ValueError):
        AlgebraicHashParams.derive(PrimeField(101), 1)
    with pytest.raises(ValueError):
        AlgebraicHashParams(PrimeField(101), 3, (0, 1))


def test_empty_input(params):
    with pytest.raises(EmptyInput):
        hash_field(params, [])


def test_deterministic(params):
    assert hash_field(params, [42]) == hash_field(params, [42])


def test_permutation_injective_exhaustive():
    p = 65519  # largest prime below 2^16 with gcd(3, p-1) = 1
    assert (p - 1) % 3 != 0
    params = AlgebraicHashParams.derive(PrimeField(p), 4)
    images = {permute_raw(params, x) for x in range(p)}
    assert len(images) == p


def test_avalanche(params):
    rng = random.Random(11)
    fr = params.field
    changed = 0
    trials = 1000
    for _ in range(trials):
        xs = [rng.randrange(fr.p) for _ in range(5)]
        k = rng.randrange(5)
        ys = list(xs)
        ys[k] = (ys[k] + rng.randrange(1, fr.p)) % fr.p
        changed += hash_field(params, xs) != hash_field(params, ys)
    assert changed / trials >= 0.99


def test_circuit_agrees_with_native(params):
    rng = random.Random(3)
    circuits = {k: build_hash_circuit(params, k) for k in (1, 2, 5)}
    for trial in range(500):
        k = (1, 2, 5)[trial % 3]
        c = circuits[k]
        xs = [rng.randrange(params.field.p) for _ in range(k)]
        w = compute_witness(c, {f"x.{i}": v for i, v in enumerate(xs)})
        assert w.public == (int(hash_field(params, xs)),)


def test_constraint_count(params):
    for k in (1, 3, 6):
        c = build_hash_circuit(params, k)
        assert c.num_ops == operations_per_hash(params, k) == k * (2 * params.rounds + 1) + 1


def test_chunking():
    f = PrimeField(0x795D2872710B4C63)
    assert chunk_size(f) == 6
    assert bytes_to_field_chunks(bytes(range(1, 14)), f) == [
        int.from_bytes(bytes(range(1, 7)), "big"), int.from_bytes(bytes(range(7, 13)), "big"), 13]
    with pytest.raises(ValueError):
        chunk_size(PrimeField(101))


@given(st.binary(min_size=1, max_size=40), st.binary(min_size=1, max_size=40))
@settings(max_examples=200)
def test_chunking_injective_for_equal_lengths(a, b):
    f = PrimeField(0x795D2872710B4C63)
    if len(a) == len(b) and a != b:
        assert bytes_to_field_chunks(a, f) != bytes_to_field_chunks(b, f)
    for chunk in bytes_to_field_chunks(a, f):
        assert chunk < f.p

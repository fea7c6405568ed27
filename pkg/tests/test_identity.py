import random

import pytest
from hypothesis import given, settings, strategies as st

from zkpol.errors import DecodeError, OpenFailed
from zkpol.identity import (export_public_key, export_secret_key, keygen, load_key_file, open_envelope,
                            seal, sign, sign_and_seal, split_signed, verify_sig)


def test_keygen_determinism(engine):
    assert keygen(engine, random.Random(1)) == keygen(engine, random.Random(1))
    assert keygen(engine, random.Random(1)).pk != keygen(engine, random.Random(2)).pk


def test_keys_on_curve(engine):
    for seed in range(100):
        pk = keygen(engine, random.Random(seed)).pk
        assert engine.is_on_curve(pk.x, pk.y) and engine.in_subgroup(pk)


def test_secret_not_in_repr(engine):
    keys = keygen(engine, random.Random(3))
    assert str(keys.sk) not in repr(keys)


def test_sign_verify(engine):
    keys = keygen(engine, random.Random(4))
    msg = b"fixture message"
    sig = sign(keys, msg)
    assert verify_sig(keys.pk, msg, sig)
    assert sign(keys, msg) == sig
    assert not verify_sig(keys.pk, b"fixture messagf", sig)


def test_cross_key_matrix(engine):
    keys = [keygen(engine, random.Random(f"x{i}")) for i in range(10)]
    msg = b"cross"
    sigs = [sign(k, msg) for k in keys]
    for i, k in enumerate(keys):
        for j, sig in enumerate(sigs):
            assert verify_sig(k.pk, msg, sig) == (i == j)


def test_signature_bit_flips(engine):
    keys = keygen(engine, random.Random(5))
    msg = b"bit flips everywhere"
    sig = sign(keys, msg)
    for pos in range(len(sig)):
        for bit in (0, 3, 7):
            bad = bytearray(sig)
            bad[pos] ^= 1 << bit
            assert not verify_sig(keys.pk, msg, bytes(bad))
    for pos in range(len(msg)):
        bad = bytearray(msg)
        bad[pos] ^= 0x10
        assert not verify_sig(keys.pk, bytes(bad), sig)
    assert not verify_sig(keys.pk, msg, sig[:-1])
    assert not verify_sig(engine.identity, msg, sig)


@given(st.binary(max_size=200), st.integers(min_value=0, max_value=2**32))
@settings(max_examples=40, deadline=None)
def test_seal_open_roundtrip(payload, seed):
    from zkpol.curve import get_engine
    engine = get_engine("oracle")
    keys = keygen(engine, random.Random(seed))
    env = seal(keys.pk, payload, random.Random(seed + 1))
    assert open_envelope(keys, env) == payload


def test_wrong_recipient(engine):
    alice, bob = keygen(engine, random.Random(6)), keygen(engine, random.Random(7))
    env = seal(alice.pk, b"for alice only", random.Random(0))
    with pytest.raises(OpenFailed):
        open_envelope(bob, env)


def test_ciphertext_bit_flip_sweep(engine):
    keys = keygen(engine, random.Random(8))
    payload = bytes(range(64))
    env = seal(keys.pk, payload, random.Random(1))
    start = 1 + engine.point_size
    for k in range(64):
        bad = bytearray(env)
        bad[start + k] ^= 1 << (k % 8)
        with pytest.raises(OpenFailed):
            open_envelope(keys, bytes(bad))
    for pos in (0, 1, start - 1, len(env) - 1):
        bad = bytearray(env)
        bad[pos] ^= 0x01
        with pytest.raises(OpenFailed):
            open_envelope(keys, bytes(bad))
    with pytest.raises(OpenFailed):
        open_envelope(keys, env[:10])


def test_signed_frame(engine):
    sender, recipient = keygen(engine, random.Random(9)), keygen(engine, random.Random(10))
    env = sign_and_seal(sender, recipient.pk, b"body", random.Random(2))
    body, sig = split_signed(open_envelope(recipient, env))
    assert body == b"body" and verify_sig(sender.pk, body, sig)
    with pytest.raises(DecodeError):
        split_signed(b"\x00\x00\x00\x09abc")


def test_key_files(engine):
    keys = keygen(engine, random.Random(11))
    pub, sec = export_public_key(keys), export_secret_key(keys)
    assert pub[:8] == sec[:8] == b"ZKPOLKEY"
    assert load_key_file(pub) == keys.pk
    assert load_key_file(sec) == keys
    assert keys.engine.fr.encode(keys.sk).hex().encode() not in pub
    with pytest.raises(DecodeError):
        load_key_file(b"garbage" * 10)
    with pytest.raises(DecodeError):
        load_key_file(pub[:32] + b"zz\n")

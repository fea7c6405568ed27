import random

import pytest

from zkpol.circuit import CircuitBuilder, compute_witness
from zkpol.errors import ArityMismatch, KeyMismatch, MalformedProof, UnsatisfiedWitness
from zkpol.protocol import public_inputs_from_params, public_parameters
from zkpol.qap import circuit_to_qap
from zkpol.snark import (ALPHA, ToxicWaste, DIVISIBILITY, ELEMENT_FAMILY, Proof, ProvingKey, VerificationKey, hexdump,
                         prove, setup, verify)
from zkpol.zkcircuit import PrivacyLevel, witness_inputs


def one_op(fr, public_out=True):
    b = CircuitBuilder(fr)
    z = b.var("z")
    x, y = b.input("x"), b.input("y")
    b.enforce({x: 1}, {y: 1}, z)
    return b.build(1 if public_out else 0)


def honest(crs, level, cert, engine):
    entry = crs[level]
    w = compute_witness(entry.circuit, witness_inputs(crs.layout, cert.field_chunks(engine.fr)))
    proof = prove(entry.pk, entry.qap, w)
    return w, proof


def test_target_element_via_toxic_hook(engine):
    q = circuit_to_qap(one_op(engine.fr))
    seen = []
    pk, vk = setup(q, engine, random.Random(42), _toxic_hook=seen.append)
    (tw,) = seen
    r = engine.r
    g_o = engine.exp(engine.g, tw.rho_l * tw.rho_r)
    assert vk.go_t == engine.exp(g_o, (tw.s - 1) % r)


def test_toxic_waste_zeroize(engine):
    tw = ToxicWaste.draw(random.Random(1), engine.r, 10)
    assert tw.s > 10 and all(getattr(tw, k) for k in ToxicWaste.__slots__)
    kept = tw.copy()
    tw.zeroize()
    assert all(getattr(tw, k) == 0 for k in ToxicWaste.__slots__)
    assert kept.s != 0


def test_seeds_change_keys(engine):
    q = circuit_to_qap(one_op(engine.fr))
    pk1, vk1 = setup(q, engine, random.Random(1))
    pk2, vk2 = setup(q, engine, random.Random(2))
    pk1b, vk1b = setup(q, engine, random.Random(1))
    assert pk1.to_bytes() != pk2.to_bytes() and vk1.to_bytes() != vk2.to_bytes()
    assert pk1.to_bytes() == pk1b.to_bytes() and vk1 == vk1b


def test_key_shapes(crs):
    for lv in PrivacyLevel:
        e = crs[lv]
        assert len(e.pk.s_powers) == e.qap.d
        for name in ProvingKey.SEQUENCES[1:]:
            assert len(getattr(e.pk, name)) == e.qap.n - e.qap.m
        assert e.vk.num_public == e.qap.m


def test_prover_exponent_oracle(engine):
    c = one_op(engine.fr)
    q = circuit_to_qap(c)
    seen = []
    pk, vk = setup(q, engine, random.Random(42), _toxic_hook=seen.append)
    tw = seen[0]
    w = compute_witness(c, {"x": 6, "y": 7})
    proof = prove(pk, q, w)
    ls, rs, os_ = q.evaluate_at(tw.s)
    r = engine.r
    Lp = sum(v * ls[i] for i, v in enumerate(w.values) if i > q.m) % r
    Rp = sum(v * rs[i] for i, v in enumerate(w.values) if i > q.m) % r
    assert proof.gl_Lp == engine.exp(engine.g, tw.rho_l * Lp)
    assert proof.gr_Rp == engine.exp(engine.g, tw.rho_r * Rp)
    assert verify(vk, [42], proof)
    assert not verify(vk, [43], proof)


def test_unsatisfied_witness_raises_before_proving(crs, engine, make_cert):
    cert = make_cert("sn:0")
    entry = crs[2]
    w = compute_witness(entry.circuit, witness_inputs(crs.layout, cert.field_chunks(engine.fr)))
    bad = w.replace(entry.qap.m + 1, w.values[entry.qap.m + 1] + 1)
    with pytest.raises(UnsatisfiedWitness):
        prove(entry.pk, entry.qap, bad)


@pytest.mark.parametrize("level", list(PrivacyLevel))
def test_completeness_and_public_binding(level, crs, engine, make_cert):
    cert = make_cert(f"sn:{int(level)}")
    w, proof = honest(crs, level, cert, engine)
    vk = crs[level].vk
    assert verify(vk, list(w.public), proof)
    for k in range(len(w.public)):
        pub = list(w.public)
        pub[k] = (pub[k] + 1) % engine.r
        verdict = verify(vk, pub, proof)
        assert not verdict and verdict.failed == DIVISIBILITY


def test_longitude_shift_rejected(crs, engine, make_cert):
    cert = make_cert("sn:lon")
    w, proof = honest(crs, 2, cert, engine)
    params = public_parameters(cert, PrivacyLevel.L2)
    coord = params["coordinate"]
    lon = int.from_bytes(coord[:4], "big", signed=True) + 1
    params["coordinate"] = lon.to_bytes(4, "big", signed=True) + coord[4:]
    pub = public_inputs_from_params(params, PrivacyLevel.L2, crs.layout, engine.fr, w.public[-2], w.public[-1])
    assert verify(crs[2].vk, pub, proof).failed == DIVISIBILITY


def test_random_element_in_first_slot(crs, engine, make_cert):
    w, proof = honest(crs, 1, make_cert("sn:r"), engine)
    bad = proof.replace(0, engine.random_element(random.Random(0)))
    assert verify(crs[1].vk, list(w.public), bad).failed == ALPHA


def test_mutation_matrix_small(crs, engine, make_cert):
    rng = random.Random(8)
    w, proof = honest(crs, 3, make_cert("sn:m1"), engine)
    _, other = honest(crs, 3, make_cert("sn:m2"), engine)
    for i in range(8):
        for repl in (engine.identity, engine.random_element(rng), other.elements[i]):
            verdict = verify(crs[3].vk, list(w.public), proof.replace(i, repl))
            assert not verdict and verdict.failed == ELEMENT_FAMILY[i]


def test_key_binding(engine, crs, make_cert):
    entry = crs[1]
    _, vk_other = setup(entry.qap, engine, random.Random("independent"))
    w, proof = honest(crs, 1, make_cert("sn:kb"), engine)
    assert not verify(vk_other, list(w.public), proof)


def test_error_paths(crs, engine, make_cert):
    w, proof = honest(crs, 1, make_cert("sn:e"), engine)
    with pytest.raises(ArityMismatch):
        verify(crs[1].vk, list(w.public)[:-1], proof)
    with pytest.raises(KeyMismatch):
        verify(crs[2].vk, [0] * crs[2].vk.num_public, proof)
    with pytest.raises(KeyMismatch):
        prove(crs[2].pk, crs[1].qap, w)
    with pytest.raises(MalformedProof):
        Proof.from_bytes(proof.to_bytes()[:-1], engine)


def test_serialization_roundtrip(crs, engine, make_cert):
    entry = crs[4]
    assert ProvingKey.from_bytes(entry.pk.to_bytes(), engine) == entry.pk
    assert VerificationKey.from_bytes(entry.vk.to_bytes(), engine) == entry.vk
    w, proof = honest(crs, 4, make_cert("sn:s"), engine)
    again = Proof.from_bytes(proof.to_bytes(), engine)
    assert again == proof and verify(entry.vk, list(w.public), again)
    dump = hexdump(proof.to_bytes(), engine)
    assert dump.startswith("magic    ZKPOLPRF") and "seq 0: 8 elements" in dump


def test_proof_bytes_hide_private_fields(crs, engine, make_cert):
    for seed in range(10):
        cert = make_cert(f"sn:zk:{seed}")
        _, proof = honest(crs, 1, cert, engine)
        blob = proof.to_bytes()
        secrets = [cert.pk.to_bytes(), engine.fr.encode(cert.rand), cert.time.to_bytes(8, "big"),
                   cert.coordinate.to_bytes()]
        assert not any(s in blob for s in secrets)

"""Pinocchio-style trusted setup, prover and verifier over the symmetric pairing.

Key and proof layout follows the protocol as published, with two fixes:
the proof carries g_r^{R_p(s)} (not g_o^{R_p(s)}), and h(s) is evaluated in
the exponent against g, g^s, ..., g^{s^d} (the power list is extended with g
for the constant term).  There is no proof re-randomisation.
"""
from __future__ import annotations

import random
import struct
from dataclasses import dataclass
from typing import Callable, Sequence

from .circuit import Witness
from .curve import GroupElement, PairingEngine
from .errors import ArityMismatch, DecodeError, KeyMismatch, MalformedProof
from .qap import QapInstance, assemble

CRS_MAGIC = b"ZKPOLCRS"
PROOF_MAGIC = b"ZKPOLPRF"
FORMAT_VERSION = 1

ALPHA = "alpha-restriction"
CONSISTENCY = "consistency"
DIVISIBILITY = "divisibility"

# which verifier check each proof element feeds first
ELEMENT_FAMILY = (ALPHA, ALPHA, ALPHA, ALPHA, ALPHA, ALPHA, CONSISTENCY, DIVISIBILITY)
PROOF_ELEMENTS = ("gl_Lp", "gl_Lp_alpha", "gr_Rp", "gr_Rp_alpha", "go_Op", "go_Op_alpha", "g_Z", "g_h")


class ToxicWaste:
    """Secret setup randomness.  Overwritten with zeros once the keys exist."""

    __slots__ = ("s", "rho_l", "rho_r", "alpha_l", "alpha_r", "alpha_o", "beta", "gamma")

    def __init__(self, **values: int):
        for k in self.__slots__:
            setattr(self, k, values[k])

    @classmethod
    def draw(cls, rng: random.Random, r: int, d: int) -> ToxicWaste:
        def nonzero():
            return rng.randrange(1, r)

        s = nonzero()
        while s <= d:
            s = nonzero()
        return cls(s=s, rho_l=nonzero(), rho_r=nonzero(), alpha_l=nonzero(), alpha_r=nonzero(),
                   alpha_o=nonzero(), beta=nonzero(), gamma=nonzero())

    def copy(self) -> ToxicWaste:
        return ToxicWaste(**{k: getattr(self, k) for k in self.__slots__})

    def zeroize(self):
        for k in self.__slots__:
            setattr(self, k, 0)


def _check_engine(engine: PairingEngine, q: QapInstance):
    if engine.fr != q.field:
        raise KeyMismatch("QAP field differs from the curve's scalar field")


@dataclass(frozen=True, eq=False)
class ProvingKey:
    circuit_id: bytes
    s_powers: tuple[GroupElement, ...]      # g^{s^i}, i = 1..d
    gl_l: tuple[GroupElement, ...]          # j = m+1..n
    gr_r: tuple[GroupElement, ...]
    go_o: tuple[GroupElement, ...]
    gl_al: tuple[GroupElement, ...]
    gr_ar: tuple[GroupElement, ...]
    go_ao: tuple[GroupElement, ...]
    beta_lro: tuple[GroupElement, ...]

    SEQUENCES = ("s_powers", "gl_l", "gr_r", "go_o", "gl_al", "gr_ar", "go_ao", "beta_lro")

    @property
    def engine(self) -> PairingEngine:
        return self.s_powers[0].engine

    def to_bytes(self) -> bytes:
        return _frame(CRS_MAGIC, self.circuit_id, [getattr(self, f) for f in self.SEQUENCES])

    @classmethod
    def from_bytes(cls, data: bytes, engine: PairingEngine) -> ProvingKey:
        cid, seqs = _unframe(data, CRS_MAGIC, engine, len(cls.SEQUENCES))
        return cls(cid, *seqs)

    def __eq__(self, other):
        return isinstance(other, ProvingKey) and self.to_bytes() == other.to_bytes()


@dataclass(frozen=True, eq=False)
class VerificationKey:
    circuit_id: bytes
    g: GroupElement
    go_t: GroupElement
    gl_l: tuple[GroupElement, ...]          # i = 0..m
    gr_r: tuple[GroupElement, ...]
    go_o: tuple[GroupElement, ...]
    g_alpha_l: GroupElement
    g_alpha_r: GroupElement
    g_alpha_o: GroupElement
    g_gamma: GroupElement
    g_beta_gamma: GroupElement

    @property
    def engine(self) -> PairingEngine:
        return self.g.engine

    @property
    def num_public(self) -> int:
        return len(self.gl_l) - 1

    def to_bytes(self) -> bytes:
        tail = (self.g_alpha_l, self.g_alpha_r, self.g_alpha_o, self.g_gamma, self.g_beta_gamma)
        return _frame(CRS_MAGIC, self.circuit_id,
                      [(self.g,), (self.go_t,), self.gl_l, self.gr_r, self.go_o, tail])

    @classmethod
    def from_bytes(cls, data: bytes, engine: PairingEngine) -> VerificationKey:
        cid, seqs = _unframe(data, CRS_MAGIC, engine, 6)
        g, go_t, gl_l, gr_r, go_o, tail = seqs
        if len(g) != 1 or len(go_t) != 1 or len(tail) != 5:
            raise DecodeError("verification key has the wrong shape")
        if not (len(gl_l) == len(gr_r) == len(go_o)) or not gl_l:
            raise DecodeError("public-variable sequences differ in length")
        return cls(cid, g[0], go_t[0], gl_l, gr_r, go_o, *tail)

    def __eq__(self, other):
        return isinstance(other, VerificationKey) and self.to_bytes() == other.to_bytes()


@dataclass(frozen=True)
class Proof:
    circuit_id: bytes
    gl_Lp: GroupElement
    gl_Lp_alpha: GroupElement
    gr_Rp: GroupElement
    gr_Rp_alpha: GroupElement
    go_Op: GroupElement
    go_Op_alpha: GroupElement
    g_Z: GroupElement
    g_h: GroupElement

    @property
    def elements(self) -> tuple[GroupElement, ...]:
        return tuple(getattr(self, f) for f in PROOF_ELEMENTS)

    def replace(self, index: int, element: GroupElement) -> Proof:
        els = list(self.elements)
        els[index] = element
        return Proof(self.circuit_id, *els)

    def to_bytes(self) -> bytes:
        return _frame(PROOF_MAGIC, self.circuit_id, [self.elements])

    @classmethod
    def from_bytes(cls, data: bytes, engine: PairingEngine) -> Proof:
        try:
            cid, (els,) = _unframe(data, PROOF_MAGIC, engine, 1)
        except DecodeError as exc:
            raise MalformedProof(str(exc)) from exc
        if len(els) != 8:
            raise MalformedProof(f"proof has {len(els)} elements, expected 8")
        return cls(cid, *els)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    failed: str | None = None

    def __bool__(self):
        return self.accepted


# --- framing ----------------------------------------------------------------

def _frame(magic: bytes, circuit_id: bytes, sequences: Sequence[Sequence[GroupElement]]) -> bytes:
    out = bytearray(magic)
    out.append(FORMAT_VERSION)
    out += circuit_id
    for seq in sequences:
        out += struct.pack(">I", len(seq))
        for P in seq:
            out += P.to_bytes()
    return bytes(out)


def _unframe(data: bytes, magic: bytes, engine: PairingEngine, count: int):
    if data[:8] != magic:
        raise DecodeError(f"bad magic; expected {magic!r}")
    if len(data) < 41 or data[8] != FORMAT_VERSION:
        raise DecodeError("unsupported version or truncated header")
    cid = bytes(data[9:41])
    pos = 41
    size = engine.point_size
    seqs = []
    for _ in range(count):
        if pos + 4 > len(data):
            raise DecodeError("truncated sequence header")
        (n,) = struct.unpack(">I", data[pos:pos + 4])
        pos += 4
        end = pos + n * size
        if end > len(data):
            raise DecodeError("truncated sequence")
        seqs.append(tuple(engine.decode_point(data[k:k + size]) for k in range(pos, end, size)))
        pos = end
    if pos != len(data):
        raise DecodeError("trailing bytes after last sequence")
    return cid, seqs


def hexdump(data: bytes, engine: PairingEngine) -> str:
    """Readable dump of a framed key or proof file."""
    lines = [f"magic    {data[:8].decode(errors='replace')}", f"version  {data[8]}",
             f"circuit  {data[9:41].hex()}"]
    pos = 41
    seq = 0
    while pos < len(data):
        (n,) = struct.unpack(">I", data[pos:pos + 4])
        pos += 4
        lines.append(f"seq {seq}: {n} elements")
        for k in range(n):
            lines.append(f"  [{k}] {data[pos:pos + engine.point_size].hex()}")
            pos += engine.point_size
        seq += 1
    return "\n".join(lines) + "\n"


# --- protocol ---------------------------------------------------------------

def setup(q: QapInstance, engine: PairingEngine, rng: random.Random,
          _toxic_hook: Callable[[ToxicWaste], None] | None = None) -> tuple[ProvingKey, VerificationKey]:
    """Generate the CRS for `q`.  The toxic waste is zeroised before returning.

    `_toxic_hook` receives a copy of the toxic waste; it exists for tests only.
    """
    _check_engine(engine, q)
    r = engine.r
    tw = ToxicWaste.draw(rng, r, q.d)
    try:
        if _toxic_hook is not None:
            _toxic_hook(tw.copy())
        ls, rs, os_ = q.evaluate_at(tw.s)
        ts = q.target.evaluate(tw.s)
        g = engine.g
        rho_o = tw.rho_l * tw.rho_r % r

        def gexp(k):
            return engine.exp(g, k % r)

        powers = []
        acc = 1
        for _ in range(q.d):
            acc = acc * tw.s % r
            powers.append(gexp(acc))
        priv = range(q.m + 1, q.n + 1)
        pk = ProvingKey(
            circuit_id=q.circuit_id,
            s_powers=tuple(powers),
            gl_l=tuple(gexp(tw.rho_l * ls[j]) for j in priv),
            gr_r=tuple(gexp(tw.rho_r * rs[j]) for j in priv),
            go_o=tuple(gexp(rho_o * os_[j]) for j in priv),
            gl_al=tuple(gexp(tw.rho_l * tw.alpha_l * ls[j]) for j in priv),
            gr_ar=tuple(gexp(tw.rho_r * tw.alpha_r * rs[j]) for j in priv),
            go_ao=tuple(gexp(rho_o * tw.alpha_o * os_[j]) for j in priv),
            beta_lro=tuple(gexp(tw.beta * (tw.rho_l * ls[j] + tw.rho_r * rs[j] + rho_o * os_[j]))
                           for j in priv),
        )
        pub = range(0, q.m + 1)
        vk = VerificationKey(
            circuit_id=q.circuit_id,
            g=g,
            go_t=gexp(rho_o * ts),
            gl_l=tuple(gexp(tw.rho_l * ls[i]) for i in pub),
            gr_r=tuple(gexp(tw.rho_r * rs[i]) for i in pub),
            go_o=tuple(gexp(rho_o * os_[i]) for i in pub),
            g_alpha_l=gexp(tw.alpha_l),
            g_alpha_r=gexp(tw.alpha_r),
            g_alpha_o=gexp(tw.alpha_o),
            g_gamma=gexp(tw.gamma),
            g_beta_gamma=gexp(tw.beta * tw.gamma),
        )
    finally:
        tw.zeroize()
    return pk, vk


def prove(pk: ProvingKey, q: QapInstance, w: Witness) -> Proof:
    if pk.circuit_id != q.circuit_id:
        raise KeyMismatch("proving key was generated for a different circuit")
    if len(pk.gl_l) != q.n - q.m or len(pk.s_powers) != q.d:
        raise KeyMismatch("proving key shape does not match the QAP")
    engine = pk.engine
    _check_engine(engine, q)
    _, _, _, h = assemble(q, w)
    priv = w.values[q.m + 1:]
    msm = engine.multi_exp
    return Proof(
        circuit_id=q.circuit_id,
        gl_Lp=msm(pk.gl_l, priv),
        gl_Lp_alpha=msm(pk.gl_al, priv),
        gr_Rp=msm(pk.gr_r, priv),
        gr_Rp_alpha=msm(pk.gr_ar, priv),
        go_Op=msm(pk.go_o, priv),
        go_Op_alpha=msm(pk.go_ao, priv),
        g_Z=msm(pk.beta_lro, priv),
        g_h=msm((engine.g,) + pk.s_powers, h.coeffs),
    )


def _valid_element(P, engine: PairingEngine) -> bool:
    if not isinstance(P, GroupElement) or P.engine is not engine:
        return False
    if P.is_identity:
        return True
    return engine.is_on_curve(P.x, P.y) and engine.in_subgroup(P)


def verify(vk: VerificationKey, public_inputs: Sequence[int], proof: Proof) -> Verdict:
    """Check the three pairing families; public_inputs are v_1..v_m (level fields, hr, dig)."""
    engine = vk.engine
    if not isinstance(proof, Proof) or not all(_valid_element(P, engine) for P in proof.elements):
        raise MalformedProof("proof element is not a point of the prime-order subgroup")
    if proof.circuit_id != vk.circuit_id:
        raise KeyMismatch("proof and verification key are bound to different circuits")
    if len(public_inputs) != vk.num_public:
        raise ArityMismatch(f"expected {vk.num_public} public inputs, got {len(public_inputs)}")
    e = engine.pairing
    g = vk.g
    pub = [int(v) for v in public_inputs]

    if not (e(proof.gl_Lp, vk.g_alpha_l) == e(proof.gl_Lp_alpha, g)
            and e(proof.gr_Rp, vk.g_alpha_r) == e(proof.gr_Rp_alpha, g)
            and e(proof.go_Op, vk.g_alpha_o) == e(proof.go_Op_alpha, g)):
        return Verdict(False, ALPHA)

    combined = proof.gl_Lp + proof.gr_Rp + proof.go_Op
    if e(combined, vk.g_beta_gamma) != e(proof.g_Z, vk.g_gamma):
        return Verdict(False, CONSISTENCY)

    gl_Lv = vk.gl_l[0] + engine.multi_exp(vk.gl_l[1:], pub)
    gr_Rv = vk.gr_r[0] + engine.multi_exp(vk.gr_r[1:], pub)
    go_Ov = vk.go_o[0] + engine.multi_exp(vk.go_o[1:], pub)
    lhs = e(gl_Lv + proof.gl_Lp, gr_Rv + proof.gr_Rp)
    rhs = e(vk.go_t, proof.g_h) * e(go_Ov + proof.go_Op, g)
    if lhs != rhs:
        return Verdict(False, DIVISIBILITY)
    return Verdict(True)

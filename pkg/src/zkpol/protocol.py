"""Certificate issuance between user and AP, and proof-backed service delivery.

Actors are plain functions over immutable messages; the Ledger is the only
shared mutable state.
"""
from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .circuit import Circuit, compute_witness
from .curve import GroupElement, PairingEngine
from .errors import (ArityMismatch, DecodeError, DuplicateRecord, KeyMismatch, MalformedProof,
                     ZkpolError)
from .hashing import AlgebraicHashParams, bytes_to_field_chunks, hash_field
from .identity import KeyPair, sign_and_seal, open_envelope, split_signed, verify_sig
from .ledger import CertificateDigest, Ledger, ServiceRecord
from .qap import QapInstance, circuit_to_qap
from .snark import Proof, ProvingKey, VerificationKey, prove, setup, verify
from .zkcircuit import (COORD_BYTES, TIME_BYTES, CircuitLayout, PrivacyLevel, build_zkpol_circuit,
                        certificate_field_elements, encode_coordinate_part, encode_time,
                        flatten_fields, witness_inputs)

MICRO = 1_000_000
M_PER_DEG_LON = 111_320.0
M_PER_DEG_LAT = 110_540.0
REQUEST_MAGIC = b"ZKPOLREQ"
REQUEST_VERSION = 1


# --- rejections -------------------------------------------------------------

class Rejection(ZkpolError):
    """A protocol step refused a message.  `code` is what the event log shows."""

    @property
    def code(self) -> str:
        return type(self).__name__


class TamperedRequest(Rejection):
    pass


class OutOfRange(Rejection):
    pass


class TamperedResponse(Rejection):
    pass


class AlreadyServed(Rejection):
    pass


class UnknownDigest(Rejection):
    pass


class InvalidProof(Rejection):
    def __init__(self, message: str, family: str | None = None):
        super().__init__(message)
        self.family = family


def rejection_code(exc: BaseException) -> str:
    return type(exc).__name__


# --- domain types -----------------------------------------------------------

@dataclass(frozen=True)
class GeoCoordinate:
    """Longitude and latitude in signed micro-degrees."""

    lon: int
    lat: int

    def __post_init__(self):
        if not isinstance(self.lon, int) or not isinstance(self.lat, int):
            raise TypeError("coordinates are integer micro-degrees")
        if abs(self.lat) > 90 * MICRO or abs(self.lon) > 180 * MICRO:
            raise ValueError(f"coordinate out of bounds: ({self.lon}, {self.lat})")

    @classmethod
    def from_degrees(cls, lon, lat) -> GeoCoordinate:
        return cls(round(float(lon) * MICRO), round(float(lat) * MICRO))

    def to_bytes(self) -> bytes:
        return encode_coordinate_part(self.lon) + encode_coordinate_part(self.lat)

    @classmethod
    def from_bytes(cls, data: bytes) -> GeoCoordinate:
        if len(data) != 2 * COORD_BYTES:
            raise DecodeError("coordinate encoding has the wrong length")
        lon = int.from_bytes(data[:COORD_BYTES], "big", signed=True)
        lat = int.from_bytes(data[COORD_BYTES:], "big", signed=True)
        try:
            return cls(lon, lat)
        except ValueError as exc:
            raise DecodeError(str(exc)) from None


def distance_m(a: GeoCoordinate, b: GeoCoordinate) -> float:
    """Equirectangular distance in metres, scaled at a's latitude."""
    dx = (b.lon - a.lon) * M_PER_DEG_LON / MICRO * math.cos(math.radians(a.lat / MICRO))
    dy = (b.lat - a.lat) * M_PER_DEG_LAT / MICRO
    return math.sqrt(dx * dx + dy * dy)


def in_range(ap: GeoCoordinate, claim: GeoCoordinate, range_m: float) -> bool:
    return distance_m(ap, claim) <= range_m


@dataclass(frozen=True)
class LocationCertificate:
    pk: GroupElement
    coordinate: GeoCoordinate
    rand: int
    time: int

    def field_chunks(self, fr) -> dict[str, list[int]]:
        return certificate_field_elements(self.pk.to_bytes(), self.coordinate.lon, self.coordinate.lat,
                                          self.rand, self.time, fr)

    def digest(self, params: AlgebraicHashParams) -> int:
        return int(hash_field(params, flatten_fields(self.field_chunks(params.field))))

    def hr(self, params: AlgebraicHashParams) -> int:
        return int(hash_field(params, [self.rand]))


@dataclass(frozen=True)
class ServiceGrant:
    pk_server: bytes
    ind: int
    hr: int
    level: PrivacyLevel


# --- CRS per level ----------------------------------------------------------

@dataclass
class LevelCrs:
    level: PrivacyLevel
    circuit: Circuit
    qap: QapInstance
    pk: ProvingKey | None
    vk: VerificationKey


@dataclass
class CrsBundle:
    """Circuits, QAPs and keys for a set of privacy levels on one engine."""

    engine: PairingEngine
    hash_params: AlgebraicHashParams
    levels: dict[PrivacyLevel, LevelCrs] = field(default_factory=dict)

    @property
    def layout(self) -> CircuitLayout:
        return CircuitLayout.for_field(self.engine.fr, self.engine.point_size)

    def __getitem__(self, level) -> LevelCrs:
        level = PrivacyLevel.parse(level)
        try:
            return self.levels[level]
        except KeyError:
            raise KeyMismatch(f"no CRS loaded for privacy level {int(level)}") from None

    def circuit_for(self, level: PrivacyLevel) -> Circuit:
        return build_zkpol_circuit(level, self.hash_params, self.engine.point_size)

    @classmethod
    def generate(cls, engine: PairingEngine, levels: Iterable, rng: random.Random) -> CrsBundle:
        bundle = cls(engine, AlgebraicHashParams.for_engine(engine))
        for lv in levels:
            lv = PrivacyLevel.parse(lv)
            circuit = bundle.circuit_for(lv)
            q = circuit_to_qap(circuit)
            pk, vk = setup(q, engine, rng)
            bundle.levels[lv] = LevelCrs(lv, circuit, q, pk, vk)
        return bundle

    @staticmethod
    def file_names(level) -> tuple[str, str]:
        n = int(PrivacyLevel.parse(level))
        return f"level{n}.pk", f"level{n}.vk"

    def save(self, directory: str | Path) -> list[Path]:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for lv, crs in sorted(self.levels.items()):
            pk_name, vk_name = self.file_names(lv)
            if crs.pk is not None:
                (out / pk_name).write_bytes(crs.pk.to_bytes())
                written.append(out / pk_name)
            (out / vk_name).write_bytes(crs.vk.to_bytes())
            written.append(out / vk_name)
        return written

    @classmethod
    def load(cls, directory: str | Path, engine: PairingEngine, levels: Iterable | None = None,
             need_pk: bool = True) -> CrsBundle:
        """Load key files; the circuits are rebuilt and checked against the key's circuit id."""
        src = Path(directory)
        bundle = cls(engine, AlgebraicHashParams.for_engine(engine))
        if levels is None:
            levels = [lv for lv in PrivacyLevel if (src / cls.file_names(lv)[1]).exists()]
        for lv in levels:
            lv = PrivacyLevel.parse(lv)
            pk_name, vk_name = cls.file_names(lv)
            if not (src / vk_name).exists() or (need_pk and not (src / pk_name).exists()):
                raise FileNotFoundError(f"missing CRS files for level {int(lv)} in {src}")
            vk = VerificationKey.from_bytes((src / vk_name).read_bytes(), engine)
            pk = ProvingKey.from_bytes((src / pk_name).read_bytes(), engine) if need_pk else None
            circuit = bundle.circuit_for(lv)
            if vk.circuit_id != circuit.circuit_id or (pk is not None and pk.circuit_id != circuit.circuit_id):
                raise KeyMismatch(f"level {int(lv)} keys were generated for a different circuit")
            bundle.levels[lv] = LevelCrs(lv, circuit, circuit_to_qap(circuit), pk, vk)
        return bundle


# --- generation scheme ------------------------------------------------------

def request_body(pk: GroupElement, position: GeoCoordinate) -> bytes:
    return pk.to_bytes() + position.to_bytes()


def user_request_certificate(user: KeyPair, position: GeoCoordinate, ap_pk: GroupElement,
                             rng: random.Random) -> bytes:
    """Signed {pk, coordinate}, sealed to the AP."""
    return sign_and_seal(user, ap_pk, request_body(user.pk, position), rng)


def parse_request(engine: PairingEngine, payload: bytes) -> tuple[GroupElement, GeoCoordinate]:
    """Open the signed frame of a certificate request and check its signature."""
    try:
        body, sig = split_signed(payload)
        if len(body) != engine.point_size + 2 * COORD_BYTES:
            raise DecodeError("request body has the wrong length")
        pk = engine.decode_point(body[:engine.point_size])
        position = GeoCoordinate.from_bytes(body[engine.point_size:])
    except DecodeError as exc:
        raise TamperedRequest(f"malformed request: {exc}") from None
    if pk.is_identity or not verify_sig(pk, body, sig):
        raise TamperedRequest("request signature does not verify under the embedded key")
    return pk, position


def ap_issue(ap: KeyPair, ap_position: GeoCoordinate, range_m: float, sealed_request: bytes, now: int,
             rng: random.Random, ledger: Ledger,
             hash_params: AlgebraicHashParams | None = None) -> tuple[bytes, CertificateDigest]:
    """Check the request, issue {rand, time} sealed to the user, and pool the digest.

    Nothing about the user is kept beyond the submitted digest.
    """
    engine = ap.engine
    hash_params = hash_params or AlgebraicHashParams.for_engine(engine)
    payload = open_envelope(ap, sealed_request)
    user_pk, position = parse_request(engine, payload)
    if not in_range(ap_position, position, range_m):
        raise OutOfRange(f"claimed position is {distance_m(ap_position, position):.2f} m away, "
                         f"range is {range_m} m")
    rand = engine.fr.random(rng).value
    cert = LocationCertificate(user_pk, position, rand, now)
    body = engine.fr.encode(rand) + encode_time(now)
    response = sign_and_seal(ap, user_pk, body, rng)
    digest = CertificateDigest(cert.digest(hash_params))
    ledger.submit_entry(digest)
    return response, digest


def user_assemble_certificate(user: KeyPair, ap_pk: GroupElement, sealed_response: bytes,
                              position: GeoCoordinate) -> LocationCertificate:
    fr = user.engine.fr
    payload = open_envelope(user, sealed_response)
    try:
        body, sig = split_signed(payload)
    except DecodeError as exc:
        raise TamperedResponse(str(exc)) from None
    if len(body) != fr.nbytes + TIME_BYTES or not verify_sig(ap_pk, body, sig):
        raise TamperedResponse("response signature does not verify under the AP key")
    try:
        rand = fr.decode(body[:fr.nbytes])
    except DecodeError as exc:
        raise TamperedResponse(str(exc)) from None
    time = int.from_bytes(body[fr.nbytes:], "big")
    return LocationCertificate(user.pk, position, rand, time)


# --- verification scheme ----------------------------------------------------

_PARAM_TAGS = {"pk": 1, "coordinate": 2, "time": 3}
_TAG_PARAMS = {v: k for k, v in _PARAM_TAGS.items()}


@dataclass(frozen=True)
class ServiceRequest:
    """Proof plus (ind, hr, dig) and the level's public parameters in their native encodings."""

    level: PrivacyLevel
    proof: Proof
    ind: int
    hr: int
    dig: int
    params: Mapping[str, bytes]

    def to_bytes(self) -> bytes:
        engine = self.proof.gl_Lp.engine
        fr = engine.fr
        out = bytearray(REQUEST_MAGIC)
        out += bytes([REQUEST_VERSION, int(self.level)])
        out += struct.pack(">Q", self.ind) + fr.encode(self.hr) + fr.encode(self.dig)
        out += bytes([len(self.params)])
        for name in self.level.public_params:
            value = self.params[name]
            out += bytes([_PARAM_TAGS[name]]) + struct.pack(">H", len(value)) + value
        proof = self.proof.to_bytes()
        out += struct.pack(">I", len(proof)) + proof
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes, engine: PairingEngine) -> ServiceRequest:
        fr = engine.fr
        try:
            if data[:8] != REQUEST_MAGIC or data[8] != REQUEST_VERSION:
                raise DecodeError("not a service request")
            level = PrivacyLevel.parse(data[9])
            pos = 10
            (ind,) = struct.unpack(">Q", data[pos:pos + 8])
            pos += 8
            hr = fr.decode(data[pos:pos + fr.nbytes])
            pos += fr.nbytes
            dig = fr.decode(data[pos:pos + fr.nbytes])
            pos += fr.nbytes
            count = data[pos]
            pos += 1
            params = {}
            for _ in range(count):
                name = _TAG_PARAMS[data[pos]]
                (n,) = struct.unpack(">H", data[pos + 1:pos + 3])
                params[name] = bytes(data[pos + 3:pos + 3 + n])
                pos += 3 + n
            (n,) = struct.unpack(">I", data[pos:pos + 4])
            proof = Proof.from_bytes(data[pos + 4:pos + 4 + n], engine)
            if pos + 4 + n != len(data):
                raise DecodeError("trailing bytes after proof")
        except (IndexError, KeyError, struct.error) as exc:
            raise DecodeError(f"truncated or malformed service request: {exc}") from None
        return cls(level, proof, ind, hr, dig, params)


def public_parameters(cer: LocationCertificate, level: PrivacyLevel) -> dict[str, bytes]:
    native = {"pk": cer.pk.to_bytes(), "coordinate": cer.coordinate.to_bytes(), "time": encode_time(cer.time)}
    return {name: native[name] for name in level.public_params}


def public_inputs_from_params(params: Mapping[str, bytes], level: PrivacyLevel, layout: CircuitLayout,
                              fr, hr: int, dig: int) -> list[int]:
    """Rebuild v_1..v_m from the native parameter encodings, in circuit order."""
    if set(params) != set(level.public_params):
        raise ArityMismatch(f"level {int(level)} expects parameters {level.public_params}, "
                            f"got {tuple(sorted(params))}")
    pieces = {}
    if "pk" in params:
        pieces["pk"] = params["pk"]
    if "coordinate" in params:
        coord = params["coordinate"]
        pieces["lon"], pieces["lat"] = coord[:COORD_BYTES], coord[COORD_BYTES:]
    if "time" in params:
        pieces["time"] = params["time"]
    values = []
    for f in level.public_fields:
        chunks = bytes_to_field_chunks(pieces[f], fr)
        if len(chunks) != layout.count(f):
            raise ArityMismatch(f"public field {f} has {len(chunks)} elements, circuit expects {layout.count(f)}")
        values.extend(chunks)
    return values + [hr % fr.p, dig % fr.p]


def user_request_service(cer: LocationCertificate, level, ind: int, crs: CrsBundle) -> ServiceRequest:
    level = PrivacyLevel.parse(level)
    entry = crs[level]
    if entry.pk is None:
        raise KeyMismatch(f"no proving key for level {int(level)}")
    fr = crs.engine.fr
    inputs = witness_inputs(crs.layout, cer.field_chunks(fr))
    w = compute_witness(entry.circuit, inputs)
    proof = prove(entry.pk, entry.qap, w)
    hr, dig = w.public[-2], w.public[-1]
    return ServiceRequest(level, proof, ind, hr, dig, public_parameters(cer, level))


def server_handle(request: ServiceRequest, crs: CrsBundle, ledger: Ledger, pk_server: bytes) -> ServiceGrant:
    """Replay check, digest check, proof check, then grant and record."""
    if ledger.contains_record(pk_server, request.ind, request.hr):
        raise AlreadyServed(f"service {request.ind} already granted for this hr")
    if not ledger.contains_digest(request.dig):
        raise UnknownDigest("no mined certificate digest matches the request")
    vk = crs[request.level].vk
    public = public_inputs_from_params(request.params, request.level, crs.layout, crs.engine.fr,
                                       request.hr, request.dig)
    try:
        verdict = verify(vk, public, request.proof)
    except (MalformedProof, KeyMismatch) as exc:
        raise InvalidProof(str(exc)) from None
    if not verdict:
        raise InvalidProof(f"proof rejected by the {verdict.failed} check", verdict.failed)
    try:
        ledger.submit_entry(ServiceRecord(pk_server, request.ind, request.hr))
    except DuplicateRecord:
        raise AlreadyServed(f"service {request.ind} already pending for this hr") from None
    return ServiceGrant(pk_server, request.ind, request.hr, request.level)

"""Line-oriented scenario files and a deterministic harness that plays them.

Declarations::

    AP      <name> <lon> <lat> <range_m>
    USER    <name> <lon> <lat>
    SERVER  <name>

Events, each prefixed by a time offset in seconds and optionally suffixed by
``=> <expected outcome>``::

    <t> REQUEST_CERT    <user> <ap>
    <t> MINE            <ap>
    <t> REQUEST_SERVICE <user> <server> <level> <ind>
    <t> REPLAY          <user>
    <t> TAMPER request-body|request-envelope|response <user> <ap>
    <t> TAMPER spoof-pk <attacker> <victim> <ap>
    <t> TAMPER proof|public-input|forge-cert <user> <server> <level> <ind>

Coordinates are decimal degrees with at most six fractional digits.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path

from .curve import PairingEngine
from .errors import ScenarioError, ZkpolError
from .identity import KeyPair, keygen, seal, sign, sign_and_seal
from .ledger import Ledger
from .protocol import (MICRO, CrsBundle, GeoCoordinate, LocationCertificate, ServiceRequest,
                       ap_issue, request_body, server_handle, user_assemble_certificate,
                       user_request_certificate, user_request_service)
from .zkcircuit import PrivacyLevel

CLOCK_EPOCH = 1_700_000_000
KNOWN_OUTCOMES = {
    "ISSUED", "MINED", "GRANTED", "TamperedRequest", "OutOfRange", "TamperedResponse", "AlreadyServed",
    "UnknownDigest", "InvalidProof", "OpenFailed", "ArityMismatch", "NothingToMine", "NoCertificate",
    "NoRequest",
}
CERT_TAMPERS = ("request-body", "request-envelope", "response")
SERVICE_TAMPERS = ("proof", "public-input", "forge-cert")
LOG_HEADER = "time\tline\tevent\targs\toutcome\texpected\tstatus\tdetail"
BUNDLED = ("honest_pcs", "replay", "tamper_request", "out_of_range", "forged_proof", "forged_certificate")


@dataclass(frozen=True)
class ApDecl:
    name: str
    position: GeoCoordinate
    range_m: float


@dataclass(frozen=True)
class UserDecl:
    name: str
    position: GeoCoordinate


@dataclass(frozen=True)
class Event:
    line_no: int
    time: int
    kind: str
    args: tuple[str, ...]
    expected: str | None


@dataclass
class Scenario:
    aps: dict[str, ApDecl] = field(default_factory=dict)
    users: dict[str, UserDecl] = field(default_factory=dict)
    servers: list[str] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)

    def levels_used(self) -> set[PrivacyLevel]:
        out = set()
        for ev in self.events:
            if ev.kind == "REQUEST_SERVICE":
                out.add(PrivacyLevel.parse(ev.args[2]))
            elif ev.kind == "TAMPER" and ev.args[0] in SERVICE_TAMPERS:
                out.add(PrivacyLevel.parse(ev.args[3]))
        return out


# --- parsing ----------------------------------------------------------------

def _degrees(text: str, line_no: int) -> int:
    try:
        micro = Decimal(text) * MICRO
    except InvalidOperation:
        raise ScenarioError(line_no, f"not a number: {text!r}") from None
    if micro != micro.to_integral_value():
        raise ScenarioError(line_no, f"more than six decimal places: {text!r}")
    return int(micro)


def _coordinate(lon: str, lat: str, line_no: int) -> GeoCoordinate:
    try:
        return GeoCoordinate(_degrees(lon, line_no), _degrees(lat, line_no))
    except ValueError as exc:
        raise ScenarioError(line_no, str(exc)) from None


def _int(text: str, line_no: int, what: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise ScenarioError(line_no, f"{what} must be an integer, got {text!r}") from None
    if v < 0:
        raise ScenarioError(line_no, f"{what} must be non-negative")
    return v


def _arity(args, n, line_no, usage):
    if len(args) != n:
        raise ScenarioError(line_no, f"expected: {usage}")


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    names: dict[str, str] = {}
    last_time = 0
    refs: list[tuple[int, str, str]] = []

    def declare(kind, name, line_no):
        if name in names:
            raise ScenarioError(line_no, f"name {name!r} already declared")
        names[name] = kind

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        expected = None
        if "=>" in line:
            line, expected = (s.strip() for s in line.split("=>", 1))
            if expected not in KNOWN_OUTCOMES:
                raise ScenarioError(line_no, f"unknown expected outcome {expected!r}")
        tok = line.split()
        head = tok[0]
        if head in ("AP", "USER", "SERVER"):
            if expected is not None:
                raise ScenarioError(line_no, "declarations take no expected outcome")
            if head == "AP":
                _arity(tok, 5, line_no, "AP <name> <lon> <lat> <range_m>")
                try:
                    range_m = float(tok[4])
                except ValueError:
                    raise ScenarioError(line_no, f"range must be a number, got {tok[4]!r}") from None
                if not range_m >= 0:
                    raise ScenarioError(line_no, "range must be non-negative")
                declare("ap", tok[1], line_no)
                sc.aps[tok[1]] = ApDecl(tok[1], _coordinate(tok[2], tok[3], line_no), range_m)
            elif head == "USER":
                _arity(tok, 4, line_no, "USER <name> <lon> <lat>")
                declare("user", tok[1], line_no)
                sc.users[tok[1]] = UserDecl(tok[1], _coordinate(tok[2], tok[3], line_no))
            else:
                _arity(tok, 2, line_no, "SERVER <name>")
                declare("server", tok[1], line_no)
                sc.servers.append(tok[1])
            continue

        t = _int(head, line_no, "event time")
        if t < last_time:
            raise ScenarioError(line_no, f"event time {t} goes backwards (previous {last_time})")
        last_time = t
        if len(tok) < 2:
            raise ScenarioError(line_no, "missing event name")
        kind, args = tok[1], tuple(tok[2:])
        if kind == "REQUEST_CERT":
            _arity(args, 2, line_no, "REQUEST_CERT <user> <ap>")
            refs += [(line_no, args[0], "user"), (line_no, args[1], "ap")]
        elif kind == "MINE":
            _arity(args, 1, line_no, "MINE <ap>")
            refs.append((line_no, args[0], "ap"))
        elif kind == "REQUEST_SERVICE":
            _arity(args, 4, line_no, "REQUEST_SERVICE <user> <server> <level> <ind>")
            refs += [(line_no, args[0], "user"), (line_no, args[1], "server")]
            _level(args[2], line_no)
            _int(args[3], line_no, "service index")
        elif kind == "REPLAY":
            _arity(args, 1, line_no, "REPLAY <user>")
            refs.append((line_no, args[0], "user"))
        elif kind == "TAMPER":
            if not args:
                raise ScenarioError(line_no, "TAMPER needs a kind")
            tk = args[0]
            if tk in CERT_TAMPERS:
                _arity(args, 3, line_no, f"TAMPER {tk} <user> <ap>")
                refs += [(line_no, args[1], "user"), (line_no, args[2], "ap")]
            elif tk == "spoof-pk":
                _arity(args, 4, line_no, "TAMPER spoof-pk <attacker> <victim> <ap>")
                refs += [(line_no, args[1], "user"), (line_no, args[2], "user"), (line_no, args[3], "ap")]
            elif tk in SERVICE_TAMPERS:
                _arity(args, 5, line_no, f"TAMPER {tk} <user> <server> <level> <ind>")
                refs += [(line_no, args[1], "user"), (line_no, args[2], "server")]
                _level(args[3], line_no)
                _int(args[4], line_no, "service index")
            else:
                raise ScenarioError(line_no, f"unknown TAMPER kind {tk!r}")
        else:
            raise ScenarioError(line_no, f"unknown event {kind!r}")
        sc.events.append(Event(line_no, t, kind, args, expected))

    for line_no, name, kind in refs:
        if names.get(name) != kind:
            raise ScenarioError(line_no, f"{name!r} is not a declared {kind}")
    return sc


def _level(text: str, line_no: int) -> PrivacyLevel:
    try:
        return PrivacyLevel.parse(text)
    except ZkpolError as exc:
        raise ScenarioError(line_no, str(exc)) from None


def load_scenario(name_or_path: str) -> tuple[str, str]:
    """Return (label, text) for a bundled scenario name or a file path."""
    path = Path(name_or_path)
    if path.exists():
        return path.stem, path.read_text()
    if name_or_path in BUNDLED:
        return name_or_path, bundled_text(name_or_path)
    raise FileNotFoundError(f"no scenario file or bundled scenario named {name_or_path!r}")


def bundled_text(name: str) -> str:
    return resources.files("zkpol").joinpath("scenarios").joinpath(f"{name}.scn").read_text()


# --- harness ----------------------------------------------------------------

@dataclass
class LogRow:
    time: int
    line_no: int
    event: str
    args: str
    outcome: str
    expected: str | None
    detail: str

    @property
    def matched(self) -> bool:
        return self.expected is None or self.expected == self.outcome

    def tsv(self) -> str:
        status = "ok" if self.matched else "MISMATCH"
        return "\t".join([str(self.time), str(self.line_no), self.event, self.args, self.outcome,
                          self.expected or "-", status, self.detail])


@dataclass
class RunResult:
    rows: list[LogRow]
    ledger: Ledger

    @property
    def all_matched(self) -> bool:
        return all(r.matched for r in self.rows)

    def log_text(self) -> str:
        return "\n".join([LOG_HEADER] + [r.tsv() for r in self.rows]) + "\n"


@dataclass
class _User:
    decl: UserDecl
    keys: KeyPair
    rng: random.Random
    cert: LocationCertificate | None = None
    last: tuple[str, ServiceRequest] | None = None


class Harness:
    """Owns every actor's keys and RNG stream, the ledger, and the simulation clock."""

    def __init__(self, scenario: Scenario, engine: PairingEngine, crs: CrsBundle, seed: int,
                 difficulty: int = 12):
        self.sc = scenario
        self.engine = engine
        self.crs = crs
        self.seed = seed
        self.ledger = Ledger(engine.fr, difficulty)
        self.rng = random.Random(f"{seed}:harness")
        self.clock = CLOCK_EPOCH
        self.aps = {n: (self._keys(n), random.Random(f"{seed}:{n}")) for n in scenario.aps}
        self.users = {n: _User(d, self._keys(n), random.Random(f"{seed}:{n}")) for n, d in scenario.users.items()}
        self.servers = {n: self._keys(n) for n in scenario.servers}

    def _keys(self, name: str) -> KeyPair:
        return keygen(self.engine, random.Random(f"{self.seed}:key:{name}"))

    def run(self) -> RunResult:
        rows = []
        for ev in self.sc.events:
            self.clock = CLOCK_EPOCH + ev.time
            try:
                outcome, detail = self._dispatch(ev)
            except ZkpolError as exc:
                outcome, detail = type(exc).__name__, str(exc)
            rows.append(LogRow(ev.time, ev.line_no, ev.kind, " ".join(ev.args), outcome, ev.expected,
                               detail.replace("\t", " ")))
        return RunResult(rows, self.ledger)

    def _dispatch(self, ev: Event) -> tuple[str, str]:
        a = ev.args
        if ev.kind == "REQUEST_CERT":
            return self._request_cert(self.users[a[0]], a[1])
        if ev.kind == "MINE":
            _, rng = self.aps[a[0]]
            block = self.ledger.mine_block(a[0], rng, self.clock)
            return "MINED", f"block={block.index} hash={block.block_hash.hex()[:16]} entries={len(block.entries)}"
        if ev.kind == "REQUEST_SERVICE":
            user = self.users[a[0]]
            if user.cert is None:
                return "NoCertificate", "user holds no certificate"
            req = user_request_service(user.cert, int(a[2]), int(a[3]), self.crs)
            user.last = (a[1], req)
            return self._serve(req, a[1])
        if ev.kind == "REPLAY":
            user = self.users[a[0]]
            if user.last is None:
                return "NoRequest", "nothing to replay"
            server, req = user.last
            wire = ServiceRequest.from_bytes(req.to_bytes(), self.engine)
            return self._serve(wire, server)
        return self._tamper(a)

    def _serve(self, req: ServiceRequest, server: str) -> tuple[str, str]:
        grant = server_handle(req, self.crs, self.ledger, self.servers[server].public_bytes())
        return "GRANTED", f"level={int(grant.level)} ind={grant.ind} hr={grant.hr:x}"

    def _request_cert(self, user: _User, ap_name: str, sealed: bytes | None = None,
                      forge_response: bool = False) -> tuple[str, str]:
        ap_keys, ap_rng = self.aps[ap_name]
        decl = self.sc.aps[ap_name]
        if sealed is None:
            sealed = user_request_certificate(user.keys, user.decl.position, ap_keys.pk, user.rng)
        response, digest = ap_issue(ap_keys, decl.position, decl.range_m, sealed, self.clock, ap_rng,
                                    self.ledger, self.crs.hash_params)
        if forge_response:
            # an outsider substitutes its own {rand, time}, sealed to the user but not signed by the AP
            mallory = keygen(self.engine, self.rng)
            body = self.engine.fr.encode(self.engine.fr.random(self.rng).value) + self.clock.to_bytes(8, "big")
            response = sign_and_seal(mallory, user.keys.pk, body, self.rng)
        user.cert = user_assemble_certificate(user.keys, ap_keys.pk, response, user.decl.position)
        return "ISSUED", f"dig={digest.dig:x}"

    def _tamper(self, a: tuple[str, ...]) -> tuple[str, str]:
        kind = a[0]
        if kind in CERT_TAMPERS:
            user = self.users[a[1]]
            ap_keys, _ = self.aps[a[2]]
            body = request_body(user.keys.pk, user.decl.position)
            if kind == "request-body":
                signed = len(body).to_bytes(4, "big") + body + sign(user.keys, body)
                pos = 4 + self.rng.randrange(len(body))
                signed = signed[:pos] + bytes([signed[pos] ^ (1 << self.rng.randrange(8))]) + signed[pos + 1:]
                return self._request_cert(user, a[2], sealed=seal(ap_keys.pk, signed, user.rng))
            if kind == "request-envelope":
                sealed = bytearray(user_request_certificate(user.keys, user.decl.position, ap_keys.pk, user.rng))
                pos = 1 + self.engine.point_size + self.rng.randrange(len(sealed) - 33 - self.engine.point_size)
                sealed[pos] ^= 1 << self.rng.randrange(8)
                return self._request_cert(user, a[2], sealed=bytes(sealed))
            return self._request_cert(user, a[2], forge_response=True)
        if kind == "spoof-pk":
            attacker, victim = self.users[a[1]], self.users[a[2]]
            ap_keys, _ = self.aps[a[3]]
            body = request_body(victim.keys.pk, attacker.decl.position)
            signed = len(body).to_bytes(4, "big") + body + sign(attacker.keys, body)
            return self._request_cert(attacker, a[3], sealed=seal(ap_keys.pk, signed, attacker.rng))

        user = self.users[a[1]]
        server, level, ind = a[2], int(a[3]), int(a[4])
        if kind == "forge-cert":
            fr = self.engine.fr
            cert = LocationCertificate(user.keys.pk, user.decl.position, fr.random(user.rng).value, self.clock)
            req = user_request_service(cert, level, ind, self.crs)
            return self._serve(req, server)
        if user.cert is None:
            return "NoCertificate", "user holds no certificate"
        req = user_request_service(user.cert, level, ind, self.crs)
        if kind == "proof":
            i = self.rng.randrange(8)
            req = ServiceRequest(req.level, req.proof.replace(i, self.engine.random_element(self.rng)),
                                 req.ind, req.hr, req.dig, req.params)
        else:
            req = ServiceRequest(req.level, req.proof, req.ind, (req.hr + 1) % self.engine.r, req.dig, req.params)
        return self._serve(req, server)


def run_scenario(scenario: Scenario, engine: PairingEngine, crs: CrsBundle, seed: int,
                 difficulty: int = 12) -> RunResult:
    return Harness(scenario, engine, crs, seed, difficulty).run()


def setup_for(scenario: Scenario, engine: PairingEngine, seed: int) -> CrsBundle:
    """Deterministic in-memory CRS for the levels a scenario uses."""
    return CrsBundle.generate(engine, sorted(scenario.levels_used()), random.Random(f"{seed}:setup"))

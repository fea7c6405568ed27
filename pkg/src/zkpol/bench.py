"""Per-phase wall-clock timing of the SNARK pipeline on the zk-PoL circuit."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .circuit import compute_witness
from .curve import PairingEngine
from .hashing import AlgebraicHashParams
from .identity import keygen
from .protocol import GeoCoordinate, LocationCertificate, public_inputs_from_params, public_parameters
from .qap import circuit_to_qap
from .snark import prove, setup, verify
from .zkcircuit import CircuitLayout, PrivacyLevel, build_zkpol_circuit, witness_inputs

PHASES = ("Computation-to-QAP", "Setup", "Calculate-witness", "Generate-proof", "Verify-proof")


@dataclass
class BenchResult:
    level: PrivacyLevel
    profile: str
    repetitions: int
    samples: dict[str, list[float]]

    def mean(self, phase: str) -> float:
        xs = self.samples[phase]
        return sum(xs) / len(xs)

    @property
    def total(self) -> float:
        return sum(self.mean(p) for p in PHASES)

    def percent(self, phase: str) -> float:
        return 100.0 * self.mean(phase) / self.total

    def ranking(self) -> list[str]:
        """Phases from largest to smallest mean time."""
        return sorted(PHASES, key=self.mean, reverse=True)


def random_certificate(engine: PairingEngine, rng: random.Random) -> LocationCertificate:
    keys = keygen(engine, rng)
    pos = GeoCoordinate(rng.randint(-180_000_000, 180_000_000), rng.randint(-90_000_000, 90_000_000))
    return LocationCertificate(keys.pk, pos, engine.fr.random(rng).value, rng.randint(1_500_000_000, 2_000_000_000))


def bench_level(engine: PairingEngine, level, repetitions: int = 1, seed: int = 0) -> BenchResult:
    level = PrivacyLevel.parse(level)
    if repetitions < 1:
        raise ValueError("need at least one repetition")
    rng = random.Random(f"{seed}:bench:{int(level)}")
    params = AlgebraicHashParams.for_engine(engine)
    layout = CircuitLayout.for_field(engine.fr, engine.point_size)
    samples: dict[str, list[float]] = {p: [] for p in PHASES}
    clock = time.perf_counter
    for _ in range(repetitions):
        cert = random_certificate(engine, rng)

        t0 = clock()
        circuit = build_zkpol_circuit(level, params, engine.point_size)
        q = circuit_to_qap(circuit)
        t1 = clock()
        pk, vk = setup(q, engine, rng)
        t2 = clock()
        w = compute_witness(circuit, witness_inputs(layout, cert.field_chunks(engine.fr)))
        t3 = clock()
        proof = prove(pk, q, w)
        t4 = clock()
        public = public_inputs_from_params(public_parameters(cert, level), level, layout, engine.fr,
                                           w.public[-2], w.public[-1])
        verdict = verify(vk, public, proof)
        t5 = clock()
        if not verdict:
            raise AssertionError(f"honest proof rejected during benchmark ({verdict.failed})")
        for phase, dt in zip(PHASES, (t1 - t0, t2 - t1, t3 - t2, t4 - t3, t5 - t4)):
            samples[phase].append(dt)
    return BenchResult(level, engine.name, repetitions, samples)


def format_table(results: list[BenchResult]) -> str:
    head = f"{'phase':<20}" + "".join(f"  {f'L{int(r.level)} mean(s)':>10}  {f'L{int(r.level)} %':>6}" for r in results)
    lines = [head, "-" * len(head)]
    for phase in PHASES:
        row = f"{phase:<20}"
        for r in results:
            row += f"  {r.mean(phase):>10.4f}  {r.percent(phase):>6.1f}"
        lines.append(row)
    total = f"{'total':<20}" + "".join(f"  {r.total:>10.4f}  {100.0:>6.1f}" for r in results)
    lines.append(total)
    return "\n".join(lines) + "\n"


def format_tsv(results: list[BenchResult]) -> str:
    lines = ["profile\tlevel\trepetitions\tphase\tmean_s\tpercent"]
    for r in results:
        for phase in PHASES:
            lines.append(f"{r.profile}\t{int(r.level)}\t{r.repetitions}\t{phase}\t{r.mean(phase):.6f}\t{r.percent(phase):.2f}")
    return "\n".join(lines) + "\n"

"""`zkpol` command-line entry point.

Exit codes: 0 when every expected outcome matched, 1 on a mismatch, 2 on
usage, parse or missing-file errors.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from .bench import bench_level, format_table, format_tsv
from .curve import PROFILES, get_engine
from .errors import DecodeError, InvalidLevel, KeyMismatch, ScenarioError
from .identity import export_public_key, export_secret_key, keygen, load_key_file
from .ledger import DEFAULT_DIFFICULTY, Ledger
from .protocol import CrsBundle, ServiceRequest
from .scenario import BUNDLED, load_scenario, parse_scenario, run_scenario, setup_for
from .snark import CRS_MAGIC, PROOF_MAGIC, hexdump
from .zkcircuit import PrivacyLevel

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def default_profile() -> str:
    return os.environ.get("ZKPOL_PROFILE", "oracle")


def parse_levels(text: str) -> list[PrivacyLevel]:
    if text == "all":
        return list(PrivacyLevel)
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(PrivacyLevel.parse(x) for x in range(int(lo), int(hi) + 1))
        else:
            out.append(PrivacyLevel.parse(part))
    return sorted(set(out))


def _engine(args):
    if args.profile not in PROFILES:
        raise UsageError(f"unknown profile {args.profile!r}; choose from {', '.join(sorted(PROFILES))}")
    return get_engine(args.profile)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands ---------------------------------------------------------------

def cmd_keygen(args) -> int:
    engine = _engine(args)
    keys = keygen(engine, random.Random(f"{args.seed}:key:{args.name}"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{args.name}.pub").write_bytes(export_public_key(keys))
    (out / f"{args.name}.key").write_bytes(export_secret_key(keys))
    print(f"{args.name}\t{keys.pk.hex()}")
    return EXIT_OK


def cmd_setup(args) -> int:
    engine = _engine(args)
    levels = parse_levels(args.levels)
    bundle = CrsBundle.generate(engine, levels, random.Random(f"{args.seed}:setup"))
    for path in bundle.save(args.out):
        print(path)
    return EXIT_OK


def _crs_for(args, engine, scenario):
    if args.crs:
        return CrsBundle.load(args.crs, engine, sorted(scenario.levels_used()))
    return setup_for(scenario, engine, args.seed)


def cmd_run(args) -> int:
    engine = _engine(args)
    label, text = load_scenario(args.scenario)
    scenario = parse_scenario(text)
    result = run_scenario(scenario, engine, _crs_for(args, engine, scenario), args.seed, args.difficulty)
    _emit(result.log_text(), args.out)
    if args.ledger:
        result.ledger.save(args.ledger)
    if not result.all_matched:
        bad = sum(not r.matched for r in result.rows)
        print(f"{label}: {bad} event(s) did not match the expected outcome", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_attacks(args) -> int:
    engine = _engine(args)
    status = EXIT_OK
    lines = []
    for name in BUNDLED:
        scenario = parse_scenario(load_scenario(name)[1])
        result = run_scenario(scenario, engine, _crs_for(args, engine, scenario), args.seed, args.difficulty)
        matched = sum(r.matched for r in result.rows)
        ok = result.all_matched
        status = status if ok else EXIT_MISMATCH
        codes = ",".join(sorted({r.outcome for r in result.rows} - {"ISSUED", "MINED", "GRANTED"})) or "-"
        lines.append(f"{name:<20} {'PASS' if ok else 'FAIL'}  {matched}/{len(result.rows)}  {codes}")
    _emit("\n".join(lines) + "\n", args.out)
    return status


def cmd_scenarios(args) -> int:
    if args.show:
        sys.stdout.write(load_scenario(args.show)[1])
    else:
        print("\n".join(BUNDLED))
    return EXIT_OK


def cmd_bench(args) -> int:
    engine = _engine(args)
    results = [bench_level(engine, lv, args.reps, args.seed) for lv in parse_levels(args.levels)]
    print(f"profile {engine.name}, {args.reps} repetition(s)")
    sys.stdout.write(format_table(results))
    if args.tsv:
        Path(args.tsv).write_text(format_tsv(results))
    return EXIT_OK


def cmd_ledger_dump(args) -> int:
    engine = _engine(args)
    ledger = Ledger.load(args.file, engine.fr, args.difficulty)
    for block in ledger.blocks:
        print(block.summary())
    violation = ledger.validate_chain()
    if violation is None:
        print(f"chain ok: {len(ledger)} block(s)")
        return EXIT_OK
    print(f"chain invalid at block {violation.index}: {violation.reason}")
    return EXIT_MISMATCH


def cmd_inspect(args) -> int:
    engine = _engine(args)
    data = Path(args.file).read_bytes()
    magic = data[:8]
    if magic in (CRS_MAGIC, PROOF_MAGIC):
        sys.stdout.write(hexdump(data, engine))
    elif magic == b"ZKPOLKEY":
        key = load_key_file(data, engine)
        kind = "secret" if data[9:10] == b"S" else "public"
        pk = key.pk if kind == "secret" else key
        print(f"{kind} key, profile {engine.name}\npk {pk.hex()}")
    elif magic == b"ZKPOLREQ":
        req = ServiceRequest.from_bytes(data, engine)
        print(f"service request level {int(req.level)} ind {req.ind}\nhr  {req.hr:x}\ndig {req.dig:x}")
        for name, value in req.params.items():
            print(f"{name:<10} {value.hex()}")
        sys.stdout.write(hexdump(req.proof.to_bytes(), engine))
    else:
        raise DecodeError(f"unrecognised file type (magic {magic!r})")
    return EXIT_OK


# --- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", default=default_profile(), help="oracle or realistic (env ZKPOL_PROFILE)")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="zkpol", description="Zero-knowledge proof-of-location toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("keygen", parents=[common], help="generate a network identity")
    s.add_argument("--name", required=True)
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_keygen)

    s = sub.add_parser("setup", parents=[common], help="trusted setup for a set of privacy levels")
    s.add_argument("--levels", default="1-4", help="e.g. 1,3 or 1-4 or all")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_setup)

    for name, func, hlp in (("run", cmd_run, "play a scenario and write its event log"),
                            ("attacks", cmd_attacks, "play every bundled scenario")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        if name == "run":
            s.add_argument("scenario", help="scenario file or bundled name")
            s.add_argument("--ledger", help="write the final chain to this file")
        s.add_argument("--crs", help="directory of key files from `zkpol setup`")
        s.add_argument("--difficulty", type=int, default=DEFAULT_DIFFICULTY)
        s.add_argument("--out", help="write the log here instead of stdout")
        s.set_defaults(func=func)

    s = sub.add_parser("scenarios", help="list bundled scenarios")
    s.add_argument("--show", metavar="NAME")
    s.set_defaults(func=cmd_scenarios)

    s = sub.add_parser("bench", parents=[common], help="per-phase timing table")
    s.add_argument("--levels", default="1")
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--tsv", help="also write a tab-separated dump")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("ledger", help="chain file utilities")
    lsub = s.add_subparsers(dest="ledger_command", required=True)
    d = lsub.add_parser("dump", parents=[common], help="print block summaries and validate")
    d.add_argument("file")
    d.add_argument("--difficulty", type=int, default=DEFAULT_DIFFICULTY)
    d.set_defaults(func=cmd_ledger_dump)

    s = sub.add_parser("inspect", parents=[common], help="hex dump of a key, proof or request file")
    s.add_argument("file")
    s.set_defaults(func=cmd_inspect)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ScenarioError, InvalidLevel, DecodeError, KeyMismatch, FileNotFoundError,
            ValueError) as exc:
        print(f"zkpol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

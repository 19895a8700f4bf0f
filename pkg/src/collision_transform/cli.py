"""Command-line driver.

    collision-transform scan --base 3,7,10,12 --s 1.0,0.8,0.6,0.5 --invariant file:data/S_{b}_{ell}.tsv
    collision-transform verify --base 3,7,10

Exit status: 0 on success, 1 when a check fails, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .characters import build_character_table, dump_character_table
from .config import ConfigError, ScanConfig, load_config
from .invariant import InvariantFormatError, ReflectionViolation, dump_invariant
from .residue_ring import SizeError, build_units_group

COMMANDS = ("transform", "scan", "neutrality", "basesum", "verify",
            "dump-characters", "dump-invariant")


def _csv_ints(text):
    return tuple(int(t) for t in text.split(",") if t.strip())


def _csv_floats(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collision-transform", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="INI file; the section named after the command is read")
        sp.add_argument("--base", type=_csv_ints, help="comma-separated bases")
        sp.add_argument("--lag", type=_csv_ints, help="comma-separated lags")
        sp.add_argument("--s", type=_csv_floats, help="comma-separated s values")
        sp.add_argument("--primes", type=int, help="number of primes beyond m")
        sp.add_argument("--seed", type=int, help="synthetic invariant seed")
        sp.add_argument("--invariant", help="'synthetic:<seed>' or 'file:<template with {b} {ell} {m}>'")
        sp.add_argument("--out", help="output directory (file for dump-* commands)")
        sp.add_argument("--workers", type=int)
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args) -> ScanConfig:
    mode = args.command if args.command in ("transform", "scan", "neutrality", "basesum", "verify") else "scan"
    cfg = load_config(args.config, mode) if args.config else ScanConfig()
    invariant = args.invariant
    if invariant is None and args.seed is not None:
        invariant = f"synthetic:{args.seed}"
    return cfg.with_overrides(bases=args.base, lags=args.lag, s_grid=args.s, prime_count=args.primes,
                              invariant=invariant, out=args.out, workers=args.workers)


def _run(args) -> int:
    cfg = resolve_config(args)
    cmd = args.command
    if cmd == "scan":
        cells = pipeline.run_scan(cfg)
        for c in cells:
            print(f"b={c.b} ell={c.ell} s={c.s}: F_circ={c.f_direct:.6g} "
                  f"(decomposed {c.f_decomposed:.6g}) +{c.sign.positive}/-{c.sign.negative}")
        return 0
    if cmd == "transform":
        ok = True
        for b, ell, rep in pipeline.run_transform(cfg):
            print(f"b={b} ell={ell}: even-max={rep.even_max:.3e} {'pass' if rep.passed else 'FAIL'}")
            ok &= rep.passed
        return 0 if ok else 1
    if cmd == "neutrality":
        ok = True
        for b, ell, rep, mc, _ in pipeline.run_neutrality(cfg):
            if not rep.applicable:
                print(f"b={b} ell={ell} m={rep.modulus}: not applicable (3 | m)")
                continue
            coeffs = f" c0={float(mc.c0):.6g} c1={float(mc.c1):.6g}" if mc.visible else ""
            print(f"b={b} ell={ell} m={rep.modulus}: k*={rep.neutral} mean={rep.neutral_mean} "
                  f"swapped sum={rep.swapped_sum}{coeffs} "
                  f"{'pass' if rep.passed else 'FAIL'}")
            ok &= rep.passed
        return 0 if ok else 1
    if cmd == "basesum":
        bases = cfg.bases if args.base or args.config else tuple(range(3, 32))
        for t in pipeline.run_basesum(cfg, bases=bases):
            print(f"s={t.s}: F_R={t.F_R.final:.6g}")
        return 0
    if cmd == "verify":
        checks = pipeline.verify_suite(cfg)
        for c in checks:
            print(c.line())
        return 0 if all(c.passed for c in checks) else 1
    if cmd == "dump-characters":
        for ell in cfg.lags:
            for b in cfg.bases:
                text = dump_character_table(build_character_table(build_units_group(b, ell)))
                _emit(text, args.out, f"characters_b{b}_l{ell}.csv", len(cfg.bases) * len(cfg.lags))
        return 0
    if cmd == "dump-invariant":
        for ell in cfg.lags:
            for b in cfg.bases:
                text = dump_invariant(pipeline.resolve_invariant(cfg, build_units_group(b, ell)))
                _emit(text, args.out, f"invariant_b{b}_l{ell}.tsv", len(cfg.bases) * len(cfg.lags))
        return 0
    raise AssertionError(cmd)


def _emit(text: str, out, name: str, n: int) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if n > 1 or path.is_dir():
        path.mkdir(parents=True, exist_ok=True)
        path = path / name
    path.write_text(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return _run(args)
    except (ConfigError, SizeError, InvariantFormatError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ReflectionViolation as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line: ``exphmap run <config> [--out DIR]`` and ``exphmap verify [--list] [--paper-literal]``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .config import ConfigError, ScenarioConfig, load_config
from .scenarios import NumericalFailure, run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3
DEFAULT_OUT = "exphmap_out"


def output_dir(cfg: ScenarioConfig, cli_out=None) -> Path:
    """``--out``, then ``[output] dir`` (relative to the config file), then ``$EXPHMAP_OUT``, then the default."""
    if cli_out:
        return Path(cli_out)
    if cfg.out_dir:
        base = cfg.source.parent if cfg.source else Path.cwd()
        return base / cfg.out_dir
    stem = cfg.source.stem if cfg.source else cfg.scenario
    root = os.environ.get("EXPHMAP_OUT") or DEFAULT_OUT
    return Path(root) / stem


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = output_dir(cfg, args.out)
    try:
        result = run_scenario(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"cannot write output to {out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for line in result.report:
        print(line)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import BATTERY, verify_all

    if args.list:
        for it in BATTERY:
            print(f"{it.name:28s} {it.summary}")
        return EXIT_OK
    results = verify_all(literal=args.literal, workers=args.jobs)
    failed = 0
    for it, ok, detail in results:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {it.name:28s} {detail}")
    print(f"{len(results) - failed}/{len(results)} passed")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exphmap", description="Exponentially harmonic maps: scenarios and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("config", help="scenario .ini file")
    run.add_argument("--out", help="output directory (overrides the config and $EXPHMAP_OUT)")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run the verification battery")
    ver.add_argument("--list", action="store_true", help="list the items without running them")
    ver.add_argument("--paper-literal", dest="literal", action="store_true", help="use the radial factor exactly as typeset")
    ver.add_argument("--jobs", type=int, default=1, help="run items on this many threads")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

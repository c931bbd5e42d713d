"""Run every shipped scenario and collect outputs under one directory.

    python3 scripts/reproduce_figures.py [--out DIR] [--only NAME ...]
"""

import argparse
import sys
from pathlib import Path

from exphmap.config import ConfigError, load_config
from exphmap.scenarios import NumericalFailure, run_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures_out", help="output root (default: figures_out)")
    ap.add_argument("--only", nargs="*", help="scenario file stems to run")
    args = ap.parse_args(argv)
    paths = sorted(SCENARIOS.glob("*.ini"))
    if args.only:
        paths = [p for p in paths if p.stem in set(args.only)]
    failed = 0
    for path in paths:
        dest = Path(args.out) / path.stem
        try:
            res = run_scenario(load_config(path), dest)
        except (ConfigError, NumericalFailure) as exc:
            print(f"{path.stem}: FAILED ({exc})", file=sys.stderr)
            failed += 1
            continue
        print(f"{path.stem}: {len(res.plots)} plot(s) -> {dest}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

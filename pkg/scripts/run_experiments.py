#!/usr/bin/env python3
"""Run one or all of the bundled experiment configs.

Usage:
    python3 scripts/run_experiments.py                 # every config, desk profile
    python3 scripts/run_experiments.py mi_vs_rate      # single experiment
    python3 scripts/run_experiments.py --profile paper # full-scale system
"""

import argparse
import sys
from pathlib import Path

from irs_isac import expcli

CONFIG_DIR = Path(__file__).resolve().parent / "configs"


def main() -> int:
    names = sorted(path.stem for path in CONFIG_DIR.glob("*.txt"))
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("experiments", nargs="*", choices=names + [[]], default=names)
    parser.add_argument("--profile", choices=("desk", "paper"), default="desk")
    parser.add_argument("--out", default="results")
    args = parser.parse_args()

    failures = 0
    for name in args.experiments or names:
        out_dir = Path(args.out) / args.profile / name
        print(f"== {name} -> {out_dir}")
        code = expcli.main(
            [
                "run",
                str(CONFIG_DIR / f"{name}.txt"),
                "--profile",
                args.profile,
                "--out",
                str(out_dir),
            ]
        )
        if code != 0:
            print(f"   {name} exited with code {code}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())

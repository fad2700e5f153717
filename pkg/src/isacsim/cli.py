"""Command-line experiment runner.

    isac <experiment> [--config FILE] --out DIR [--seed N] [--trials N] [--workers N]

Each experiment writes one or more CSV files (UTF-8, comma separated, dot
decimal, header row) and a run.json manifest with the fully resolved
configuration into the output directory.  Identical config and seed give
byte-identical outputs regardless of worker count.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import InvalidInput
from .experiments import EXPERIMENTS, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isac",
        description="Batch experiments for chirp-combined OFDM sensing and communication.",
    )
    parser.add_argument(
        "experiment",
        metavar="experiment",
        help="one of: " + ", ".join(EXPERIMENTS),
    )
    parser.add_argument("--config", help="JSON config file overriding the defaults")
    parser.add_argument("--out", required=True, help="output directory for CSVs and run.json")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--trials", type=int, default=None, help="override the trial count")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for trials")
    return parser


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InvalidInput(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.experiment not in EXPERIMENTS:
        print(
            f"isac: unknown experiment {args.experiment!r}; choose one of: "
            + ", ".join(EXPERIMENTS),
            file=sys.stderr,
        )
        return 2
    try:
        config = _load_config(args.config) if args.config else None
        paths = run(
            args.experiment,
            config,
            args.out,
            seed_override=args.seed,
            trials_override=args.trials,
            workers=max(1, args.workers),
        )
    except InvalidInput as exc:
        print(f"isac: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

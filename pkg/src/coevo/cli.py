"""Command-line interface.

One subcommand per experiment kind plus ``validate``::

    coevo nk-walk       --config cfg.json [--replicates N] [--seed S] [--out DIR]
    coevo nk-optima     --config cfg.json ...
    coevo nkc-coevolve  --config cfg.json ...
    coevo wb-run        --config cfg.json ...
    coevo metaga-run    --config cfg.json ...
    coevo validate      --config cfg.json

Run subcommands execute a seeded batch and write ``timeseries.csv``,
``summary.csv``, ``summary.txt`` and the kind's figures into the output
directory. ``validate`` checks a config file and reports the first problem
it finds (exit status 2) or prints the parsed kind (exit status 0).
"""

from __future__ import annotations

import argparse
import sys

from .config import KINDS, load_config
from .engine import run_batch
from .errors import ConfigError, ParameterError, StateError
from .reports import write_reports


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coevo",
        description=(
            "Seeded simulation batches: rugged-landscape walks and optima "
            "counts, multi-species coevolution, a technology-substitution "
            "market, and a self-adapting genetic algorithm."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} batch")
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument(
            "--replicates",
            type=int,
            default=None,
            help="number of replicates (overrides the config)",
        )
        sp.add_argument(
            "--seed",
            type=int,
            default=None,
            help="base seed; replicate i uses seed+i (overrides the config)",
        )
        sp.add_argument(
            "--out",
            default=None,
            help="output directory (default: runs/<kind>)",
        )
        sp.add_argument(
            "--workers",
            type=int,
            default=1,
            help="process count; >1 runs replicates in parallel with "
            "identical results (default: 1)",
        )
        sp.add_argument(
            "--no-figures",
            action="store_true",
            help="skip PNG figures and write only the CSV/text reports",
        )
    val = sub.add_parser("validate", help="check a config file and exit")
    val.add_argument("--config", required=True, help="JSON config file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"OK: valid {config.kind} configuration ({args.config})")
        return 0

    if config.kind != args.command:
        print(
            f"error: config file is for kind {config.kind!r} "
            f"but the {args.command!r} subcommand was invoked",
            file=sys.stderr,
        )
        return 2

    out_dir = args.out if args.out is not None else f"runs/{config.kind}"
    try:
        logs = run_batch(
            config,
            replicates=args.replicates,
            base_seed=args.seed,
            workers=args.workers,
        )
        paths = write_reports(logs, config, out_dir, figures=not args.no_figures)
    except (ParameterError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(f"{config.kind}: {len(logs)} replicate(s), base seed {logs[0].seed}")
    for name in ("timeseries", "summary_csv", "summary_txt"):
        print(f"wrote {paths[name]}")
    for key, path in paths.items():
        if path.suffix == ".png":
            print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

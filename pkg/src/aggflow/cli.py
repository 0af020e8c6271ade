"""Command-line front end.

Exit codes: 0 success, 2 configuration error (message names the offending
key), 3 runtime failure.  Artifact paths go to stdout; progress to stderr
unless --quiet.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .config import ConfigError, load_config
from .harness import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_SUBCOMMAND_KIND = {
    "run": "run",
    "sweep": "sweep_A",
    "relax": "relax",
    "transport-bound": "transport_bound",
    "lp-check": "lp_check",
    "kernel-check": "kernel_check",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aggflow",
        description="pseudo-spectral aggregation-diffusion experiment harness",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("version", help="print the version and exit")
    for name in _SUBCOMMAND_KIND:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--threads", type=int, default=None, help="worker count for sweeps")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    if args.subcommand == "version":
        print(__version__)
        return EXIT_OK

    quiet = args.quiet

    def log(message: str) -> None:
        if not quiet:
            print(message, file=sys.stderr)

    try:
        cfg = load_config(args.config, kind_override=_SUBCOMMAND_KIND[args.subcommand])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = args.out or os.environ.get("AGGFLOW_OUT") or cfg.outdir
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("AGGFLOW_THREADS", "1"))
    if threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    try:
        paths = run_experiment(cfg, outdir=outdir, workers=threads, log=log)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failure contract: exit 3
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    for name in sorted(paths):
        print(paths[name])
    return EXIT_OK


def entry() -> None:
    sys.exit(main())

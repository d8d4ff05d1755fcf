"""Command line entry point: ``resolab run <config> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import MODES, load_config
from .errors import ConfigError, ResolabError
from .harness import EXIT_CONFIG, EXIT_SOLVER, emit, run

log = logging.getLogger("resolab")


def build_parser():
    parser = argparse.ArgumentParser(prog="resolab",
                                     description="Resonance sweeps near a level crossing.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a sweep described by a YAML config")
    p.add_argument("config", help="path to the YAML configuration")
    p.add_argument("--mode", choices=MODES, help="override the mode in the config")
    p.add_argument("--out", help="output directory (overrides RESOLAB_OUT and the config)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the h sweep")
    p.add_argument("--seedless", action="store_true",
                   help="locate zeros by box bisection instead of asymptotic seeds")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.jobs < 1:
        print("resolab: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, mode=args.mode, out=args.out)
    except ConfigError as exc:
        print(f"resolab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run(cfg, jobs=args.jobs, seedless=args.seedless)
    except ResolabError as exc:
        print(f"resolab: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    paths = emit(report, cfg.output_dir)
    for check in report.identity_checks + report.checks:
        print(f"{'PASS' if check['pass'] else 'FAIL'} {check['name']}: {check['value']}")
    for err in report.errors:
        print(f"ERROR {err}", file=sys.stderr)
    log.info("wrote %s", ", ".join(paths))
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point ``rlab``.

Exit codes: 0 success, 1 prediction failure in ``verify``, 2 usage error,
3 capacity or insufficient data.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .config import KINDS, MAX_SEED, load
from .errors import CapacityError, InsufficientDataError, UsageError
from .harness import EXIT_CAPACITY, EXIT_OK, EXIT_USAGE, check_outputs, run, write_outputs


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", required=True, help="TOML experiment file")
        p.add_argument("--seed", type=_u64, help="override the master seed")
        p.add_argument("--out", help="output directory (default: config 'out' or ./results)")
        p.add_argument("--threads", type=_positive, help="worker threads")
        p.add_argument("--gnuplot", action="store_true", help="also write two-column .dat files")
    p = sub.add_parser("check", help="recompute hashes recorded in a JSON summary")
    p.add_argument("summary", help="path to a <kind>.json summary")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "check":
        try:
            problems = check_outputs(args.summary)
        except (OSError, ValueError) as exc:
            print(f"rlab: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for p in problems:
            print(p)
        return 1 if problems else EXIT_OK
    try:
        cfg = load(args.config, seed=args.seed, threads=args.threads, out=args.out,
                   gnuplot=True if args.gnuplot else None)
        # the subcommand decides what runs; the file may describe any kind
        cfg.kind = args.command
        result = run(cfg)
    except UsageError as exc:
        print(f"rlab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, InsufficientDataError) as exc:
        print(f"rlab: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    path = write_outputs(result, cfg.out)
    headline = {k: v for k, v in result.summary.items() if not isinstance(v, (list, dict))}
    print(json.dumps({"summary": str(path), **headline}, default=str, ensure_ascii=False))
    for key, p in result.summary.get("predictions", {}).items():
        status = "ERROR" if p["passed"] is None else "PASS" if p["passed"] else "FAIL"
        print(f"  ({key}) {status:5s} {p['name']}: {p['value']} (target {p['target']}) {p['detail']}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

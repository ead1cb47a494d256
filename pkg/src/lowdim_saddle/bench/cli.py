"""Command line: ``bench run``, ``bench table`` and ``bench verify``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import BenchConfig, ConfigError
from .runner import run_matrix
from .tables import parse_csv, render_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TIMEOUT = 3

log = logging.getLogger("lowdim_saddle.bench")


def _acceptance_path() -> Path:
    # src/lowdim_saddle/bench/cli.py -> repository root
    return Path(__file__).resolve().parents[3] / "tests" / "test_acceptance.py"


def cmd_run(args) -> int:
    try:
        cfg = BenchConfig.load(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seeds=[args.seed])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    reports = run_matrix(cfg)
    text = render_table(reports, args.format)
    out = args.out or cfg.output
    if out:
        Path(out).write_text(text)
        log.info("wrote %d reports to %s", len(reports), out)
    else:
        sys.stdout.write(text)
    if args.strict and any(r.timed_out for r in reports):
        print("one or more cells timed out", file=sys.stderr)
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_table(args) -> int:
    try:
        reports = parse_csv(Path(args.input).read_text())
    except (OSError, ValueError) as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not reports:
        print("no rows in input", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(render_table(reports, args.format))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite != "acceptance":
        print(f"unknown suite {args.suite!r}", file=sys.stderr)
        return EXIT_CONFIG
    path = _acceptance_path()
    if not path.exists():
        print(f"acceptance suite not found at {path}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        import pytest
    except ImportError:
        print("pytest is required for bench verify", file=sys.stderr)
        return EXIT_CONFIG
    return int(pytest.main([str(path), "-q", "-p", "no:cacheprovider"]))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bench", description="Benchmark harness for the saddle-point solvers.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a method x epsilon x instance matrix")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--seed", type=int)
    r.add_argument("--format", choices=("csv", "md"), default="csv")
    r.add_argument("--strict", action="store_true", help="exit 3 if any cell timed out")
    r.set_defaults(func=cmd_run)

    t = sub.add_parser("table", help="render a CSV of reports")
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--format", choices=("csv", "md"), default="md")
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("verify", help="run a test suite")
    v.add_argument("--suite", default="acceptance")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

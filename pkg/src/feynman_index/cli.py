"""Command-line entry point ``feynman-index``.

Usage::

    feynman-index <command> [--config PATH] [--out DIR] [--seed N]

Writes ``report.json``, ``checks.csv`` and ``timing.json`` to the output
directory. The exit status is 0 when every check passes, 1 when any check
fails and 2 for an invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import COMMANDS, load_config, parse_config
from .errors import OperationError
from .report import CHECK_COLUMNS, check_rows, emit_csv, emit_report, emit_timing
from .suite import run

__all__ = ["main", "build_parser", "OUT_ENV"]

OUT_ENV = "FEYNMAN_INDEX_OUT"

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feynman-index",
        description="Spectral invariants, Feynman propagators and index checks for Dirac operators on cylinders.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="UTF-8 JSON configuration (optional for full-suite)")
    parser.add_argument("--out", type=Path, help=f"output directory (overrides ${OUT_ENV} and the config)")
    parser.add_argument("--seed", type=_seed, help="seed for the random-matrix checks")
    parser.add_argument("--quiet", action="store_true", help="print only the summary line")
    return parser


def _output_dir(cli_out, config_out) -> Path:
    if cli_out is not None:
        return Path(cli_out)
    env = os.environ.get(OUT_ENV)
    if env:
        return Path(env)
    return Path(config_out) if config_out else Path(".")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            config = parse_config({}, args.command, args.seed)
        else:
            config = load_config(args.config, args.command, args.seed)
    except OperationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = _output_dir(args.out, config.out)
    timings: dict = {}
    report = run(config, timings)
    emit_report(report, out_dir / "report.json")
    emit_csv(check_rows(report), out_dir / "checks.csv", CHECK_COLUMNS)
    emit_timing(timings, out_dir / "timing.json")

    if not args.quiet:
        for check in report.checks:
            status = "PASS" if check.passed else "FAIL"
            extra = f"  [{check.error}]" if check.error else ""
            deviation = "n/a" if check.deviation is None else f"{check.deviation:.3e}"
            print(f"{status} {check.name}  deviation={deviation} tol={check.tolerance:.1e}{extra}")
    failed = len(report.failures())
    print(json.dumps({"command": report.command, "checks": len(report.checks), "failed": failed,
                      "report": str(out_dir / "report.json")}))
    return EXIT_OK if failed == 0 else EXIT_FAILED


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

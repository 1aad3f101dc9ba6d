"""``nctorus run <suite>``: run a verification suite and write its report."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .suites import SUITES, ConfigError, SuiteConfig, load_theta, run_suite

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _pairs(items: List[str], cast, what: str) -> Dict[str, object]:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ConfigError(f"{what} must look like name=value, got {item!r}")
        try:
            out[name] = cast(value)
        except ValueError as exc:
            raise ConfigError(f"bad value in {item!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nctorus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a named suite")
    run.add_argument("suite", choices=sorted(SUITES) + ["all"])
    run.add_argument("--theta", help="JSON matrix file or bundled fixture name")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                     help="override a tolerance, e.g. exact=1e-13")
    run.add_argument("--trunc", action="append", default=[], metavar="NAME=VALUE",
                     help="override a truncation: lwindow, N or fourier_cutoff")
    run.add_argument("--out", help="JSON report path (default report-<suite>.json)")
    run.add_argument("--csv", action="store_true", help="also write a CSV next to the JSON report")
    return parser


def config_from_args(args: argparse.Namespace) -> SuiteConfig:
    theta, label = (None, "default") if args.theta is None else load_theta(args.theta)
    return SuiteConfig(args.suite, theta, label, args.seed, _pairs(args.tol, float, "--tol"),
                       _pairs(args.trunc, int, "--trunc"))


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run_suite(cfg)
    except ValueError as exc:
        # ConfigError, or an input the constructions reject (e.g. a degenerate theta)
        print(f"nctorus: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or f"report-{args.suite}.json")
    out.write_text(report.to_json() + "\n")
    if args.csv:
        out.with_suffix(".csv").write_text(report.to_csv())
    print(report.table())
    return EXIT_OK if report.passed else EXIT_FAILED


def main() -> None:
    sys.exit(run())

"""
qtemporal command line.

Usage:
- `python -m qtemporal chsh --regime nsit --level 1`
- `python -m qtemporal qrac --n 2 --regime dim-rank --dim 2 --rank 1 --level 1`
- `python -m qtemporal tsr-curve --regime nsit --points 41`
- `python -m qtemporal --config run.json`
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from qtemporal.apps.regimes import REGIME_TAGS
from qtemporal.cli.config import RunConfig, build_config, load_config_file
from qtemporal.cli.runner import run
from qtemporal.core.errors import QTemporalError
from qtemporal.core.tolerances import validate_tolerances


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parent.add_argument("--level", type=int, help="Hierarchy level (default: 1).")
    parent.add_argument("--seed", type=int, help="Seed of the sampled span (default: 0).")
    parent.add_argument("--tol", type=float, help="Solver tolerance (default: 1e-8).")
    parent.add_argument("--output-dir", dest="output_dir", type=Path, help="Directory for CSV and manifest.")
    return parent


def _regime_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parent.add_argument("--regime", choices=REGIME_TAGS, help="Constraint regime.")
    parent.add_argument("--dim", type=int, help="Hilbert-space dimension d for dim regimes.")
    parent.add_argument("--rank", type=int, help="Measurement rank k for dim-rank.")
    return parent


def _curve_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parent.add_argument("--grid", type=float, nargs="+", help="Explicit grid values.")
    parent.add_argument("--points", type=int, help="Evenly spaced grid points (default: 41).")
    parent.add_argument("--workers", type=int, help="Worker threads (default: QTEMPORAL_WORKERS).")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtemporal",
        description="Moment-matrix bounds on temporal quantum correlations.",
    )
    parser.add_argument("--verbose", "-v", action="count", default=0, help="-v for progress, -vv for solver iterations.")
    parser.add_argument("--config", type=Path, help="JSON config file with RunConfig fields instead of a subcommand.")

    common, regime, curve = _common_parent(), _regime_parent(), _curve_parent()
    sub = parser.add_subparsers(dest="application", metavar="APPLICATION")

    sub.add_parser("chsh", parents=[common, regime], help="Upper bound on the temporal CHSH value.")

    tsr = sub.add_parser("tsr", parents=[common, regime], help="Steering robustness bound for a table.")
    tsr.add_argument("--input", type=Path, required=True, help="Correlation table JSON.")

    sub.add_parser("tsr-curve", parents=[common, regime, curve], help="Robustness bound over K_CHSH values.")

    qrac = sub.add_parser("qrac", parents=[common, regime], help="Upper bound on the n->1 success probability.")
    qrac.add_argument("--n", type=int, default=argparse.SUPPRESS, help="Encoded bits, 2 or 3.")

    selftest = sub.add_parser(
        "selftest",
        parents=[common, regime, curve],
        help="Fidelity lower bound from the 2->1 success probability (curve without --observed/--input).",
    )
    selftest.add_argument("--observed", type=float, default=argparse.SUPPRESS, help="Observed P_2->1.")
    selftest.add_argument("--input", type=Path, default=argparse.SUPPRESS, help="Observed table JSON.")
    selftest.set_defaults(level=2)

    sub.add_parser("classical-fidelity", parents=[common], help="Best fidelity with diagonal states (LP).")

    span = sub.add_parser("sample-span", parents=[common, regime], help="Pre-build and cache a span.")
    span.add_argument("--scenario", choices=("chsh", "qrac2", "qrac3"), default=argparse.SUPPRESS)

    sub.add_parser("verify-oracle", parents=[common], help="Born-rule cross-check of the bundled realizations.")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        if args.application is not None:
            raise QTemporalError("Give either a subcommand or --config, not both")
        return load_config_file(args.config)
    if args.application is None:
        raise QTemporalError("No application given; choose a subcommand or pass --config")
    values = {key: value for key, value in vars(args).items() if key not in ("verbose", "config")}
    return build_config(values)


def parse_config(argv: Sequence[str] | None = None) -> RunConfig:
    return config_from_args(build_parser().parse_args(argv))


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    validate_tolerances()
    try:
        config = config_from_args(args)
        return run(config)
    except QTemporalError as exc:
        print(f"qtemporal: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

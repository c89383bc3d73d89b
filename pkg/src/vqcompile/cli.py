"""Command-line front-end.

Usage:
    vqcompile <data-gen|compile|dynamics|resource-compare|verify> \
        --config CONFIG.json --output-dir DIR

All experiment parameters live in the config document; the flags only pick
the config, the experiment kind, and where outputs go. Exit codes: 0 on
success, 2 for configuration errors, 3 for numerical failures, 1 for
anything unexpected.

``VQCOMPILE_NUM_THREADS`` (the only honored environment variable) caps the
BLAS thread pools before numpy loads; runs are otherwise insensitive to the
environment.
"""

from __future__ import annotations

import argparse
import os
import sys


def _apply_thread_override() -> None:
    threads = os.environ.get("VQCOMPILE_NUM_THREADS")
    if not threads:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, threads)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqcompile",
        description="Compile short-time many-body dynamics into shallow brickwall circuits.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind, text in (
        ("data-gen", "generate train/test datasets of time-evolved states"),
        ("compile", "warm start and train a circuit against a dataset"),
        ("dynamics", "repeatedly apply a compiled circuit and record observables"),
        ("resource-compare", "risk-vs-CNOT table across circuits and Trotter baselines"),
        ("verify", "dense verification report: infidelity, identities, risk bounds"),
    ):
        cmd = sub.add_parser(kind, help=text)
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--output-dir", required=True, help="directory for output files")
    return parser


def main(argv: list[str] | None = None) -> int:
    _apply_thread_override()
    args = build_parser().parse_args(argv)

    # Imported after the thread override so BLAS pools see the cap.
    from .errors import (
        BondDimensionError,
        ConfigError,
        DecompositionError,
        NumericalError,
        VqcError,
    )
    from .experiments import run_experiment

    try:
        run_experiment(args.config, args.kind, args.output_dir)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, BondDimensionError, DecompositionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except VqcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 when every sweep row failed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .model import build_mode_set
from .rates import optimal_drive_frequency
from .sweep import ConfigError, load_sweep_config, run_sweep, scalability_report

TWO_PI = 2.0 * np.pi


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wstate-forge",
        description="steady-state fidelity sweeps for dissipatively stabilized spin waves",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep_p = sub.add_parser("sweep", help="scan drive frequency and write a CSV of fidelities")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--output", required=True)
    sweep_p.add_argument("--seed", type=int, default=None)
    sweep_p.add_argument("--solver", choices=("rate", "lindblad"), default=None)
    sweep_p.add_argument("--manifolds", type=int, default=None)
    sweep_p.add_argument("--threads", type=int, default=1)

    opt_p = sub.add_parser("optimal-wd", help="print the resonant drive frequency for a target")
    opt_p.add_argument("--config", required=True)
    opt_p.add_argument("--target", type=int, required=True)
    opt_p.add_argument("--mode", type=int, required=True)

    scal_p = sub.add_parser("scalability", help="report size and resolvability limits")
    scal_p.add_argument("--config", required=True)
    return parser


def _cmd_sweep(args) -> int:
    config = load_sweep_config(args.config)
    if args.solver is not None:
        config.solver = args.solver
    if args.manifolds is not None:
        config.manifolds = args.manifolds
    result = run_sweep(config, seed=args.seed, threads=args.threads)
    result.to_csv(args.output)
    n_failed = sum(1 for r in result.rows if r.solver == "failed")
    print(f"wrote {len(result.rows)} rows to {args.output} ({n_failed} failed)")
    if result.rows and result.all_failed:
        return 3
    return 0


def _cmd_optimal_wd(args) -> int:
    config = load_sweep_config(args.config)
    params = config.system
    modes = build_mode_set(params)
    probe = config.base_drive(params.omega_c + params.delta / 2)
    try:
        omega = optimal_drive_frequency(params, modes, probe, args.target, args.mode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print("%.12g" % (omega / TWO_PI))
    return 0


def _cmd_scalability(args) -> int:
    config = load_sweep_config(args.config)
    print(scalability_report(config.system).format())
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "sweep": _cmd_sweep,
        "optimal-wd": _cmd_optimal_wd,
        "scalability": _cmd_scalability,
    }[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

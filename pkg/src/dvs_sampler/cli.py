"""Command-line entry points: run, sweep, probe-scaling, verify-fim."""

from __future__ import annotations

import argparse
import sys

from .errors import DvsSamplerError
from .harness import RunConfig, probe_scaling, run_experiment, sweep_experiment
from .verify import verify_fim


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dvs-sampler",
        description="Adaptive reverse-time SDE sampling experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a JSON config")
    run_p.add_argument("--config", required=True, help="path to the JSON run config")

    sweep_p = sub.add_parser("sweep", help="re-run an experiment over controller values")
    sweep_p.add_argument("--config", required=True)
    sweep_p.add_argument("--param", required=True, help="controller parameter, e.g. gamma")
    sweep_p.add_argument("--values", required=True, help="comma-separated values")

    probe_p = sub.add_parser("probe-scaling", help="drift/noise variation scaling probe")
    probe_p.add_argument("--config", required=True)
    probe_p.add_argument("--t", type=float, default=None, help="probe time (default T/2)")
    probe_p.add_argument("--dt-grid", default="1e-2,1e-3,1e-4,1e-5")
    probe_p.add_argument("--reps", type=int, default=10_000)

    fim_p = sub.add_parser("verify-fim", help="check the Fisher-information closed forms")
    fim_p.add_argument("--g", type=float, required=True)
    fim_p.add_argument("--dt", type=float, required=True)
    fim_p.add_argument("--dim", type=int, required=True)
    fim_p.add_argument("--samples", type=int, required=True)
    fim_p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            run_experiment(RunConfig.from_json(args.config))
            return 0
        if args.command == "sweep":
            config = RunConfig.from_json(args.config)
            sweep_experiment(config, args.param, _parse_floats(args.values))
            return 0
        if args.command == "probe-scaling":
            config = RunConfig.from_json(args.config)
            probe_scaling(config, t=args.t, dt_grid=_parse_floats(args.dt_grid),
                          n_reps=args.reps)
            return 0
        result = verify_fim(args.g, args.dt, args.dim, args.samples, seed=args.seed)
        print("estimated joint FIM:")
        print(result.matrix)
        print("closed form:")
        print(result.expected)
        print(f"max diagonal relative error: {result.diag_rel_err:.4%}")
        print(f"max off-diagonal |z|-score: {result.offdiag_max_sigma:.2f}")
        print("PASS" if result.ok else "FAIL")
        return 0 if result.ok else 1
    except DvsSamplerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

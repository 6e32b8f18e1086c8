import argparse
import logging
import sys

from src.api.cli.views import cmd_estimate, cmd_policy_check, cmd_run, cmd_simulate
from src.core import __version__
from src.core.kinds import CovarianceKind
from src.core.settings import get_log_level
from src.core.spectrum.entities import TruncationPolicy


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="m2spec",
        description="Truncated periodogram estimation of multivariate multidimensional spectra",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a Monte Carlo sweep")
    run.add_argument("--config", required=True, help="JSON experiment config")
    run.add_argument("--workers", type=int, help="worker threads (default $M2SPEC_WORKERS)")
    run.add_argument("--dry-run", action="store_true", help="print the plan, write nothing")
    run.add_argument("--out", help="output directory (default: config output_dir)")
    run.add_argument("--seed", type=int, help="override base_seed")
    run.add_argument(
        "--export-trial",
        action="store_true",
        help="also write the estimates of trial 0 at the largest N",
    )

    estimate = commands.add_parser("estimate", help="estimate the spectrum of a stored field")
    estimate.add_argument("input", help="FieldSample CSV")
    estimate.add_argument(
        "--policy", type=TruncationPolicy.parse, default=TruncationPolicy.cube_root()
    )
    estimate.add_argument(
        "--kind",
        type=CovarianceKind,
        choices=[CovarianceKind.BIASED, CovarianceKind.UNBIASED],
        default=CovarianceKind.BIASED,
    )
    estimate.add_argument("--grid", type=int, help="grid points per dimension")
    estimate.add_argument("--out", help="spectrum CSV path")
    estimate.add_argument("--workers", type=int)
    estimate.add_argument("--covariances", help="also write the sample covariances to this CSV")

    simulate = commands.add_parser("simulate", help="write one field of an experiment's model")
    simulate.add_argument("--config", required=True)
    simulate.add_argument("--N", type=int, required=True, help="samples per dimension")
    simulate.add_argument("--out", required=True)
    simulate.add_argument("--seed", type=int)

    policy_check = commands.add_parser("policy-check", help="print n = f(N) and the verdict")
    policy_check.add_argument("policy", type=TruncationPolicy.parse)
    policy_check.add_argument("N", type=int, nargs="+")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else get_log_level(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    match args.command:
        case "run":
            return cmd_run(
                args.config, args.workers, args.dry_run, args.out, args.seed, args.export_trial
            )
        case "estimate":
            return cmd_estimate(
                args.input,
                args.policy,
                args.kind,
                args.grid,
                args.out,
                args.workers,
                args.covariances,
            )
        case "simulate":
            return cmd_simulate(args.config, args.N, args.out, args.seed)
        case "policy-check":
            return cmd_policy_check(args.policy, args.N)


if __name__ == "__main__":
    sys.exit(main())

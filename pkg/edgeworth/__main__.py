"""Main entry point for the expansion engine."""

import sys
import argparse
import logging

from edgeworth import commands, config
from edgeworth.config import load_experiment_config
from edgeworth.errors import EdgeworthError
from edgeworth.logger import set_log_level
from edgeworth.oracle import regenerate_fixtures

logger = logging.getLogger(__name__)

DEFAULT_FIXTURES = "tests/fixtures/derived_values.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgeworth",
        description="First-order expansion of discretization errors of Ito integrals",
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug mode")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("run", "Run a convergence study and write the report CSV"),
        ("check-clt", "Compare the variance of sqrt(n)(V0^n - V0) with its limit"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("config", help="Experiment config file (JSON)")
        cmd.add_argument("--seed", type=int, help="Override the config seed")
        cmd.add_argument("--threads", type=int, help="Override the worker thread count")
        cmd.add_argument("--out", help="Override the output CSV path")

    cmd = sub.add_parser("plot", help="Render a report CSV as an SVG chart")
    cmd.add_argument("csv", help="Report CSV written by run")
    cmd.add_argument("svg", help="Output SVG path")

    cmd = sub.add_parser("selftest", help="Run the fast invariant suite")
    cmd.add_argument("--threads", type=int, default=config.THREADS, help="Threads for the determinism check")

    cmd = sub.add_parser("fixtures", help="Regenerate the pinned derived values")
    cmd.add_argument("--out", default=DEFAULT_FIXTURES, help="Fixtures JSON path")
    return parser


def dispatch(args: argparse.Namespace) -> int:
    if args.command in ("run", "check-clt"):
        experiment = load_experiment_config(
            args.config,
            seed=args.seed,
            threads=args.threads,
            output=args.out,
            require_test_function=args.command == "run",
        )
        logger.info(f"Loaded {args.config}: {experiment}")
        if args.command == "run":
            return commands.run(experiment)
        return commands.check_clt(experiment)
    if args.command == "plot":
        return commands.plot(args.csv, args.svg)
    if args.command == "selftest":
        return commands.selftest(args.threads)
    regenerate_fixtures(args.out)
    return 0


def main(argv=None):
    """Main entry point."""
    args = build_parser().parse_args(argv)
    if args.debug:
        set_log_level(logging.INFO)
        logger.info("Debug mode enabled")

    try:
        code = dispatch(args)
    except EdgeworthError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.exit(e.exit_code)
    except Exception as e:
        logger.error(f"Critical error in main: {e}", exc_info=True)
        sys.exit(1)
    sys.exit(code)


if __name__ == "__main__":
    main()

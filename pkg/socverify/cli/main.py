"""
Command-line interface of socverify.

Usage:
    socverify check --problem P1
    socverify pmp --problem P3 --grid-n 2000 --out results
    socverify chatter --problem P1 --eps-list 0.25,0.125,0.0625 --probe 2

Exit codes: 0 when every checked condition holds, 1 when a necessary
condition is violated, 2 for configuration errors, 3 when an internal
consistency check fails.
"""

import argparse
import sys
from collections.abc import Sequence
from typing import Any

from dotenv import load_dotenv

from ..errors import (
    ConfigError,
    DegenerateFamilyError,
    DomainError,
    IntegrityError,
    ResolutionError,
    SocVerifyError,
)
from ..utils.logging_config import get_logger, setup_logging
from ..utils.version import get_version
from .config import load_run_config
from .runner import COMMANDS, run

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_CONFIG = 2
EXIT_INTEGRITY = 3

COMMAND_HELP = {
    "check": "full pipeline: maximum condition, second-order conditions, sufficient fit",
    "pmp": "maximum condition and singular sets only",
    "soc": "maximum condition and second-order necessary conditions",
    "sufficient": "maximum condition and the beta fit with quadratic growth",
    "chatter": "chattering convergence suite",
    "quotients": "difference-quotient convergence, quotient oracles and a priori bounds",
    "audit": "derivative and regularity audit of the problem data",
}


def float_list(text: str) -> tuple[float, ...]:
    """Parse a comma-separated list of floats."""
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from e
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _shared_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", default=None, help="TOML run file (created with defaults if missing)")
    parent.add_argument("--problem", dest="problem_id", default=None, help="built-in problem: P1, P2 or P3")
    parent.add_argument("--grid-n", dest="grid_n", type=int, default=None, help="grid intervals (even, >= 10)")
    parent.add_argument("--domain-samples", dest="domain_samples", type=int, default=None)
    parent.add_argument("--out", dest="output_dir", default=None, help="report root directory")
    parent.add_argument("--probe", type=int, default=None, help="domain index of the constant probe control")
    parent.add_argument("--suites", action="store_true", default=None, help="run relaxation suites in check")
    parent.add_argument("--eta-pmp", dest="eta_pmp", type=float, default=None)
    parent.add_argument("--eta-soc", dest="eta_soc", type=float, default=None)
    parent.add_argument("--tol-fd", dest="tol_fd", type=float, default=None)
    parent.add_argument("--tol-inv", dest="tol_inv", type=float, default=None)
    parent.add_argument("--tol-growth", dest="tol_growth", type=float, default=None)
    parent.add_argument("--alpha-list", dest="alpha_list", type=float_list, default=None)
    parent.add_argument("--eps-list", dest="eps_list", type=float_list, default=None)
    parent.add_argument("--chatter-alpha", dest="chatter_alpha", type=float, default=None)
    parent.add_argument(
        "--no-constants", dest="family_constants", action="store_false", default=None,
        help="leave constant controls out of the family",
    )
    parent.add_argument("--switches", dest="family_switches", type=int, default=None)
    parent.add_argument("--random", dest="family_random", type=int, default=None)
    parent.add_argument("--seed", type=int, default=None, help="seed of the random family members")
    parent.add_argument("--eps0", type=float, default=None, help="growth-check neighbourhood radius")
    parent.add_argument("--audit-samples", dest="audit_samples", type=int, default=None)
    parent.add_argument("--audit-seed", dest="audit_seed", type=int, default=None)
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per pipeline."""
    parser = argparse.ArgumentParser(
        prog="socverify",
        description="Numerical verification of first- and second-order optimality conditions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    commands = parser.add_subparsers(dest="command", required=True)
    parent = _shared_options()
    for name in COMMANDS:
        commands.add_parser(name, parents=[parent], help=COMMAND_HELP[name])
    return parser


def overrides_from(args: argparse.Namespace) -> dict[str, Any]:
    """RunConfig field values given on the command line."""
    skip = {"command", "config"}
    return {key: value for key, value in vars(args).items() if key not in skip and value is not None}


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run one subcommand and translate the outcome into an exit code.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:]).

    Returns:
        int: 0, 1, 2 or 3 as described in the module docstring.
    """
    args = build_parser().parse_args(argv)
    try:
        config = load_run_config(args.config, overrides_from(args))
        verdict = run(config, args.command)
    except (ConfigError, DomainError, ResolutionError, DegenerateFamilyError) as e:
        logger.error(f"configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrityError as e:
        logger.error(f"integrity check failed: {e}")
        print(f"integrity error: {e}", file=sys.stderr)
        return EXIT_INTEGRITY
    except SocVerifyError as e:
        logger.error(f"numerical failure: {e}")
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_INTEGRITY

    for key in ("pmp", "soc_necessary", "pointwise", "sufficient", "sufficient_constants", "audit"):
        value = getattr(verdict, key)
        if value is not None:
            print(f"{key}: {value}")
    print("Wrote", config.problem_dir / "verdict.json")
    return verdict.exit_code


def console_main() -> int:
    """Entry point of the installed `socverify` script: load .env, configure logging, run."""
    load_dotenv()
    setup_logging()
    return main()


if __name__ == "__main__":
    raise SystemExit(console_main())

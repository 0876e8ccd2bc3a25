"""Command-line entry point: ``python -m treeopt <command> ...``.

Exit codes: 0 success, 2 input error, 3 infeasible, 4 comparison failure.
Results go to standard output, diagnostics and logs to standard error.
"""

import argparse
import logging

from pydantic import ValidationError

from treeopt.cli.commands import compare, decompose, generate, solve
from treeopt.cli.common import ExitCode, error
from treeopt.core.config import APP_VERSION, settings
from treeopt.core.errors import TreeOptError
from treeopt.core.log import configure_logging
from treeopt.schemas.options import GeneratorParams, RunConfig

logger = logging.getLogger(__name__)

COMMANDS = {
    "decompose": decompose,
    "solve": solve,
    "gen": generate,
    "compare": compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeopt",
        description="Exact 0/1 linear optimisation by dynamic programming over tree decompositions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help=f"Log level on standard error (default {settings.log_level})",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS.values():
        module.register(subparsers)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {
        name: value
        for name, value in vars(args).items()
        if name in RunConfig.model_fields and value is not None
    }
    if getattr(args, "ordering_file", None) is not None:
        fields["ordering"] = "file"
    if args.command == "gen":
        fields["generator"] = GeneratorParams(
            n=args.n,
            m=args.m,
            max_support=args.max_support,
            coef_lo=args.coef[0],
            coef_hi=args.coef[1],
            seed=args.seed,
        )
    return RunConfig(**fields)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(settings, args.log_level)

    try:
        config = config_from_args(args)
        return int(COMMANDS[config.command].run(config))
    except ValidationError as e:
        error(f"invalid arguments: {e}")
    except (TreeOptError, OSError) as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        error(str(e))
    return ExitCode.INPUT_ERROR

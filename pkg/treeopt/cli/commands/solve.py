import logging
import sys
from pathlib import Path

from treeopt.cli.commands.decompose import add_ordering_flags
from treeopt.cli.common import ExitCode, error, open_output, read_instance, read_ordering
from treeopt.core.config import settings
from treeopt.schemas.options import RunConfig, SolveOptions
from treeopt.schemas.result import BlockStrategy, OracleResult, SolveResult, SolveStatus
from treeopt.services.dp_solver import run_pipeline, trace_records, write_trace
from treeopt.services.oracle import brute_force

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "solve",
        help="Solve an instance",
        description=(
            "Print the status line ('OPTIMAL <z>' or 'INFEASIBLE'), the assignment "
            "and a stats line. Exit 0 when optimal, 3 when infeasible."
        ),
    )
    parser.add_argument("--input", type=Path, required=True)
    parser.add_argument(
        "--method",
        choices=["td", "implicit-family", "brute"],
        default="td",
        help="implicit-family is td with the implicit-reuse block strategy",
    )
    parser.add_argument(
        "--block",
        choices=[s.value for s in BlockStrategy],
        default=settings.block_strategy,
        help="Per-bag strategy for the td method",
    )
    add_ordering_flags(parser)
    parser.add_argument("--trace", type=Path, default=None, help="Write h-tables as JSON lines (post-order)")
    parser.add_argument("--stats-file", type=Path, default=None, help="Write per-bag block stats as JSON lines")
    parser.add_argument("--json", dest="as_json", action="store_true", help="Print the full result as JSON")
    parser.set_defaults(command="solve")


def _print_result(result: SolveResult, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(result.model_dump_json() + "\n")
        return
    if result.status == SolveStatus.OPTIMAL:
        print(f"{result.status.value} {result.objective}")
        print(" ".join(str(v) for v in result.assignment))
    else:
        print(result.status.value)
    if isinstance(result, OracleResult):
        print(f"enumerated {result.enumerated}")
    else:
        print("stats " + result.stats.model_dump_json(exclude={"blocks"}))


def run(config: RunConfig) -> int:
    instance = read_instance(config.input)

    if config.method == "brute":
        if config.trace is not None or config.stats_file is not None:
            error("--trace and --stats-file need a tree-decomposition method")
            return ExitCode.INPUT_ERROR
        result: SolveResult = brute_force(instance)
    else:
        strategy = BlockStrategy.IMPLICIT_REUSE if config.method == "implicit-family" else config.block
        ordering = None
        if config.ordering == "file":
            ordering = list(read_ordering(config.ordering_file, instance.n).order)
        pipeline = run_pipeline(instance, SolveOptions(block_strategy=strategy, ordering=ordering))
        result = pipeline.result

        if config.trace is not None:
            with open_output(config.trace) as f:
                write_trace(trace_records(pipeline.tables, pipeline.decomposition.tree), f)
        if config.stats_file is not None:
            with open_output(config.stats_file) as f:
                write_trace(result.stats.blocks, f)

    logger.info(f"{config.input}: {result.status.value} via {config.method}")
    _print_result(result, config.as_json)
    return ExitCode.OK if result.status == SolveStatus.OPTIMAL else ExitCode.INFEASIBLE

"""Regression harness: td against brute force over a batch of instances."""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from treeopt.cli.common import ExitCode, error, read_instance
from treeopt.core.config import settings
from treeopt.core.errors import TreeOptError
from treeopt.schemas.instance import Instance
from treeopt.schemas.options import RunConfig, SolveOptions
from treeopt.schemas.result import BlockStrategy
from treeopt.schemas.trace import ComparisonRecord
from treeopt.services.dp_solver import DPTable, run_pipeline, solve
from treeopt.services.instance_io import sweep_instance
from treeopt.services.oracle import brute_force

logger = logging.getLogger(__name__)

Job = tuple[str, Instance, BlockStrategy, bool]


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "compare",
        help="Check td against brute force on a seeded batch",
        description=(
            "Print one JSON record per instance in seed order, then an 'A/B agree' "
            "summary. Exit 4 on any disagreement."
        ),
    )
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-max", type=int, default=14)
    parser.add_argument("--block", choices=[s.value for s in BlockStrategy], default=settings.block_strategy)
    parser.add_argument(
        "--block-ab",
        action="store_true",
        help="Also require equal h-tables across block strategies and reuse nodes <= implicit nodes",
    )
    parser.add_argument("--input", type=Path, default=None, help="Instance file or directory instead of the generator")
    parser.add_argument("--workers", type=int, default=settings.compare_workers)
    parser.set_defaults(command="compare")


def _value_map(tables: list[DPTable]) -> dict[int, dict[tuple[int, ...], int | None]]:
    return {t.bag: {key: entry.value for key, entry in t.entries.items()} for t in tables}


def compare_instance(job: Job) -> ComparisonRecord:
    source, instance, strategy, block_ab = job
    try:
        td = solve(instance, SolveOptions(block_strategy=strategy))
        brute = brute_force(instance)
    except TreeOptError as e:
        return ComparisonRecord(
            source=source, n=instance.n, m=instance.m,
            td_status="ERROR", td_objective=None,
            brute_status="ERROR", brute_objective=None,
            agree=False, error=str(e),
        )

    agree = td.status == brute.status and td.objective == brute.objective
    record = ComparisonRecord(
        source=source, n=instance.n, m=instance.m,
        td_status=td.status.value, td_objective=td.objective,
        brute_status=brute.status.value, brute_objective=brute.objective,
        agree=agree,
    )
    if block_ab:
        runs = {s: run_pipeline(instance, SolveOptions(block_strategy=s)) for s in BlockStrategy}
        maps = [_value_map(run.tables) for run in runs.values()]
        record.block_values_agree = all(m == maps[0] for m in maps)
        record.implicit_nodes = sum(b.nodes for b in runs[BlockStrategy.IMPLICIT].result.stats.blocks)
        record.reuse_nodes = sum(b.nodes for b in runs[BlockStrategy.IMPLICIT_REUSE].result.stats.blocks)
        record.agree = agree and record.block_values_agree and record.reuse_nodes <= record.implicit_nodes
    return record


def _instance_files(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.is_file())
    return [path]


def _jobs(config: RunConfig) -> list[Job]:
    if config.input is not None:
        return [
            (str(p), read_instance(p), config.block, config.block_ab)
            for p in _instance_files(config.input)
        ]
    return [
        (f"seed={s}", sweep_instance(s, config.n_max), config.block, config.block_ab)
        for s in range(config.seed, config.seed + config.count)
    ]


def _run_all(jobs: list[Job], workers: int) -> list[ComparisonRecord]:
    if workers == 1:
        return [compare_instance(job) for job in jobs]
    # map() keeps submission order, so output stays in seed order
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(compare_instance, jobs))


def run(config: RunConfig) -> int:
    if config.input is None and config.n_max > settings.oracle_limit:
        error(f"--n-max {config.n_max} exceeds the oracle limit {settings.oracle_limit}")
        return ExitCode.INPUT_ERROR
    jobs = _jobs(config)
    if not jobs:
        error(f"no instance files in {config.input}")
        return ExitCode.INPUT_ERROR
    too_large = [source for source, instance, _, _ in jobs if instance.n > settings.oracle_limit]
    if too_large:
        error(f"{too_large[0]}: n exceeds the oracle limit {settings.oracle_limit}")
        return ExitCode.INPUT_ERROR

    logger.info(f"Comparing {len(jobs)} instances with {config.workers} worker(s)")
    records = _run_all(jobs, config.workers)
    for record in records:
        print(record.model_dump_json())

    agreed = sum(r.agree for r in records)
    summary = f"{agreed}/{len(records)} agree"
    if config.block_ab:
        implicit = sum(r.implicit_nodes or 0 for r in records)
        reuse = sum(r.reuse_nodes or 0 for r in records)
        summary += f"; nodes implicit={implicit} reuse={reuse} delta={reuse - implicit}"
    print(summary)

    failures = [r for r in records if not r.agree]
    for r in failures:
        detail = r.error or (
            f"td {r.td_status} {r.td_objective} vs brute {r.brute_status} {r.brute_objective}"
        )
        if r.block_values_agree is False:
            detail += "; block strategies disagree"
        error(f"disagreement on {r.source}: {detail}")
    return ExitCode.DISAGREEMENT if failures else ExitCode.OK

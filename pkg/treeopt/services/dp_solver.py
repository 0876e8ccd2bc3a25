"""Dynamic programming over a rooted clique tree.

Each bag r gets an h-table keyed by assignments of its parent separator.
An entry is the best value of the subtree below r (objective credited to the
subtree's bags, subject to the constraints they own) together with the argmax
of the bag's own variables. Tables are filled children-first and the optimum
is read back top-down from the root.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from itertools import product
from typing import TextIO

from treeopt.core.errors import DecompositionError
from treeopt.schemas.instance import Assignment, Instance
from treeopt.schemas.options import SolveOptions
from treeopt.schemas.result import BlockStats, BlockStrategy, SolveResult, SolverStats, SolveStatus
from treeopt.schemas.trace import BagTraceRecord, TraceEntry
from treeopt.services.block_solver import BOTTOM, ParametricBlock, solve_family
from treeopt.services.clique_tree import Decomposition, TreeDecomposition, decompose
from treeopt.services.graph import EliminationOrdering

logger = logging.getLogger(__name__)

Key = tuple[int, ...]


@dataclass(frozen=True)
class BlockAssignment:
    constraint_owner: tuple[int, ...]  # constraint i -> bag
    credit_owner: tuple[int, ...]  # variable j -> bag where c_j is counted
    parent: dict[int, int | None]
    children: dict[int, tuple[int, ...]]
    separator_to_parent: dict[int, frozenset[int]]

    def owned_constraints(self, r: int) -> list[int]:
        return [i for i, owner in enumerate(self.constraint_owner) if owner == r]

    def credited_variables(self, r: int) -> list[int]:
        return [j for j, owner in enumerate(self.credit_owner) if owner == r]


def assign_blocks(instance: Instance, td: TreeDecomposition) -> BlockAssignment:
    """Give each constraint to the deepest bag holding its support, each c_j to the highest bag holding j."""
    depth = td.depth

    owners = []
    for i, con in enumerate(instance.constraints):
        support = set(con.support)
        holding = [r for r, bag in enumerate(td.bags) if support <= bag]
        if not holding:
            raise DecompositionError(
                f"constraint {i + 1} fits in no bag (support {sorted(j + 1 for j in support)})",
                witness=(i,),
            )
        owners.append(min(holding, key=lambda r: (-depth[r], r)))

    credit = []
    for j in range(instance.n):
        holding = [r for r, bag in enumerate(td.bags) if j in bag]
        if not holding:
            raise DecompositionError(f"variable {j + 1} is in no bag", witness=(j,))
        credit.append(min(holding, key=lambda r: (depth[r], r)))

    return BlockAssignment(
        constraint_owner=tuple(owners),
        credit_owner=tuple(credit),
        parent=dict(td.parent),
        children=dict(td.children),
        separator_to_parent={r: td.separator_to_parent(r) for r in range(len(td.bags))},
    )


@dataclass(frozen=True)
class DPEntry:
    value: int | None  # BOTTOM when the subtree has no feasible completion
    rank: int = 0  # lexicographic rank of the chosen subtree assignment
    argmax: Assignment | None = None  # bag-local (non-separator) variables

    @property
    def is_bottom(self) -> bool:
        return self.value is BOTTOM

    def beats(self, other: "DPEntry") -> bool:
        if self.is_bottom:
            return False
        if other.is_bottom:
            return True
        return (self.value, -self.rank) > (other.value, -other.rank)


BOTTOM_ENTRY = DPEntry(BOTTOM)


@dataclass
class DPTable:
    bag: int
    variables: tuple[int, ...]
    separator: tuple[int, ...]  # key order
    entries: dict[Key, DPEntry]
    stats: BlockStats

    def __len__(self) -> int:
        return len(self.entries)


def _rank(variables: Iterable[int], values: Iterable[int], n: int) -> int:
    # x_1 is the most significant bit, so smaller rank = lexicographically smaller
    return sum(v << (n - 1 - j) for j, v in zip(variables, values))


def _solve_bag(
    instance: Instance,
    td: TreeDecomposition,
    ba: BlockAssignment,
    r: int,
    tables: dict[int, DPTable],
    strategy: BlockStrategy,
) -> DPTable:
    n = instance.n
    separator = tuple(sorted(ba.separator_to_parent[r]))
    local = ba.credited_variables(r)
    children = ba.children[r]

    child_vars = set().union(*(ba.separator_to_parent[c] for c in children))
    handoff = tuple(j for j in local if j in child_vars)  # passed down as child keys
    free = tuple(j for j in local if j not in child_vars)

    block = ParametricBlock.from_instance(
        instance, r, free, separator + handoff, ba.owned_constraints(r)
    )
    family = solve_family(block, strategy)

    child_keys = [(tables[c], tuple(sorted(ba.separator_to_parent[c]))) for c in children]

    entries: dict[Key, DPEntry] = {}
    for sigma in product((0, 1), repeat=len(separator)):
        values = dict(zip(separator, sigma))
        best = BOTTOM_ENTRY
        for tau in product((0, 1), repeat=len(handoff)):
            values.update(zip(handoff, tau))
            outcome = family.outcomes[tuple(values[j] for j in block.boundary_vars)]
            if outcome.is_bottom:
                continue

            total = outcome.value + sum(instance.c[j] * t for j, t in zip(handoff, tau))
            rank = _rank(free, outcome.argmax, n) + _rank(handoff, tau, n)
            for child, child_sep in child_keys:
                found = child.entries[tuple(values[j] for j in child_sep)]
                if found.is_bottom:
                    break
                total += found.value
                rank += found.rank
            else:
                candidate = DPEntry(total, rank)
                if candidate.beats(best):
                    argmax = dict(zip(handoff, tau))
                    argmax.update(zip(free, outcome.argmax))
                    best = DPEntry(total, rank, dict(sorted(argmax.items())))
        entries[sigma] = best

    logger.debug(
        f"Bag {r + 1}: separator {[j + 1 for j in separator]}, "
        f"{len(free)} free, {len(handoff)} handoff, {len(entries)} entries"
    )
    return DPTable(
        bag=r,
        variables=tuple(sorted(td.bags[r])),
        separator=separator,
        entries=entries,
        stats=family.stats,
    )


def solve_bottom_up(
    instance: Instance,
    td: TreeDecomposition,
    ba: BlockAssignment,
    block_strategy: BlockStrategy = BlockStrategy.EXHAUSTIVE,
) -> list[DPTable]:
    """h-tables for every bag, in post-order (children before parents)."""
    tables: dict[int, DPTable] = {}
    for r in td.postorder():
        tables[r] = _solve_bag(instance, td, ba, r, tables, block_strategy)
    return list(tables.values())


def subtree_assignment(tables: list[DPTable], td: TreeDecomposition, bag: int, key: Key) -> Assignment | None:
    """Assignment of every variable in the subtree under ``bag`` realising ``entries[key]``.

    Includes the separator variables fixed by ``key``; None for a BOTTOM entry.
    """
    by_bag = {t.bag: t for t in tables}
    if by_bag[bag].entries[key].is_bottom:
        return None

    assignment: Assignment = {}
    stack = [(bag, key)]
    while stack:
        r, k = stack.pop()
        table = by_bag[r]
        assignment.update(zip(table.separator, k))
        assignment.update(table.entries[k].argmax)
        for c in td.children[r]:
            child = by_bag[c]
            stack.append((c, tuple(assignment[j] for j in child.separator)))
    return assignment


def backtrack(tables: list[DPTable], td: TreeDecomposition) -> SolveResult:
    """Read the optimum off the root entry and push separator choices downward."""
    root = next(t for t in tables if t.bag == td.root)
    best = root.entries[()]
    if best.is_bottom:
        return SolveResult(status=SolveStatus.INFEASIBLE)

    assignment = subtree_assignment(tables, td, td.root, ())
    return SolveResult(
        status=SolveStatus.OPTIMAL,
        objective=best.value,
        assignment=[assignment[j] for j in range(len(assignment))],
    )


def trace_records(tables: list[DPTable], td: TreeDecomposition) -> list[BagTraceRecord]:
    """One record per bag in post-order, 1-based, one entry per separator assignment."""
    records = []
    for table in tables:
        parent = td.parent[table.bag]
        records.append(BagTraceRecord(
            bag=table.bag + 1,
            variables=[j + 1 for j in table.variables],
            separator=[j + 1 for j in table.separator],
            parent=None if parent is None else parent + 1,
            entries=[
                TraceEntry(
                    key=list(key),
                    value=entry.value,
                    argmax=None if entry.argmax is None else {j + 1: v for j, v in entry.argmax.items()},
                )
                for key, entry in table.entries.items()
            ],
        ))
    return records


def write_trace(records: Iterable, stream: TextIO) -> None:
    """JSON lines, one pydantic record per line."""
    for record in records:
        stream.write(record.model_dump_json() + "\n")


@dataclass
class PipelineRun:
    decomposition: Decomposition
    blocks: BlockAssignment
    tables: list[DPTable]
    result: SolveResult


def run_pipeline(instance: Instance, options: SolveOptions | None = None) -> PipelineRun:
    """Graph -> triangulation -> clique tree -> block assignment -> DP -> backtrack."""
    options = options or SolveOptions()
    ordering = EliminationOrdering(tuple(options.ordering)) if options.ordering is not None else None

    decomposition = decompose(instance, ordering)
    td = decomposition.tree
    blocks = assign_blocks(instance, td)
    tables = solve_bottom_up(instance, td, blocks, options.block_strategy)
    result = backtrack(tables, td)

    stats = SolverStats(
        width=td.width,
        bag_count=len(td.bags),
        fill_edges=td.fill_count,
        max_separator=td.max_separator,
        max_table_size=max(len(t) for t in tables),
        table_entries=sum(len(t) for t in tables),
        local_enumerations=sum(t.stats.enumerated for t in tables),
        blocks=[t.stats for t in tables],
    )
    result = result.model_copy(update={"stats": stats})

    if result.status == SolveStatus.OPTIMAL:
        logger.info(f"Optimum {result.objective} (width {td.width}, {len(td.bags)} bags)")
    else:
        logger.info(f"Instance infeasible (width {td.width}, {len(td.bags)} bags)")
    return PipelineRun(decomposition=decomposition, blocks=blocks, tables=tables, result=result)


def solve(instance: Instance, options: SolveOptions | None = None) -> SolveResult:
    return run_pipeline(instance, options).result

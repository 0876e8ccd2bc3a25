"""Per-bag parametric subproblem families.

A bag's family is one 0/1 knapsack-style problem per boundary assignment
sigma: maximise the credited objective of the bag's free variables subject to
the rows the bag owns, with right-hand sides b_i(sigma) = b_i - A_i,boundary . sigma.

Three strategies solve a family:

* exhaustive: enumerate every local assignment for every member;
* implicit: depth-first implicit enumeration per member with three fathoming
  tests (bound vs incumbent, feasible best completion, infeasible row);
* implicit-reuse: members are processed along the RHS dominance order and
  partial solutions fathomed by test 1 or 2 in a dominated member are skipped
  in every dominating member, which also inherits the best incumbent.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import networkx as nx
import numpy as np

from treeopt.schemas.instance import Instance
from treeopt.schemas.result import BlockStats, BlockStrategy, FathomTest

logger = logging.getLogger(__name__)

Sigma = tuple[int, ...]
Prefix = tuple[int, ...]

_INT64_SAFE = 2**62
# Largest free-variable count materialised as a dense assignment matrix
DENSE_LOCAL_LIMIT = 16

# Value of an infeasible member / table entry
BOTTOM = None


@dataclass(frozen=True)
class BlockRow:
    """An owned constraint split into free-variable and boundary coefficients."""

    index: int
    local: tuple[int, ...]
    boundary: tuple[int, ...]
    rhs: int


@dataclass(frozen=True)
class ParametricBlock:
    bag: int
    local_vars: tuple[int, ...]  # free variables, optimised here
    boundary_vars: tuple[int, ...]  # parent separator plus child separators
    objective: tuple[int, ...]  # aligned with local_vars
    rows: tuple[BlockRow, ...]

    @classmethod
    def from_instance(
        cls,
        instance: Instance,
        bag: int,
        local_vars,
        boundary_vars,
        constraint_ids,
    ) -> "ParametricBlock":
        local_vars = tuple(sorted(local_vars))
        boundary_vars = tuple(sorted(boundary_vars))
        rows = []
        for i in sorted(constraint_ids):
            con = instance.constraints[i]
            rows.append(BlockRow(
                index=i,
                local=tuple(con.coefficient(j) for j in local_vars),
                boundary=tuple(con.coefficient(j) for j in boundary_vars),
                rhs=con.rhs,
            ))
        return cls(
            bag=bag,
            local_vars=local_vars,
            boundary_vars=boundary_vars,
            objective=tuple(instance.c[j] for j in local_vars),
            rows=tuple(rows),
        )

    def rhs(self, sigma: Sigma) -> tuple[int, ...]:
        return tuple(
            row.rhs - sum(a * s for a, s in zip(row.boundary, sigma))
            for row in self.rows
        )

    def members(self) -> list[Sigma]:
        return list(product((0, 1), repeat=len(self.boundary_vars)))

    def value(self, x) -> int:
        return sum(c * v for c, v in zip(self.objective, x))

    def feasible(self, x, rhs: tuple[int, ...]) -> bool:
        return all(
            sum(a * v for a, v in zip(row.local, x)) <= b
            for row, b in zip(self.rows, rhs)
        )

    @cached_property
    def dense(self) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
        """Every local assignment in lexicographic order with its value and row sums.

        None when the block is too wide or some sum could leave int64; callers
        then use the scalar path.
        """
        bound = sum(abs(c) for c in self.objective)
        for row in self.rows:
            bound = max(bound, sum(map(abs, row.local)) + sum(map(abs, row.boundary)) + abs(row.rhs))
        if bound >= _INT64_SAFE or len(self.local_vars) > DENSE_LOCAL_LIMIT:
            return None
        k = len(self.local_vars)
        X = (np.arange(1 << k, dtype=np.int64)[:, None] >> np.arange(k - 1, -1, -1, dtype=np.int64)) & 1
        A = np.asarray([row.local for row in self.rows], dtype=np.int64).reshape(len(self.rows), k)
        return X, X @ np.asarray(self.objective, dtype=np.int64).reshape(k), X @ A.T


@dataclass(frozen=True)
class BlockOutcome:
    value: int | None  # BOTTOM when no local assignment is feasible
    argmax: tuple[int, ...] | None = None

    @property
    def is_bottom(self) -> bool:
        return self.value is BOTTOM


INFEASIBLE = BlockOutcome(BOTTOM)


@dataclass
class FathomLog:
    enumerated: int = 0
    nodes: int = 0
    expansions: int = 0
    test1: int = 0
    test2: int = 0
    test3: int = 0
    reuse_skips: int = 0
    shared_members: int = 0
    fallback: bool = False
    fathomed: dict[Prefix, FathomTest] = field(default_factory=dict)

    def absorb(self, other: "FathomLog") -> None:
        self.enumerated += other.enumerated
        self.nodes += other.nodes
        self.expansions += other.expansions
        self.test1 += other.test1
        self.test2 += other.test2
        self.test3 += other.test3
        self.reuse_skips += other.reuse_skips
        self.shared_members += other.shared_members
        self.fallback = self.fallback or other.fallback


@dataclass
class PartialSolution:
    """A prefix of fixed literals over the block's free variables (ascending index)."""

    values: Prefix
    status: dict[Sigma, FathomTest] = field(default_factory=dict)  # per family member

    def literals(self, block: ParametricBlock) -> list[tuple[int, int, str]]:
        # (variable, value, branch) - branch "up" fixes to 1, "down" backtracked to 0
        return [
            (j, v, "up" if v else "down")
            for j, v in zip(block.local_vars, self.values)
        ]

    def fathomed_by_bound_or_completion(self, member: Sigma) -> bool:
        return self.status.get(member) in (FathomTest.TEST1, FathomTest.TEST2)


def solve_block_exhaustive(
    block: ParametricBlock,
    sigma: Sigma,
    log: FathomLog | None = None,
) -> BlockOutcome:
    """Best feasible local assignment under b(sigma); first in lexicographic order on ties."""
    rhs = block.rhs(sigma)
    if log is not None:
        log.enumerated += 1 << len(block.local_vars)

    if block.dense is not None:
        X, values, lhs = block.dense
        rows = np.flatnonzero(np.all(lhs <= np.asarray(rhs, dtype=np.int64), axis=1))
        if rows.size == 0:
            return INFEASIBLE
        i = rows[np.argmax(values[rows])]
        return BlockOutcome(int(values[i]), tuple(int(v) for v in X[i]))

    best = INFEASIBLE
    for x in product((0, 1), repeat=len(block.local_vars)):
        if not block.feasible(x, rhs):
            continue
        v = block.value(x)
        if best.is_bottom or v > best.value:
            best = BlockOutcome(v, x)
    return best


class ImplicitEnumeration:
    """Depth-first implicit enumeration of one family member.

    Branching fixes the lowest free variable to 1, then to 0. At each partial
    solution the tests run in order: test 1 (bound <= incumbent), test 2 (best
    completion feasible), test 3 (some row violated by every completion).
    """

    def __init__(
        self,
        block: ParametricBlock,
        sigma: Sigma,
        incumbent: BlockOutcome | None = None,
        skip: frozenset[Prefix] = frozenset(),
    ):
        self.block = block
        self.rhs = block.rhs(sigma)
        self.skip = skip
        self.best = incumbent if incumbent is not None and not incumbent.is_bottom else INFEASIBLE
        self.log = FathomLog()

        c = block.objective
        k = len(c)
        # Suffix tables indexed by prefix length
        self._tail_gain = [sum(max(cj, 0) for cj in c[t:]) for t in range(k + 1)]
        self._best_tail = [tuple(1 if cj > 0 else 0 for cj in c[t:]) for t in range(k + 1)]
        self._tail_best_lhs = [
            [sum(a * x for a, x in zip(row.local[t:], self._best_tail[t])) for t in range(k + 1)]
            for row in block.rows
        ]
        self._tail_min_lhs = [
            [sum(min(a, 0) for a in row.local[t:]) for t in range(k + 1)]
            for row in block.rows
        ]

    def run(self) -> BlockOutcome:
        self._visit((), 0, [0] * len(self.block.rows))
        return self.best

    def _visit(self, prefix: Prefix, value: int, lhs: list[int]) -> None:
        log = self.log
        if prefix in self.skip:
            log.reuse_skips += 1
            log.fathomed[prefix] = FathomTest.REUSED
            return
        log.nodes += 1
        k = len(prefix)

        bound = value + self._tail_gain[k]
        if not self.best.is_bottom and bound <= self.best.value:
            log.test1 += 1
            log.fathomed[prefix] = FathomTest.TEST1
            return

        rows = range(len(self.rhs))
        if all(lhs[i] + self._tail_best_lhs[i][k] <= self.rhs[i] for i in rows):
            log.test2 += 1
            log.fathomed[prefix] = FathomTest.TEST2
            if self.best.is_bottom or bound > self.best.value:
                self.best = BlockOutcome(bound, prefix + self._best_tail[k])
            return

        if any(lhs[i] + self._tail_min_lhs[i][k] > self.rhs[i] for i in rows):
            log.test3 += 1
            log.fathomed[prefix] = FathomTest.TEST3
            return

        log.expansions += 1
        up = [lhs[i] + self.block.rows[i].local[k] for i in rows]
        self._visit(prefix + (1,), value + self.block.objective[k], up)
        self._visit(prefix + (0,), value, lhs)


def solve_block_implicit(
    block: ParametricBlock,
    sigma: Sigma,
    incumbent: BlockOutcome | None = None,
    skip: frozenset[Prefix] = frozenset(),
) -> tuple[BlockOutcome, FathomLog]:
    """Implicit enumeration for one member; returns the optimum and its fathom log.

    ``incumbent`` must be feasible for this member. A negative objective
    coefficient breaks the best-completion rule, so the member is solved
    exhaustively instead and the log is marked ``fallback``.
    """
    if any(cj < 0 for cj in block.objective):
        log = FathomLog(fallback=True)
        return solve_block_exhaustive(block, sigma, log), log
    search = ImplicitEnumeration(block, sigma, incumbent, skip)
    return search.run(), search.log


def _dominates(low: tuple[int, ...], high: tuple[int, ...]) -> bool:
    return all(a <= b for a, b in zip(low, high))


@dataclass
class FamilyOrder:
    """Members grouped by RHS vector and layered along RHS dominance.

    Level 0 holds the dominance-minimal (tightest) RHS vectors; each level is
    sorted by its lexicographically smallest member.
    """

    members: list[Sigma]
    rhs: dict[Sigma, tuple[int, ...]]
    classes: dict[tuple[int, ...], list[Sigma]]
    dag: nx.DiGraph
    levels: list[list[tuple[int, ...]]]

    @classmethod
    def build(cls, block: ParametricBlock, members: list[Sigma]) -> "FamilyOrder":
        members = sorted(members)
        rhs = {sigma: block.rhs(sigma) for sigma in members}
        classes: dict[tuple[int, ...], list[Sigma]] = {}
        for sigma in members:
            classes.setdefault(rhs[sigma], []).append(sigma)

        order = cls(members=members, rhs=rhs, classes=classes, dag=nx.DiGraph(), levels=[])
        order.dag.add_nodes_from(classes)
        for low, low_members in classes.items():
            for high, high_members in classes.items():
                if low != high and order.precedes(low_members[0], high_members[0]):
                    order.dag.add_edge(low, high)

        order.levels = [
            sorted(generation, key=lambda vec: classes[vec][0])
            for generation in nx.topological_generations(order.dag)
        ]
        return order

    def precedes(self, low: Sigma, high: Sigma) -> bool:
        """b(low) <= b(high) componentwise."""
        return _dominates(self.rhs[low], self.rhs[high])

    def predecessors(self, vec: tuple[int, ...]) -> set[tuple[int, ...]]:
        return nx.ancestors(self.dag, vec)


def reuse_applicable(block: ParametricBlock) -> bool:
    """Nonnegative objective and boundary coefficients (the knapsack case)."""
    return all(cj >= 0 for cj in block.objective) and all(
        a >= 0 for row in block.rows for a in row.boundary
    )


def _solve_independently(block: ParametricBlock, members: list[Sigma]) -> tuple[dict[Sigma, BlockOutcome], FathomLog]:
    outcomes: dict[Sigma, BlockOutcome] = {}
    total = FathomLog()
    for sigma in members:
        outcomes[sigma], log = solve_block_implicit(block, sigma)
        total.absorb(log)
    return outcomes, total


def solve_family_with_reuse(
    block: ParametricBlock,
    members: list[Sigma] | None = None,
) -> tuple[dict[Sigma, BlockOutcome], FathomLog]:
    """Solve every member, sharing fathoming information along RHS dominance.

    Values equal member-by-member implicit enumeration; the number of
    partial solutions evaluated is never larger.
    """
    members = block.members() if members is None else list(members)
    if not reuse_applicable(block):
        logger.warning(f"Bag {block.bag}: reuse preconditions fail, solving members independently")
        return _solve_independently(block, members)

    order = FamilyOrder.build(block, members)
    registry: dict[Prefix, PartialSolution] = {}
    solved: dict[tuple[int, ...], BlockOutcome] = {}
    outcomes: dict[Sigma, BlockOutcome] = {}
    total = FathomLog()

    for level in order.levels:
        for vec in level:
            sigma = order.classes[vec][0]
            preds = sorted(order.predecessors(vec), key=lambda p: order.classes[p][0])
            pred_reps = [order.classes[p][0] for p in preds]

            # Case a: a dominated member's optimum stays feasible here
            seed = INFEASIBLE
            for p in preds:
                found = solved[p]
                if not found.is_bottom and (seed.is_bottom or found.value > seed.value):
                    seed = found

            # Cases a/b: subtrees fathomed by test 1 or 2 below are fathomed here too
            skip = frozenset(
                prefix for prefix, ps in registry.items()
                if any(ps.fathomed_by_bound_or_completion(rep) for rep in pred_reps)
            )

            outcome, log = solve_block_implicit(block, sigma, incumbent=seed, skip=skip)
            total.absorb(log)
            for prefix, test in log.fathomed.items():
                registry.setdefault(prefix, PartialSolution(prefix)).status[sigma] = test

            solved[vec] = outcome
            for member in order.classes[vec]:
                outcomes[member] = outcome
            total.shared_members += len(order.classes[vec]) - 1

    logger.debug(
        f"Bag {block.bag}: {len(members)} members in {len(order.levels)} levels, "
        f"{total.nodes} nodes, {total.reuse_skips} reuse skips"
    )
    return outcomes, total


@dataclass
class FamilyResult:
    block: ParametricBlock
    outcomes: dict[Sigma, BlockOutcome]
    stats: BlockStats


def solve_family(block: ParametricBlock, strategy: BlockStrategy) -> FamilyResult:
    """Solve all boundary assignments of a block with the chosen strategy."""
    members = block.members()
    if strategy == BlockStrategy.EXHAUSTIVE:
        log = FathomLog()
        outcomes = {sigma: solve_block_exhaustive(block, sigma, log) for sigma in members}
    elif strategy == BlockStrategy.IMPLICIT:
        outcomes, log = _solve_independently(block, members)
    else:
        outcomes, log = solve_family_with_reuse(block, members)

    if log.fallback:
        logger.warning(f"Bag {block.bag}: mixed-sign objective, implicit enumeration fell back to exhaustive")

    stats = BlockStats(
        bag=block.bag,
        strategy=strategy,
        members=len(members),
        local_vars=len(block.local_vars),
        boundary_vars=len(block.boundary_vars),
        enumerated=log.enumerated,
        nodes=log.nodes,
        expansions=log.expansions,
        test1=log.test1,
        test2=log.test2,
        test3=log.test3,
        reuse_skips=log.reuse_skips,
        shared_members=log.shared_members,
        fallback=log.fallback,
    )
    return FamilyResult(block=block, outcomes=outcomes, stats=stats)

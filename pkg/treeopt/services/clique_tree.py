"""Clique trees, tree-decomposition validation and the decomposition pipeline."""

import logging
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
from networkx.utils import UnionFind

from treeopt.core.errors import DecompositionError
from treeopt.schemas.decomposition import (
    DecompositionSummary,
    TreeEdgeSummary,
    ValidationReport,
    Violation,
)
from treeopt.schemas.instance import Instance
from treeopt.services.graph import (
    EliminationOrdering,
    FilledGraph,
    InteractionGraph,
    build_interaction_graph,
    elimination_game,
    maximal_cliques_chordal,
    min_degree_ordering,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreeDecomposition:
    """Rooted tree of bags; tree edges are stored as (i, j) with i < j."""

    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]
    root: int = 0
    fill_count: int = 0  # fill edges added by the triangulation this tree came from

    @cached_property
    def tree(self) -> nx.Graph:
        t = nx.Graph()
        t.add_nodes_from(range(len(self.bags)))
        t.add_edges_from(self.edges)
        return t

    @cached_property
    def separators(self) -> dict[tuple[int, int], frozenset[int]]:
        return {(i, j): self.bags[i] & self.bags[j] for i, j in self.edges}

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    @property
    def max_separator(self) -> int:
        return max((len(s) for s in self.separators.values()), default=0)

    @property
    def vertex_count(self) -> int:
        return len(frozenset().union(*self.bags))

    @cached_property
    def parent(self) -> dict[int, int | None]:
        parent: dict[int, int | None] = {self.root: None}
        stack = [self.root]
        while stack:
            r = stack.pop()
            for nb in sorted(self.tree[r]):
                if nb not in parent:
                    parent[nb] = r
                    stack.append(nb)
        return parent

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        kids: dict[int, list[int]] = {r: [] for r in range(len(self.bags))}
        for r, p in self.parent.items():
            if p is not None:
                kids[p].append(r)
        return {r: tuple(sorted(c)) for r, c in kids.items()}

    @cached_property
    def depth(self) -> dict[int, int]:
        depth = {self.root: 0}
        for r in self.preorder():
            for child in self.children[r]:
                depth[child] = depth[r] + 1
        return depth

    def preorder(self) -> list[int]:
        order, stack = [], [self.root]
        while stack:
            r = stack.pop()
            order.append(r)
            stack.extend(reversed(self.children[r]))
        return order

    def postorder(self) -> list[int]:
        """Children before parents; siblings in ascending bag index."""
        order: list[int] = []
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            r, expanded = stack.pop()
            if expanded:
                order.append(r)
                continue
            stack.append((r, True))
            for child in reversed(self.children[r]):
                stack.append((child, False))
        return order

    def separator_to_parent(self, r: int) -> frozenset[int]:
        p = self.parent[r]
        if p is None:
            return frozenset()
        return self.bags[r] & self.bags[p]


def build_clique_tree(cliques: list[frozenset[int]], fill_count: int = 0) -> TreeDecomposition:
    """Maximum-weight spanning tree of the clique graph, weight |C_i & C_j|.

    Disjoint cliques are joined through zero-weight edges so the result is a
    single tree. Equal weights go to the later clique with the smaller index,
    attached to its nearest earlier clique. The root is the largest bag
    (lowest index on ties).
    """
    k = len(cliques)
    if k == 0:
        raise DecompositionError("cannot build a clique tree from zero cliques")

    candidates = [
        (i, j, len(cliques[i] & cliques[j]))
        for j in range(k)
        for i in range(j - 1, -1, -1)
    ]
    candidates.sort(key=lambda e: (-e[2], e[1], -e[0]))

    components = UnionFind(range(k))
    edges: list[tuple[int, int]] = []
    for i, j, _ in candidates:
        if len(edges) == k - 1:
            break
        if components[i] != components[j]:
            components.union(i, j)
            edges.append((i, j))

    root = min(range(k), key=lambda r: (-len(cliques[r]), r))
    return TreeDecomposition(
        bags=tuple(frozenset(c) for c in cliques),
        edges=tuple(sorted(edges)),
        root=root,
        fill_count=fill_count,
    )


def validate_tree_decomposition(g: InteractionGraph, td: TreeDecomposition) -> ValidationReport:
    """Check vertex coverage, edge coverage, tree shape and running intersection.

    Reports the first violated condition with a 0-based witness.
    """
    width = max((len(b) for b in td.bags), default=0) - 1
    max_sep = max((len(td.bags[i] & td.bags[j]) for i, j in td.edges), default=0)

    def invalid(violation: Violation, witness: list[int], message: str) -> ValidationReport:
        return ValidationReport(
            valid=False, violation=violation, witness=witness, message=message,
            width=width, max_separator=max_sep,
        )

    for v in sorted(g.nodes):
        if not any(v in bag for bag in td.bags):
            return invalid(Violation.VERTEX_COVERAGE, [v], f"vertex {v + 1} is in no bag")

    for u, v in sorted(tuple(sorted(e)) for e in g.edges):
        if not any(u in bag and v in bag for bag in td.bags):
            return invalid(Violation.EDGE_COVERAGE, [u, v], f"edge {u + 1}-{v + 1} is in no bag")

    k = len(td.bags)
    if any(not (0 <= i < k and 0 <= j < k) for i, j in td.edges):
        return invalid(Violation.NOT_A_TREE, [], "tree edge references a missing bag")
    if k == 0 or len(td.edges) != k - 1:
        return invalid(
            Violation.NOT_A_TREE, [len(td.edges), k],
            f"{len(td.edges)} tree edges for {k} bags",
        )
    if not nx.is_connected(td.tree):
        components = sorted(min(c) for c in nx.connected_components(td.tree))
        return invalid(
            Violation.NOT_A_TREE, components[:2],
            f"bags {components[0] + 1} and {components[1] + 1} are not connected",
        )

    for v in sorted(frozenset().union(*td.bags)):
        holding = [i for i, bag in enumerate(td.bags) if v in bag]
        sub = td.tree.subgraph(holding)
        if not nx.is_connected(sub):
            parts = sorted(min(c) for c in nx.connected_components(sub))
            return invalid(
                Violation.RUNNING_INTERSECTION, [v, parts[0], parts[1]],
                f"bags holding vertex {v + 1} are disconnected "
                f"(bags {parts[0] + 1} and {parts[1] + 1})",
            )

    return ValidationReport(valid=True, width=width, max_separator=max_sep)


def minimal_separators(td: TreeDecomposition) -> list[frozenset[int]]:
    """Distinct non-empty intersections along tree edges (at most n - 1)."""
    distinct = {sep for sep in td.separators.values() if sep}
    return sorted(distinct, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class Decomposition:
    graph: InteractionGraph
    filled: FilledGraph
    cliques: list[frozenset[int]]
    tree: TreeDecomposition
    report: ValidationReport

    def summary(self) -> DecompositionSummary:
        td = self.tree
        return DecompositionSummary(
            vertex_count=self.graph.number_of_nodes(),
            bag_count=len(td.bags),
            root=td.root + 1,
            width=td.width,
            max_separator=td.max_separator,
            fill_count=len(self.filled.fill_edges),
            fill_edges=[[u + 1, v + 1] for u, v in sorted(self.filled.fill_edges)],
            bags=[sorted(v + 1 for v in bag) for bag in td.bags],
            edges=[
                TreeEdgeSummary(
                    parent=td.parent[child] + 1,
                    child=child + 1,
                    separator=sorted(v + 1 for v in td.separator_to_parent(child)),
                )
                for child in td.preorder()
                if td.parent[child] is not None
            ],
            valid=self.report.valid,
        )


def decompose(instance: Instance, ordering: EliminationOrdering | None = None) -> Decomposition:
    """Interaction graph -> ordering -> elimination game -> cliques -> clique tree."""
    g = build_interaction_graph(instance)
    if ordering is None:
        ordering = min_degree_ordering(g)
    filled = elimination_game(g, ordering)
    cliques = maximal_cliques_chordal(filled)
    td = build_clique_tree(cliques, fill_count=len(filled.fill_edges))
    report = validate_tree_decomposition(g, td)
    if not report.valid:
        raise DecompositionError(report.message or "invalid decomposition", tuple(report.witness or ()))
    logger.info(
        f"Decomposed n={instance.n}: {len(td.bags)} bags, width {td.width}, "
        f"{len(filled.fill_edges)} fill edges"
    )
    return Decomposition(graph=g, filled=filled, cliques=cliques, tree=td, report=report)

"""Interaction graphs, the elimination game and chordal-graph primitives.

Vertices are 0-based variable indices. Every tie (minimum degree, simplicial
vertex choice) goes to the smallest vertex index so results are reproducible.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import TypeAlias

import networkx as nx

from treeopt.core.errors import DecompositionError, InstanceFormatError
from treeopt.schemas.instance import Instance

logger = logging.getLogger(__name__)

InteractionGraph: TypeAlias = nx.Graph
Edge: TypeAlias = tuple[int, int]


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class EliminationOrdering:
    """A permutation of the vertices; ``position[v]`` is alpha(v) (0-based)."""

    order: tuple[int, ...]

    @cached_property
    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.order)}

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class FilledGraph:
    """The graph G+ produced by the elimination game, with its fill edges."""

    graph: InteractionGraph
    fill_edges: frozenset[Edge]
    ordering: EliminationOrdering
    original_edges: frozenset[Edge] = field(default_factory=frozenset)

    def missing_edges(self) -> frozenset[Edge]:
        """Fill the game would still add to G+; empty iff the ordering is a PEO of G+."""
        return elimination_game(self.graph, self.ordering).fill_edges


def build_interaction_graph(instance: Instance) -> InteractionGraph:
    """One vertex per variable, an edge for every pair sharing a constraint."""
    g = nx.Graph()
    g.add_nodes_from(range(instance.n))
    for con in instance.constraints:
        g.add_edges_from(combinations(con.support, 2))
    logger.debug(f"Interaction graph: {g.number_of_nodes()} vertices, {g.number_of_edges()} edges")
    return g


def neighborhood(g: InteractionGraph, s, closed: bool = False) -> set[int]:
    """Nb(S) = union of Nb(v) over v in S, minus S; ``closed`` gives Nb[S] = Nb(S) | S."""
    s = set(s)
    nb: set[int] = set()
    for v in s:
        nb.update(g[v])
    nb -= s
    return nb | s if closed else nb


def _is_clique(g: InteractionGraph, vertices) -> bool:
    return all(g.has_edge(u, v) for u, v in combinations(vertices, 2))


def _make_clique(g: InteractionGraph, vertices) -> list[Edge]:
    added = []
    for u, v in combinations(sorted(vertices), 2):
        if not g.has_edge(u, v):
            g.add_edge(u, v)
            added.append(_edge(u, v))
    return added


def min_degree_ordering(g: InteractionGraph) -> EliminationOrdering:
    """Greedy minimum-degree ordering on the current elimination graph."""
    h = g.copy()
    order = []
    while h.number_of_nodes():
        _, v = min((h.degree(u), u) for u in h.nodes)
        _make_clique(h, h[v])
        h.remove_node(v)
        order.append(v)
    return EliminationOrdering(tuple(order))


def _check_ordering(g: InteractionGraph, ordering: EliminationOrdering) -> None:
    if len(ordering) != g.number_of_nodes() or set(ordering.order) != set(g.nodes):
        raise DecompositionError("ordering is not a permutation of the graph's vertices")


def elimination_game(g: InteractionGraph, ordering: EliminationOrdering) -> FilledGraph:
    """Eliminate vertices in order, turning each neighbourhood into a clique.

    The returned filled graph is chordal and ``ordering`` is a perfect
    elimination ordering of it.
    """
    _check_ordering(g, ordering)
    work = g.copy()
    filled = g.copy()
    fill: list[Edge] = []
    for v in ordering.order:
        added = _make_clique(work, work[v])
        filled.add_edges_from(added)
        fill.extend(added)
        work.remove_node(v)
    original = frozenset(_edge(u, v) for u, v in g.edges)
    return FilledGraph(
        graph=filled,
        fill_edges=frozenset(fill),
        ordering=ordering,
        original_edges=original,
    )


def is_chordal(g: InteractionGraph) -> tuple[bool, EliminationOrdering | None]:
    """Chordality by repeated simplicial-vertex elimination.

    Returns ``(True, peo)`` with a witness perfect elimination ordering, or
    ``(False, None)`` once no simplicial vertex is left.
    """
    h = g.copy()
    order = []
    while h.number_of_nodes():
        for v in sorted(h.nodes):
            if _is_clique(h, h[v]):
                break
        else:
            return False, None
        order.append(v)
        h.remove_node(v)
    return True, EliminationOrdering(tuple(order))


def maximal_cliques_chordal(fg: FilledGraph) -> list[frozenset[int]]:
    """Maximal cliques of a chordal filled graph, in elimination order.

    C_v = {v} plus the neighbours of v eliminated after it; the inclusion-maximal
    C_v are exactly the maximal cliques (at most n of them).
    """
    missing = fg.missing_edges()
    if missing:
        witness = min(missing)
        raise DecompositionError(
            f"ordering is not a perfect elimination ordering: missing edge "
            f"{witness[0] + 1}-{witness[1] + 1}",
            witness=witness,
        )

    pos = fg.ordering.position
    candidates = [
        frozenset({v} | {u for u in fg.graph[v] if pos[u] > pos[v]})
        for v in fg.ordering.order
    ]
    cliques = [
        clique for clique in candidates
        if not any(clique < other for other in candidates)
    ]
    logger.debug(f"Found {len(cliques)} maximal cliques, largest {max(map(len, cliques), default=0)}")
    return cliques


def treewidth_upper_bound(fg: FilledGraph) -> int:
    """Width realised by the ordering: largest maximal clique of G+ minus one."""
    return max((len(c) for c in maximal_cliques_chordal(fg)), default=1) - 1


def parse_ordering(text: str, n: int) -> EliminationOrdering:
    """Parse a whitespace-separated 1-based permutation (``#`` starts a comment)."""
    order: list[int] = []
    seen: set[int] = set()
    last_line = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        for token in raw.split("#", 1)[0].split():
            try:
                v = int(token)
            except ValueError:
                raise InstanceFormatError(f"expected vertex index, got {token!r}", line_no) from None
            if not 1 <= v <= n:
                raise InstanceFormatError(f"vertex {v} out of range 1..{n}", line_no)
            if v in seen:
                raise InstanceFormatError(f"vertex {v} listed twice", line_no)
            seen.add(v)
            order.append(v - 1)
    if len(order) != n:
        raise InstanceFormatError(f"ordering lists {len(order)} vertices, expected {n}", last_line)
    return EliminationOrdering(tuple(order))

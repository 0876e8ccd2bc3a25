from enum import Enum

from pydantic import BaseModel


class Violation(str, Enum):
    VERTEX_COVERAGE = "vertex_coverage"  # condition (i)
    EDGE_COVERAGE = "edge_coverage"  # condition (ii)
    NOT_A_TREE = "not_a_tree"
    RUNNING_INTERSECTION = "running_intersection"  # condition (iii)


class ValidationReport(BaseModel):
    """Outcome of checking a tree decomposition against a graph.

    ``witness`` holds 0-based indices: a vertex, an edge (u, v), a pair of bag
    indices, or (vertex, bag, bag) for the running intersection property.
    """

    valid: bool
    violation: Violation | None = None
    witness: list[int] | None = None
    message: str | None = None
    width: int
    max_separator: int


class TreeEdgeSummary(BaseModel):
    parent: int
    child: int
    separator: list[int]


class DecompositionSummary(BaseModel):
    """Printed by ``decompose``; bag and vertex numbers are 1-based."""

    vertex_count: int
    bag_count: int
    root: int
    width: int
    max_separator: int
    fill_count: int
    fill_edges: list[list[int]]
    bags: list[list[int]]
    edges: list[TreeEdgeSummary]
    valid: bool

"""Graphviz DOT text for interaction graphs and tree decompositions (1-based labels)."""

from treeopt.services.clique_tree import TreeDecomposition
from treeopt.services.graph import InteractionGraph


def _set_label(vertices) -> str:
    return "{" + ",".join(str(v + 1) for v in sorted(vertices)) + "}"


def interaction_graph_dot(g: InteractionGraph, fill_edges=frozenset()) -> str:
    """Undirected graph; fill edges (absent from ``g``) are drawn dashed."""
    lines = ["graph interaction {"]
    for v in sorted(g.nodes):
        lines.append(f"  {v + 1};")
    for u, v in sorted(tuple(sorted(e)) for e in g.edges):
        lines.append(f"  {u + 1} -- {v + 1};")
    for u, v in sorted(fill_edges):
        lines.append(f"  {u + 1} -- {v + 1} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_decomposition_dot(td: TreeDecomposition) -> str:
    lines = ["graph decomposition {", "  node [shape=box];"]
    for r, bag in enumerate(td.bags):
        attrs = f'label="B{r + 1} {_set_label(bag)}"'
        if r == td.root:
            attrs += ", peripheries=2"
        lines.append(f"  b{r + 1} [{attrs}];")
    for child in td.preorder():
        parent = td.parent[child]
        if parent is None:
            continue
        sep = _set_label(td.separator_to_parent(child))
        lines.append(f'  b{parent + 1} -- b{child + 1} [label="{sep}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

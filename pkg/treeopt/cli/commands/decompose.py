import sys
from pathlib import Path

from treeopt.cli.common import ExitCode, open_output, read_instance, read_ordering
from treeopt.schemas.options import RunConfig
from treeopt.services.clique_tree import decompose
from treeopt.services.dot import interaction_graph_dot, tree_decomposition_dot


def add_ordering_flags(parser) -> None:
    parser.add_argument("--ordering", choices=["min-degree"], default="min-degree")
    parser.add_argument("--ordering-file", type=Path, default=None, help="1-based elimination ordering")


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "decompose",
        help="Build and validate a clique-tree decomposition",
        description="Print bags, tree edges, separators, width and fill-in as JSON.",
    )
    parser.add_argument("--input", type=Path, required=True)
    add_ordering_flags(parser)
    parser.add_argument("--dot", type=Path, default=None, help="Write the tree decomposition as DOT")
    parser.add_argument("--graph-dot", type=Path, default=None, help="Write the interaction graph as DOT")
    parser.set_defaults(command="decompose")


def run(config: RunConfig) -> int:
    instance = read_instance(config.input)
    ordering = read_ordering(config.ordering_file, instance.n) if config.ordering == "file" else None
    result = decompose(instance, ordering)

    sys.stdout.write(result.summary().model_dump_json(indent=2) + "\n")
    if config.dot is not None:
        with open_output(config.dot) as f:
            f.write(tree_decomposition_dot(result.tree))
    if config.graph_dot is not None:
        with open_output(config.graph_dot) as f:
            f.write(interaction_graph_dot(result.graph, result.filled.fill_edges))
    return ExitCode.OK

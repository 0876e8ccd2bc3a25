from pathlib import Path

from treeopt.cli.common import ExitCode, coef_range, open_output
from treeopt.schemas.options import RunConfig
from treeopt.services.instance_io import generate_random, write_instance


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "gen",
        help="Generate a random sparse knapsack-style instance",
        description="Write the instance in the text format (standard output without --out).",
    )
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--m", type=int, required=True)
    parser.add_argument("--max-support", type=int, required=True)
    parser.add_argument("--coef", type=coef_range, default=(1, 9), metavar="LO..HI")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=None)
    parser.set_defaults(command="gen")


def run(config: RunConfig) -> int:
    p = config.generator
    instance = generate_random(p.n, p.m, p.max_support, (p.coef_lo, p.coef_hi), p.seed)
    with open_output(config.out) as f:
        f.write(write_instance(instance))
    return ExitCode.OK

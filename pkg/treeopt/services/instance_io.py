"""Instance file I/O, objective/feasibility evaluation and random instance generation."""

import logging
import random
from collections.abc import Mapping, Sequence
from typing import TextIO

import numpy as np
from pydantic import ValidationError

from treeopt.core.errors import InstanceFormatError, InstanceValidationError
from treeopt.schemas.instance import Constraint, Instance
from treeopt.schemas.options import GeneratorParams

logger = logging.getLogger(__name__)

# Batch evaluation works in int64; larger magnitudes go through the scalar path
_INT64_SAFE = 2**62


def _parse_int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InstanceFormatError(f"expected integer {what}, got {token!r}", line_no) from None


def _parse_count(rest: list[str], line_no: int, keyword: str, minimum: int) -> int:
    if len(rest) != 1:
        raise InstanceFormatError(f"'{keyword}' takes exactly one value", line_no)
    value = _parse_int(rest[0], line_no, keyword)
    if value < minimum:
        raise InstanceFormatError(f"'{keyword}' must be >= {minimum}, got {value}", line_no)
    return value


def _parse_constraint(rest: list[str], line_no: int, n: int) -> Constraint:
    if "<=" not in rest:
        raise InstanceFormatError("constraint is missing '<='", line_no)
    split = rest.index("<=")
    terms, tail = rest[:split], rest[split + 1:]
    if len(tail) != 1:
        raise InstanceFormatError("constraint needs exactly one right-hand side after '<='", line_no)
    if not terms:
        raise InstanceFormatError("constraint has an empty support", line_no)

    pairs: list[tuple[int, int]] = []
    seen: set[int] = set()
    for term in terms:
        index_str, sep, coef_str = term.partition(":")
        if not sep:
            raise InstanceFormatError(f"expected index:coefficient, got {term!r}", line_no)
        index = _parse_int(index_str, line_no, "variable index")
        coef = _parse_int(coef_str, line_no, "coefficient")
        if not 1 <= index <= n:
            raise InstanceFormatError(f"variable {index} out of range 1..{n}", line_no)
        if index in seen:
            raise InstanceFormatError(f"duplicate variable {index} in constraint", line_no)
        seen.add(index)
        pairs.append((index - 1, coef))

    rhs = _parse_int(tail[0], line_no, "right-hand side")
    return Constraint.from_pairs(pairs, rhs)


def parse_instance(text: str | TextIO) -> Instance:
    """Parse the line-oriented instance format into a canonical Instance.

    ``n`` and ``m`` must appear before ``obj``/``con`` lines, ``obj`` exactly once
    and exactly ``m`` ``con`` lines. ``#`` starts a comment.
    """
    if not isinstance(text, str):
        text = text.read()

    n: int | None = None
    m: int | None = None
    objective: tuple[int, ...] | None = None
    constraints: list[Constraint] = []
    last_line = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        last_line = line_no
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *rest = line.split()

        if keyword == "n":
            if n is not None:
                raise InstanceFormatError("duplicate 'n' line", line_no)
            n = _parse_count(rest, line_no, "n", minimum=1)
        elif keyword == "m":
            if m is not None:
                raise InstanceFormatError("duplicate 'm' line", line_no)
            m = _parse_count(rest, line_no, "m", minimum=0)
        elif keyword == "obj":
            if n is None:
                raise InstanceFormatError("'obj' before 'n'", line_no)
            if objective is not None:
                raise InstanceFormatError("duplicate 'obj' line", line_no)
            if len(rest) != n:
                raise InstanceFormatError(f"'obj' has {len(rest)} coefficients, expected {n}", line_no)
            objective = tuple(_parse_int(tok, line_no, "objective coefficient") for tok in rest)
        elif keyword == "con":
            if n is None or m is None:
                raise InstanceFormatError("'con' before 'n' and 'm'", line_no)
            if len(constraints) >= m:
                raise InstanceFormatError(f"more than m={m} constraints", line_no)
            constraints.append(_parse_constraint(rest, line_no, n))
        else:
            raise InstanceFormatError(f"unknown keyword {keyword!r}", line_no)

    if n is None:
        raise InstanceFormatError("missing 'n' line", last_line)
    if m is None:
        raise InstanceFormatError("missing 'm' line", last_line)
    if objective is None:
        raise InstanceFormatError("missing 'obj' line", last_line)
    if len(constraints) != m:
        raise InstanceFormatError(f"found {len(constraints)} constraints, expected m={m}", last_line)

    instance = Instance(n=n, c=objective, constraints=tuple(constraints))
    logger.debug(f"Parsed instance n={instance.n} m={instance.m}")
    return instance


def write_instance(instance: Instance) -> str:
    """Canonical text form; ``parse_instance(write_instance(x)) == x``."""
    lines = [
        f"n {instance.n}",
        f"m {instance.m}",
        "obj " + " ".join(str(cj) for cj in instance.c),
    ]
    for con in instance.constraints:
        terms = " ".join(f"{j + 1}:{a}" for j, a in zip(con.support, con.coeffs))
        lines.append(f"con {terms} <= {con.rhs}")
    return "\n".join(lines) + "\n"


def _full_values(instance: Instance, a: Sequence[int] | Mapping[int, int]) -> list[int]:
    if isinstance(a, Mapping):
        for j in range(instance.n):
            if j not in a:
                raise InstanceValidationError(f"partial assignment: variable {j + 1} is unset")
        values = [a[j] for j in range(instance.n)]
    else:
        values = list(a)
        if len(values) != instance.n:
            raise InstanceValidationError(
                f"assignment has {len(values)} values, expected {instance.n}"
            )
    for j, v in enumerate(values):
        if v not in (0, 1):
            raise InstanceValidationError(f"variable {j + 1} has non-binary value {v!r}")
    return values


def evaluate(instance: Instance, a: Sequence[int] | Mapping[int, int]) -> tuple[int, bool]:
    """Objective value and feasibility of a full 0/1 assignment."""
    values = _full_values(instance, a)
    objective = sum(cj * xj for cj, xj in zip(instance.c, values))
    feasible = all(con.lhs(values) <= con.rhs for con in instance.constraints)
    return objective, feasible


def fits_int64(instance: Instance) -> bool:
    """True when every objective and row sum stays inside int64 for 0/1 inputs."""
    bound = sum(abs(cj) for cj in instance.c)
    for con in instance.constraints:
        bound = max(bound, sum(abs(a) for a in con.coeffs) + abs(con.rhs))
    return bound < _INT64_SAFE


def dense_view(instance: Instance) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Objective vector, dense constraint matrix and RHS vector as int64 arrays."""
    c = np.asarray(instance.c, dtype=np.int64)
    A = np.zeros((instance.m, instance.n), dtype=np.int64)
    b = np.zeros(instance.m, dtype=np.int64)
    for i, con in enumerate(instance.constraints):
        A[i, list(con.support)] = con.coeffs
        b[i] = con.rhs
    return c, A, b


def evaluate_batch(instance: Instance, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``evaluate`` over the rows of a (k, n) 0/1 matrix."""
    if X.ndim != 2 or X.shape[1] != instance.n:
        raise InstanceValidationError(f"expected a (k, {instance.n}) assignment matrix")
    if not fits_int64(instance):
        raise InstanceValidationError("coefficients too large for batch evaluation")
    c, A, b = dense_view(instance)
    X = X.astype(np.int64, copy=False)
    objectives = X @ c
    feasible = np.all(X @ A.T <= b, axis=1)
    return objectives, feasible


def generate_random(
    n: int,
    m: int,
    max_support: int,
    coef_range: tuple[int, int],
    seed: int,
) -> Instance:
    """Random sparse multidimensional-knapsack instance, deterministic in ``seed``.

    Each row draws 1..max_support distinct variables, nonnegative coefficients
    from ``coef_range`` and a RHS in [max a_ij, sum a_ij].
    """
    try:
        params = GeneratorParams(
            n=n, m=m, max_support=max_support,
            coef_lo=coef_range[0], coef_hi=coef_range[1], seed=seed,
        )
    except ValidationError as e:
        raise InstanceValidationError(f"invalid generator parameters: {e}") from None

    rng = random.Random(params.seed)
    lo, hi = params.coef_lo, params.coef_hi
    c = tuple(rng.randint(lo, hi) for _ in range(params.n))

    constraints = []
    for _ in range(params.m):
        size = rng.randint(1, params.max_support)
        support = sorted(rng.sample(range(params.n), size))
        coeffs = [rng.randint(lo, hi) for _ in support]
        rhs = rng.randint(max(coeffs), sum(coeffs))
        constraints.append(Constraint(support=tuple(support), coeffs=tuple(coeffs), rhs=rhs))

    return Instance(n=params.n, c=c, constraints=tuple(constraints))


def sweep_params(seed: int, n_max: int) -> GeneratorParams:
    """Instance shape for seeded batch sweeps: n <= n_max, m <= 12, supports <= 4."""
    rng = random.Random(seed)
    n = rng.randint(1, n_max)
    return GeneratorParams(
        n=n,
        m=rng.randint(0, 12),
        max_support=rng.randint(1, min(4, n)),
        coef_lo=0,
        coef_hi=9,
        seed=seed,
    )


def sweep_instance(seed: int, n_max: int) -> Instance:
    p = sweep_params(seed, n_max)
    return generate_random(p.n, p.m, p.max_support, (p.coef_lo, p.coef_hi), p.seed)

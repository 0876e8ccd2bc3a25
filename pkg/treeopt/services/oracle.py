"""Brute-force reference solver.

Enumerates every 0/1 assignment in lexicographic order (x_1 most significant)
and keeps the first maximum, so the reported optimum is the lexicographically
smallest one. No pruning.
"""

import logging
from itertools import product

import numpy as np

from treeopt.core.config import settings
from treeopt.core.errors import OracleLimitError, TreeOptError
from treeopt.schemas.instance import Instance
from treeopt.schemas.result import OracleResult, SolveStatus
from treeopt.services.instance_io import evaluate, evaluate_batch, fits_int64

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 16


def _chunk(start: int, stop: int, n: int) -> np.ndarray:
    k = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return (k[:, None] >> shifts) & 1


def _best_vectorised(instance: Instance) -> tuple[int, list[int]] | None:
    n = instance.n
    total = 1 << n
    best: tuple[int, list[int]] | None = None
    for start in range(0, total, CHUNK_SIZE):
        X = _chunk(start, min(total, start + CHUNK_SIZE), n)
        objectives, feasible = evaluate_batch(instance, X)
        rows = np.flatnonzero(feasible)
        if rows.size == 0:
            continue
        i = rows[np.argmax(objectives[rows])]  # first occurrence of the maximum
        value = int(objectives[i])
        if best is None or value > best[0]:
            best = (value, [int(v) for v in X[i]])
    return best


def _best_scalar(instance: Instance) -> tuple[int, list[int]] | None:
    best: tuple[int, list[int]] | None = None
    for x in product((0, 1), repeat=instance.n):
        value, feasible = evaluate(instance, x)
        if feasible and (best is None or value > best[0]):
            best = (value, list(x))
    return best


def brute_force(instance: Instance, limit: int | None = None) -> OracleResult:
    """Exact optimum by full enumeration of 2^n assignments; refuses n > limit."""
    limit = settings.oracle_limit if limit is None else limit
    if instance.n > limit:
        raise OracleLimitError(f"brute force refused: n={instance.n} exceeds limit {limit}")

    enumerated = 1 << instance.n
    best = _best_vectorised(instance) if fits_int64(instance) else _best_scalar(instance)
    if best is None:
        logger.debug(f"Oracle: infeasible after {enumerated} assignments")
        return OracleResult(status=SolveStatus.INFEASIBLE, enumerated=enumerated)

    # Re-score through the scalar path so both solvers share one definition
    value, feasible = evaluate(instance, best[1])
    if not feasible or value != best[0]:
        raise TreeOptError(f"oracle re-scoring mismatch: {value} vs {best[0]}")
    logger.debug(f"Oracle: optimum {value} after {enumerated} assignments")
    return OracleResult(
        status=SolveStatus.OPTIMAL,
        objective=value,
        assignment=best[1],
        enumerated=enumerated,
    )

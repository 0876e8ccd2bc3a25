from treeopt.schemas.instance import (
    Assignment,
    Constraint,
    Instance,
)
from treeopt.schemas.result import (
    BlockStats,
    BlockStrategy,
    FathomTest,
    OracleResult,
    SolverStats,
    SolveResult,
    SolveStatus,
)
from treeopt.schemas.decomposition import (
    DecompositionSummary,
    TreeEdgeSummary,
    ValidationReport,
    Violation,
)
from treeopt.schemas.options import (
    GeneratorParams,
    RunConfig,
    SolveOptions,
)
from treeopt.schemas.trace import (
    BagTraceRecord,
    ComparisonRecord,
    TraceEntry,
)

__all__ = [
    "Assignment",
    "Constraint",
    "Instance",
    "BlockStats",
    "BlockStrategy",
    "FathomTest",
    "OracleResult",
    "SolverStats",
    "SolveResult",
    "SolveStatus",
    "DecompositionSummary",
    "TreeEdgeSummary",
    "ValidationReport",
    "Violation",
    "GeneratorParams",
    "RunConfig",
    "SolveOptions",
    "BagTraceRecord",
    "ComparisonRecord",
    "TraceEntry",
]

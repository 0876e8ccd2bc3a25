from enum import Enum

from pydantic import BaseModel, Field, model_validator


class SolveStatus(str, Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"


class BlockStrategy(str, Enum):
    """Per-bag solve strategy for the parametric subproblem family."""

    EXHAUSTIVE = "exhaustive"
    IMPLICIT = "implicit"
    IMPLICIT_REUSE = "implicit-reuse"


class FathomTest(str, Enum):
    NONE = "none"
    TEST1 = "test1"  # optimistic bound <= incumbent
    TEST2 = "test2"  # best completion feasible
    TEST3 = "test3"  # some row unsatisfiable by every completion
    REUSED = "reused"  # skipped, fathomed by test 1/2 in a dominated member


class BlockStats(BaseModel):
    """Counters for one bag's subproblem family (one stats record per bag)."""

    bag: int
    strategy: BlockStrategy
    members: int = 0
    local_vars: int = 0
    boundary_vars: int = 0
    enumerated: int = 0  # complete local assignments scored by exhaustive search
    nodes: int = 0  # partial solutions on which the tests were evaluated
    expansions: int = 0  # partial solutions branched on
    test1: int = 0
    test2: int = 0
    test3: int = 0
    reuse_skips: int = 0
    shared_members: int = 0  # members answered by an equal-RHS member
    fallback: bool = False  # implicit enumeration disabled (mixed-sign objective)


class SolverStats(BaseModel):
    width: int | None = None
    bag_count: int = 0
    fill_edges: int = 0
    max_separator: int = 0
    max_table_size: int = 0
    table_entries: int = 0
    local_enumerations: int = 0
    blocks: list[BlockStats] = Field(default_factory=list)


class SolveResult(BaseModel):
    status: SolveStatus
    objective: int | None = None
    assignment: list[int] | None = None  # 0/1 per variable, position j is variable j+1
    stats: SolverStats = Field(default_factory=SolverStats)

    @model_validator(mode="after")
    def check_status_payload(self) -> "SolveResult":
        if self.status == SolveStatus.OPTIMAL:
            if self.objective is None or self.assignment is None:
                raise ValueError("OPTIMAL result needs objective and assignment")
        elif self.objective is not None or self.assignment is not None:
            raise ValueError("INFEASIBLE result carries no objective or assignment")
        return self


class OracleResult(SolveResult):
    enumerated: int  # always 2^n

"""Line-delimited records for DP traces and batch comparisons."""

from pydantic import BaseModel


class TraceEntry(BaseModel):
    key: list[int]  # separator assignment, ordered like BagTraceRecord.separator
    value: int | None  # None is BOTTOM
    argmax: dict[int, int] | None = None  # bag-local variable (1-based) -> value


class BagTraceRecord(BaseModel):
    """One h-table, laid out like the worked example's tables."""

    bag: int  # 1-based bag number
    variables: list[int]
    separator: list[int]
    parent: int | None
    entries: list[TraceEntry]


class ComparisonRecord(BaseModel):
    source: str  # "seed=<k>" or a file path
    n: int
    m: int
    td_status: str
    td_objective: int | None
    brute_status: str
    brute_objective: int | None
    agree: bool
    block_values_agree: bool | None = None
    implicit_nodes: int | None = None
    reuse_nodes: int | None = None
    error: str | None = None

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from treeopt.core.config import settings
from treeopt.schemas.result import BlockStrategy


class SolveOptions(BaseModel):
    """Options for the end-to-end tree-decomposition pipeline."""

    block_strategy: BlockStrategy = Field(default_factory=lambda: BlockStrategy(settings.block_strategy))
    ordering: list[int] | None = None  # 0-based elimination order, min-degree when absent


class GeneratorParams(BaseModel):
    n: int = Field(..., ge=1)
    m: int = Field(..., ge=0)
    max_support: int = Field(..., ge=1)
    coef_lo: int = Field(default=1, ge=0)
    coef_hi: int = Field(default=9, ge=0)
    seed: int = 0

    @model_validator(mode="after")
    def check_ranges(self) -> "GeneratorParams":
        if self.max_support > self.n:
            raise ValueError(f"max_support={self.max_support} exceeds n={self.n}")
        if self.coef_lo > self.coef_hi:
            raise ValueError(f"empty coefficient range {self.coef_lo}..{self.coef_hi}")
        return self


class RunConfig(BaseModel):
    """One CLI invocation, after flag parsing."""

    command: Literal["decompose", "solve", "gen", "compare"]
    input: Path | None = None
    method: Literal["td", "implicit-family", "brute"] = "td"
    block: BlockStrategy = BlockStrategy.EXHAUSTIVE
    ordering: Literal["min-degree", "file"] = "min-degree"
    ordering_file: Path | None = None
    dot: Path | None = None
    graph_dot: Path | None = None
    trace: Path | None = None
    stats_file: Path | None = None
    out: Path | None = None
    generator: GeneratorParams | None = None
    count: int = Field(default=100, ge=1)
    seed: int = 0
    n_max: int = Field(default=14, ge=1)
    block_ab: bool = False
    workers: int = Field(default=1, ge=1)
    as_json: bool = False

    @model_validator(mode="after")
    def check_command_inputs(self) -> "RunConfig":
        if self.command in ("decompose", "solve") and self.input is None:
            raise ValueError(f"{self.command} needs --input")
        if self.command == "gen" and self.generator is None:
            raise ValueError("gen needs generator parameters")
        if (self.ordering == "file") != (self.ordering_file is not None):
            raise ValueError("--ordering-file and ordering=file go together")
        return self

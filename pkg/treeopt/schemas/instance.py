from typing import TypeAlias

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Partial 0/1 assignment keyed by 0-based variable index
Assignment: TypeAlias = dict[int, int]


class Constraint(BaseModel):
    """One sparse row ``sum(coeffs[k] * x[support[k]]) <= rhs``.

    Indices are 0-based; the file format is 1-based and converted at the I/O boundary.
    """

    model_config = ConfigDict(frozen=True)

    support: tuple[int, ...] = Field(..., min_length=1)
    coeffs: tuple[int, ...]
    rhs: int

    @model_validator(mode="after")
    def check_canonical(self) -> "Constraint":
        if len(self.coeffs) != len(self.support):
            raise ValueError("coefficient count does not match support size")
        if any(j < 0 for j in self.support):
            raise ValueError("variable indices must be non-negative")
        if len(set(self.support)) != len(self.support):
            raise ValueError("duplicate variable index in constraint")
        if list(self.support) != sorted(self.support):
            raise ValueError("support must be sorted ascending")
        return self

    @classmethod
    def from_pairs(cls, pairs: list[tuple[int, int]], rhs: int) -> "Constraint":
        """Build the canonical (sorted) constraint from (index, coefficient) pairs."""
        ordered = sorted(pairs)
        return cls(
            support=tuple(j for j, _ in ordered),
            coeffs=tuple(a for _, a in ordered),
            rhs=rhs,
        )

    def coefficient(self, j: int) -> int:
        try:
            return self.coeffs[self.support.index(j)]
        except ValueError:
            return 0

    def lhs(self, values) -> int:
        return sum(a * values[j] for j, a in zip(self.support, self.coeffs))


class Instance(BaseModel):
    """Binary linear maximisation ``max c.x`` s.t. sparse ``<=`` rows, ``x`` in {0,1}^n."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    c: tuple[int, ...]
    constraints: tuple[Constraint, ...] = ()

    @model_validator(mode="after")
    def check_indices(self) -> "Instance":
        if len(self.c) != self.n:
            raise ValueError(f"objective has {len(self.c)} coefficients, expected {self.n}")
        for i, con in enumerate(self.constraints):
            for j in con.support:
                if j >= self.n:
                    raise ValueError(
                        f"constraint {i + 1} references variable {j + 1} but n={self.n}"
                    )
        return self

    @property
    def m(self) -> int:
        return len(self.constraints)

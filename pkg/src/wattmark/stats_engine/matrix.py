"""The n-subjects x k-conditions metric matrix all inferential tests consume."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ContractViolation


@dataclass(frozen=True)
class ConditionMatrix:
    """Fully crossed repeated-measures data: one row per subject, one
    column per condition, no missing cells."""

    conditions: tuple[str, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        conditions = tuple(str(c) for c in self.conditions)
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ContractViolation(
                f"values must be a 2-d subjects x conditions array, "
                f"got shape {values.shape}"
            )
        n, k = values.shape
        if k < 2:
            raise ContractViolation(f"need at least 2 conditions, got {k}")
        if n < 3:
            raise ContractViolation(f"need at least 3 subjects, got {n}")
        if len(conditions) != k:
            raise ContractViolation(
                f"{len(conditions)} condition labels for {k} value columns"
            )
        if len(set(conditions)) != len(conditions):
            raise ContractViolation(f"condition labels must be unique: {conditions}")
        if not np.isfinite(values).all():
            raise ContractViolation("matrix cells must all be finite (no missing data)")
        values.setflags(write=False)
        object.__setattr__(self, "conditions", conditions)
        object.__setattr__(self, "values", values)

    @property
    def n_subjects(self) -> int:
        return self.values.shape[0]

    @property
    def n_conditions(self) -> int:
        return self.values.shape[1]

    def column(self, condition: str) -> np.ndarray:
        try:
            idx = self.conditions.index(condition)
        except ValueError as exc:
            raise ContractViolation(
                f"unknown condition {condition!r}; matrix has {self.conditions}"
            ) from exc
        return self.values[:, idx]

    def to_csv(self, path: str | Path) -> Path:
        """Write the matrix with a header row of condition labels (full precision)."""
        path = Path(path)
        lines = [",".join(self.conditions)]
        for row in self.values:
            lines.append(",".join(repr(float(v)) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        return path

    @classmethod
    def from_csv(cls, path: str | Path) -> "ConditionMatrix":
        path = Path(path)
        if not path.is_file():
            raise ContractViolation(f"matrix file not found: {path}")
        lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
        if len(lines) < 2:
            raise ContractViolation(f"matrix file {path} has no data rows")
        conditions = tuple(label.strip() for label in lines[0].split(","))
        try:
            values = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
        except ValueError as exc:
            raise ContractViolation(f"matrix file {path}: {exc}") from exc
        widths = {len(row) for row in values}
        if widths != {len(conditions)}:
            raise ContractViolation(
                f"matrix file {path}: ragged rows {sorted(widths)} for "
                f"{len(conditions)} conditions"
            )
        return cls(conditions=conditions, values=np.asarray(values))

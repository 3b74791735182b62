"""Reading results files and assembling analysis matrices.

The results file is JSONL: one object per trial, successful or failed.
All analysis re-derives from this file alone; the repeated-measures
pairing treats trial index i under every condition as subject i.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import BalancedDesignError, ContractViolation, NoDataError
from ..stats_engine import ConditionMatrix

METRICS = (
    "pe_energy",
    "pe_dissertation",
    "inv_ppl",
    "tflops_per_watt",
    "pe_loss_vs_baseline",
    "rms_watts",
    "sample_count",
)


def load_rows(path: str | Path) -> list[dict]:
    """Parse a JSONL results file into row dicts."""
    path = Path(path)
    if not path.is_file():
        raise NoDataError(f"results file not found: {path}")
    rows: list[dict] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ContractViolation(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(row, dict) or "trial_id" not in row or "status" not in row:
            raise ContractViolation(f"{path}:{lineno}: not a trial row")
        rows.append(row)
    if not rows:
        raise NoDataError(f"results file is empty: {path}")
    return rows


def ok_rows(rows: list[dict]) -> list[dict]:
    return [row for row in rows if row.get("status") == "ok"]


def failed_rows(rows: list[dict]) -> list[dict]:
    return [row for row in rows if row.get("status") != "ok"]


def metric_value(row: dict, metric: str) -> float:
    """Extract one metric from a successful trial row."""
    if metric not in METRICS:
        raise ContractViolation(
            f"unknown metric {metric!r}; available: {', '.join(METRICS)}"
        )
    try:
        if metric in ("rms_watts", "sample_count"):
            return float(row["power"][metric])
        return float(row["report"][metric])
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractViolation(
            f"trial {row.get('trial_id')!r} lacks metric {metric!r}: {exc}"
        ) from exc


def condition_order(rows: list[dict]) -> tuple[str, ...]:
    """Condition labels in first-appearance order (the configured order)."""
    seen: dict[str, None] = {}
    for row in rows:
        seen.setdefault(row["condition"], None)
    return tuple(seen)


def build_matrix(rows: list[dict], metric: str) -> ConditionMatrix:
    """Assemble the subjects x conditions matrix for one metric.

    Requires a balanced design: every condition must retain the same
    trial indices (at least 3), so that index pairing is well defined.
    """
    retained = ok_rows(rows)
    if not retained:
        raise NoDataError("results contain no successful trials")
    conditions = condition_order(retained)
    by_condition: dict[str, dict[int, float]] = {label: {} for label in conditions}
    for row in retained:
        by_condition[row["condition"]][int(row["trial_index"])] = metric_value(
            row, metric
        )
    counts = {label: len(values) for label, values in by_condition.items()}
    if len(set(counts.values())) != 1:
        raise BalancedDesignError(
            f"retained trial counts differ across conditions: {counts}"
        )
    index_sets = [set(values) for values in by_condition.values()]
    common = sorted(set.intersection(*index_sets))
    if len(common) != next(iter(counts.values())):
        raise BalancedDesignError(
            "retained trial indices do not align across conditions; "
            "paired analysis is undefined"
        )
    if len(common) < 3:
        raise BalancedDesignError(
            f"need at least 3 retained trials per condition, got {len(common)}"
        )
    values = np.asarray(
        [[by_condition[label][index] for label in conditions] for index in common]
    )
    return ConditionMatrix(conditions=conditions, values=values)

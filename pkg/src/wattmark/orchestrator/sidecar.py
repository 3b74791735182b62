"""The workload sidecar protocol.

A workload communicates its outcome through a single JSON object written
atomically (write-then-rename) to the path the orchestrator hands it.
Keys are snake_case and exactly the fields of :class:`WorkloadResult`.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

from ..errors import ProtocolViolationError, SidecarSchemaError

EVAL_SOURCES = ("default-prompt", "fallback-prompt", "training-batch")
SIDECAR_FIELDS = (
    "eval_loss",
    "true_tokens",
    "epochs_completed",
    "skipped_batches",
    "param_count",
    "eval_source",
)


@dataclass(frozen=True)
class WorkloadResult:
    """A validated sidecar: what one workload run reported back."""

    eval_loss: float
    true_tokens: int
    epochs_completed: int
    skipped_batches: int
    param_count: int
    eval_source: str

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in SIDECAR_FIELDS}


def _require_int(data: dict, name: str, minimum: int) -> int:
    value = data[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise SidecarSchemaError(f"field {name}: expected an integer, got {value!r}")
    if value < minimum:
        raise SidecarSchemaError(f"field {name}: must be >= {minimum}, got {value}")
    return value


def parse_sidecar(data: dict) -> WorkloadResult:
    """Validate a decoded sidecar object against the protocol schema."""
    if not isinstance(data, dict):
        raise SidecarSchemaError(
            f"sidecar must be a single JSON object, got {type(data).__name__}"
        )
    for name in SIDECAR_FIELDS:
        if name not in data:
            raise SidecarSchemaError(f"missing field: {name}")
    for name in data:
        if name not in SIDECAR_FIELDS:
            raise SidecarSchemaError(f"unknown field: {name}")
    eval_loss = data["eval_loss"]
    if isinstance(eval_loss, bool) or not isinstance(eval_loss, (int, float)):
        raise SidecarSchemaError(
            f"field eval_loss: expected a number, got {eval_loss!r}"
        )
    if not math.isfinite(eval_loss):
        raise SidecarSchemaError(f"field eval_loss: must be finite, got {eval_loss!r}")
    true_tokens = _require_int(data, "true_tokens", 1)
    epochs_completed = _require_int(data, "epochs_completed", 1)
    skipped_batches = _require_int(data, "skipped_batches", 0)
    param_count = _require_int(data, "param_count", 1)
    eval_source = data["eval_source"]
    if eval_source not in EVAL_SOURCES:
        raise SidecarSchemaError(
            f"field eval_source: must be one of {EVAL_SOURCES}, got {eval_source!r}"
        )
    return WorkloadResult(
        eval_loss=float(eval_loss),
        true_tokens=true_tokens,
        epochs_completed=epochs_completed,
        skipped_batches=skipped_batches,
        param_count=param_count,
        eval_source=eval_source,
    )


def ingest_sidecar(
    path: str | Path,
    *,
    target_tokens: int | None = None,
    expected_epochs: int | None = None,
) -> WorkloadResult:
    """Read, parse, and validate a workload sidecar file.

    When ``target_tokens``/``expected_epochs`` are given, the protocol
    invariants (true_tokens >= target, epochs as configured) are enforced.
    """
    path = Path(path)
    if not path.is_file():
        raise SidecarSchemaError(f"sidecar file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SidecarSchemaError(f"sidecar file {path} is not valid JSON: {exc}") from exc
    result = parse_sidecar(data)
    if target_tokens is not None and result.true_tokens < target_tokens:
        raise ProtocolViolationError(
            f"true_tokens {result.true_tokens} is below the condition target "
            f"{target_tokens}; the workload must reach or slightly exceed it"
        )
    if expected_epochs is not None and result.epochs_completed != expected_epochs:
        raise ProtocolViolationError(
            f"epochs_completed {result.epochs_completed} does not match the "
            f"configured {expected_epochs}"
        )
    return result


def write_sidecar(path: str | Path, payload: dict | WorkloadResult) -> Path:
    """Write a sidecar atomically: temporary file in place, then rename."""
    path = Path(path)
    if isinstance(payload, WorkloadResult):
        payload = payload.as_dict()
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    os.replace(tmp, path)
    return path

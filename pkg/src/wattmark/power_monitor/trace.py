"""Power trace data model: timestamped watt samples for one trial."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from ..errors import ContractViolation, InvalidTraceError, SealedTraceError

TRACE_HEADER = "elapsed_ms,watts"


@dataclass(frozen=True)
class PowerSample:
    """One instantaneous board-power reading."""

    elapsed_ms: int
    watts: float

    def __post_init__(self) -> None:
        if isinstance(self.elapsed_ms, bool) or not isinstance(self.elapsed_ms, int):
            raise ContractViolation(
                f"elapsed_ms must be an integer, got {self.elapsed_ms!r}"
            )
        if self.elapsed_ms < 0:
            raise ContractViolation(f"elapsed_ms must be >= 0, got {self.elapsed_ms}")
        if not isinstance(self.watts, (int, float)) or isinstance(self.watts, bool):
            raise ContractViolation(f"watts must be a real number, got {self.watts!r}")
        if not math.isfinite(self.watts) or self.watts <= 0:
            raise ContractViolation(
                f"watts must be positive and finite, got {self.watts!r}"
            )


class PowerTrace:
    """Ordered power samples collected for a single trial.

    A trace is append-only until :meth:`seal` is called; sealing makes it
    immutable and is the synchronization point between the sampling thread
    and any reader. Aggregation only accepts sealed traces.
    """

    def __init__(self, trial_id: str, sample_interval_s: float) -> None:
        if not math.isfinite(sample_interval_s) or sample_interval_s <= 0:
            raise ContractViolation(
                f"sample_interval_s must be positive, got {sample_interval_s!r}"
            )
        self.trial_id = str(trial_id)
        self.sample_interval_s = float(sample_interval_s)
        self._samples: list[PowerSample] = []
        self._sealed = False

    @property
    def sealed(self) -> bool:
        return self._sealed

    @property
    def samples(self) -> tuple[PowerSample, ...]:
        return tuple(self._samples)

    @property
    def sample_count(self) -> int:
        return len(self._samples)

    def __len__(self) -> int:
        return len(self._samples)

    def __iter__(self) -> Iterator[PowerSample]:
        return iter(self._samples)

    def append(self, sample: PowerSample) -> None:
        if self._sealed:
            raise SealedTraceError(
                f"trace {self.trial_id!r} is sealed; no samples may be appended"
            )
        if self._samples and sample.elapsed_ms < self._samples[-1].elapsed_ms:
            raise ContractViolation(
                f"elapsed_ms must be non-decreasing within a trace: "
                f"{sample.elapsed_ms} after {self._samples[-1].elapsed_ms}"
            )
        self._samples.append(sample)

    def seal(self) -> "PowerTrace":
        """Freeze the trace; requires at least one retained sample."""
        if self._sealed:
            raise SealedTraceError(f"trace {self.trial_id!r} is already sealed")
        if not self._samples:
            raise InvalidTraceError(
                f"trace {self.trial_id!r} has zero samples; a retained trial "
                f"needs at least one power reading"
            )
        self._sealed = True
        return self

    def watts(self) -> np.ndarray:
        return np.asarray([s.watts for s in self._samples], dtype=np.float64)

    def to_csv(self, path: str | Path) -> Path:
        """Persist a sealed trace (UTF-8, LF endings, watts to 9 significant digits)."""
        if not self._sealed:
            raise ContractViolation(
                f"trace {self.trial_id!r} must be sealed before persistence"
            )
        path = Path(path)
        lines = [TRACE_HEADER]
        lines.extend(f"{s.elapsed_ms},{s.watts:.9g}" for s in self._samples)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        return path

    @classmethod
    def from_csv(
        cls,
        path: str | Path,
        trial_id: str | None = None,
        sample_interval_s: float | None = None,
    ) -> "PowerTrace":
        """Load a sealed trace from its CSV file.

        When ``sample_interval_s`` is omitted it is inferred from the mean
        gap between samples (1.0 s for single-sample traces).
        """
        path = Path(path)
        if not path.is_file():
            raise InvalidTraceError(f"trace file not found: {path}")
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines or lines[0].strip() != TRACE_HEADER:
            raise InvalidTraceError(
                f"trace file {path} must start with header {TRACE_HEADER!r}"
            )
        rows: list[PowerSample] = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise InvalidTraceError(f"{path}:{lineno}: expected 2 columns")
            try:
                elapsed_ms = int(parts[0])
                watts = float(parts[1])
            except ValueError as exc:
                raise InvalidTraceError(f"{path}:{lineno}: {exc}") from exc
            rows.append(PowerSample(elapsed_ms=elapsed_ms, watts=watts))
        if not rows:
            raise InvalidTraceError(f"trace file {path} contains no samples")
        if sample_interval_s is None:
            if len(rows) > 1:
                span_ms = rows[-1].elapsed_ms - rows[0].elapsed_ms
                sample_interval_s = max(span_ms / (len(rows) - 1) / 1000.0, 1e-3)
            else:
                sample_interval_s = 1.0
        trace = cls(trial_id or path.stem, sample_interval_s)
        for sample in rows:
            trace.append(sample)
        return trace.seal()


def rms_watts(trace: PowerTrace) -> float:
    """Aggregate a sealed trace into root-mean-square watts.

    Computed as ``peak * sqrt(mean((w / peak)^2))`` so constant traces
    return their value exactly; the mean uses pairwise summation.
    """
    if not trace.sealed:
        raise ContractViolation(
            f"trace {trace.trial_id!r} must be sealed before aggregation"
        )
    if len(trace) == 0:
        raise ContractViolation(f"trace {trace.trial_id!r} has no samples")
    w = trace.watts()
    peak = float(w.max())
    scaled = w / peak
    return peak * math.sqrt(float(np.mean(scaled * scaled)))

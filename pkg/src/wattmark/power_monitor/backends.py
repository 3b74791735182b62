"""Interchangeable sources of instantaneous GPU power readings."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np

from ..errors import (
    ContractViolation,
    InvalidTraceError,
    TelemetryError,
    TelemetryReadError,
)
from .trace import PowerTrace


class TelemetryBackend(ABC):
    """A pluggable source of positive, finite wattage readings."""

    kind: str = "abstract"

    @abstractmethod
    def read_watts(self) -> float:
        """Return one power reading in watts.

        Raises :class:`TelemetryReadError` when a single reading cannot be
        obtained; the sampler skips and tallies such readings.
        """

    def describe(self) -> str:
        return self.kind

    def close(self) -> None:
        """Release any device handles. Default is a no-op."""


class SyntheticBackend(TelemetryBackend):
    """Deterministic pseudo-random wattage around a configurable level."""

    kind = "synthetic"

    def __init__(self, mean_watts: float = 200.0, noise_sd: float = 0.0, seed=0) -> None:
        if not math.isfinite(mean_watts) or mean_watts <= 0:
            raise ContractViolation(f"mean_watts must be positive, got {mean_watts!r}")
        if not math.isfinite(noise_sd) or noise_sd < 0:
            raise ContractViolation(f"noise_sd must be >= 0, got {noise_sd!r}")
        self.mean_watts = float(mean_watts)
        self.noise_sd = float(noise_sd)
        self._rng = np.random.default_rng(seed)

    def read_watts(self) -> float:
        value = self.mean_watts
        if self.noise_sd:
            value += float(self._rng.normal(0.0, self.noise_sd))
        # Board power is physically positive; clamp the (vanishingly rare)
        # negative tail instead of violating the sample contract.
        return max(value, 1e-6)

    def describe(self) -> str:
        return f"synthetic(mean={self.mean_watts:g} W, sd={self.noise_sd:g})"


class ReplayBackend(TelemetryBackend):
    """Replays watt readings from a previously recorded trace file."""

    kind = "trace-replay"

    def __init__(self, trace_path: str | Path) -> None:
        self.trace_path = Path(trace_path)
        try:
            self._recorded = PowerTrace.from_csv(self.trace_path)
        except InvalidTraceError as exc:
            raise TelemetryError(f"replay source is unusable: {exc}") from exc
        self._cursor = 0

    def read_watts(self) -> float:
        if self._cursor >= len(self._recorded):
            raise TelemetryReadError(
                f"replay source exhausted after {len(self._recorded)} readings: "
                f"{self.trace_path}"
            )
        watts = self._recorded.samples[self._cursor].watts
        self._cursor += 1
        return watts

    def replay_trace(self, trial_id: str | None = None) -> PowerTrace:
        """Reconstruct the recorded trace verbatim, original timestamps included."""
        trace = PowerTrace(
            trial_id or self._recorded.trial_id, self._recorded.sample_interval_s
        )
        for sample in self._recorded.samples:
            trace.append(sample)
        return trace.seal()

    def describe(self) -> str:
        return f"trace-replay({self.trace_path})"


class NvmlBackend(TelemetryBackend):
    """Live board power via the NVIDIA management library.

    Requires the optional ``live`` extra (nvidia-ml-py). Constructed lazily
    so that every other backend works on machines without a GPU stack.
    """

    kind = "live-device"

    def __init__(self, device_index: int = 0) -> None:
        try:
            import pynvml
        except ImportError as exc:
            raise TelemetryError(
                "the live backend needs the nvidia-ml-py package; "
                "install the 'live' extra"
            ) from exc
        self._pynvml = pynvml
        self.device_index = int(device_index)
        try:
            pynvml.nvmlInit()
            self._handle = pynvml.nvmlDeviceGetHandleByIndex(self.device_index)
        except pynvml.NVMLError as exc:
            raise TelemetryError(
                f"cannot reach GPU device {self.device_index}: {exc}"
            ) from exc

    def read_watts(self) -> float:
        try:
            milliwatts = self._pynvml.nvmlDeviceGetPowerUsage(self._handle)
        except self._pynvml.NVMLError as exc:
            raise TelemetryReadError(str(exc)) from exc
        watts = milliwatts / 1000.0
        if not math.isfinite(watts) or watts <= 0:
            raise TelemetryReadError(f"device returned non-positive power: {watts!r}")
        return watts

    def close(self) -> None:
        try:
            self._pynvml.nvmlShutdown()
        except self._pynvml.NVMLError:
            pass

    def describe(self) -> str:
        return f"live-device(index={self.device_index})"

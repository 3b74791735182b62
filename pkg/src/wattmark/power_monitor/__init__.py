"""GPU power sampling: traces, telemetry backends, and the interval sampler."""

from .backends import NvmlBackend, ReplayBackend, SyntheticBackend, TelemetryBackend
from .sampler import (
    MonotonicClock,
    SamplingSession,
    SimulatedClock,
    start_sampling,
    stop_and_seal,
)
from .trace import PowerSample, PowerTrace, rms_watts

__all__ = [
    "MonotonicClock",
    "NvmlBackend",
    "PowerSample",
    "PowerTrace",
    "ReplayBackend",
    "SamplingSession",
    "SimulatedClock",
    "SyntheticBackend",
    "TelemetryBackend",
    "rms_watts",
    "start_sampling",
    "stop_and_seal",
]

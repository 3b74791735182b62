"""Typed failures shared across the toolkit.

Every error raised on purpose derives from :class:`WattmarkError`, so
callers can distinguish contract problems from genuine bugs.
"""

from __future__ import annotations


class WattmarkError(Exception):
    """Base class for all toolkit errors."""


class ContractViolation(WattmarkError):
    """An operation was called with arguments that violate its contract."""


class NumericDomainError(ContractViolation):
    """A metric argument is outside its numeric domain or overflows a double."""


class TelemetryError(WattmarkError):
    """A telemetry backend is unreachable or failed fatally."""


class TelemetryReadError(TelemetryError):
    """A single power reading failed; the sample may be skipped."""


class InvalidTraceError(WattmarkError):
    """A power trace does not satisfy the retention rule (>= 1 sample)."""


class SealedTraceError(WattmarkError):
    """A sealed trace or finished sampling session was mutated again."""


class TooFewSamplesError(WattmarkError):
    """A statistical test received fewer observations than it supports."""


class DegenerateSampleError(WattmarkError):
    """A sample has zero variance and cannot be tested for normality."""


class DegenerateDesignError(WattmarkError):
    """A condition matrix carries no usable variance for the requested test."""


class DegeneratePairError(WattmarkError):
    """A condition pair has zero difference variance."""


class BalancedDesignError(WattmarkError):
    """Retained trial counts are unequal or too small for a paired analysis."""


class ConfigError(WattmarkError):
    """An experiment configuration file or override is invalid."""


class SidecarSchemaError(WattmarkError):
    """A workload sidecar file is missing, malformed, or mistyped."""


class ProtocolViolationError(WattmarkError):
    """A sidecar parsed cleanly but breaks a cross-component invariant."""


class WorkloadFailure(WattmarkError):
    """The workload subprocess exited abnormally; the trial is recorded as failed."""


class NoDataError(WattmarkError):
    """A results file contains no usable trial rows."""

"""Experiment orchestration: config, sidecar protocol, trial execution."""

from .config import (
    BACKENDS,
    BUILTIN_REPLAY_SIDECAR,
    BUILTIN_STUB,
    ExperimentConfig,
    apply_overrides,
    condition_label,
    load_config,
)
from .results import (
    METRICS,
    build_matrix,
    condition_order,
    failed_rows,
    load_rows,
    metric_value,
    ok_rows,
)
from .runner import (
    CompletedTrial,
    ExperimentResult,
    ExperimentRunner,
    FailedTrial,
    TrialPlan,
    round_sig,
    run_experiment,
)
from .sidecar import (
    EVAL_SOURCES,
    WorkloadResult,
    ingest_sidecar,
    parse_sidecar,
    write_sidecar,
)
from .simulate import SyntheticProfile, mean_watts_for, synthetic_outcome

__all__ = [
    "BACKENDS",
    "BUILTIN_REPLAY_SIDECAR",
    "BUILTIN_STUB",
    "CompletedTrial",
    "EVAL_SOURCES",
    "ExperimentConfig",
    "ExperimentResult",
    "ExperimentRunner",
    "FailedTrial",
    "METRICS",
    "SyntheticProfile",
    "TrialPlan",
    "WorkloadResult",
    "apply_overrides",
    "build_matrix",
    "condition_label",
    "condition_order",
    "failed_rows",
    "ingest_sidecar",
    "load_config",
    "load_rows",
    "mean_watts_for",
    "metric_value",
    "ok_rows",
    "parse_sidecar",
    "round_sig",
    "run_experiment",
    "synthetic_outcome",
    "write_sidecar",
]

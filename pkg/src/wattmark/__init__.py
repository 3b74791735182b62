"""wattmark: GPU power profiling, energy-aware parameter-efficiency
metrics, and repeated-measures analysis for training trials."""

from .efficiency_metrics import (
    ComputeSpec,
    EfficiencyReport,
    ModelSpec,
    TokenExposure,
    TrialRecord,
    evaluate_trial,
    inv_ppl,
    pe_dissertation,
    pe_energy,
    pe_loss,
    tflops_per_watt,
    token_exposure,
)
from .orchestrator import (
    ExperimentConfig,
    ExperimentRunner,
    WorkloadResult,
    ingest_sidecar,
    load_config,
    run_experiment,
)
from .power_monitor import (
    PowerSample,
    PowerTrace,
    ReplayBackend,
    SyntheticBackend,
    TelemetryBackend,
    rms_watts,
    start_sampling,
    stop_and_seal,
)
from .stats_engine import (
    AnalysisBundle,
    AnovaResult,
    ConditionMatrix,
    NormalityResult,
    PairwiseResult,
    SphericityResult,
    analyze,
    gg_epsilon,
    mauchly,
    paired_t_bonferroni,
    rm_anova,
    shapiro_wilk,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisBundle",
    "AnovaResult",
    "ComputeSpec",
    "ConditionMatrix",
    "EfficiencyReport",
    "ExperimentConfig",
    "ExperimentRunner",
    "ModelSpec",
    "NormalityResult",
    "PairwiseResult",
    "PowerSample",
    "PowerTrace",
    "ReplayBackend",
    "SphericityResult",
    "SyntheticBackend",
    "TelemetryBackend",
    "TokenExposure",
    "TrialRecord",
    "WorkloadResult",
    "analyze",
    "evaluate_trial",
    "gg_epsilon",
    "ingest_sidecar",
    "inv_ppl",
    "load_config",
    "mauchly",
    "paired_t_bonferroni",
    "pe_dissertation",
    "pe_energy",
    "pe_loss",
    "rm_anova",
    "rms_watts",
    "run_experiment",
    "shapiro_wilk",
    "start_sampling",
    "stop_and_seal",
    "tflops_per_watt",
    "token_exposure",
]

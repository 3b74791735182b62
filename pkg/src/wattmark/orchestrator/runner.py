"""Experiment execution: sequential trials with concurrent power sampling."""

from __future__ import annotations

import json
import logging
import math
import os
import shlex
import subprocess
from dataclasses import dataclass
from pathlib import Path

from ..efficiency_metrics import (
    ComputeSpec,
    EfficiencyReport,
    ModelSpec,
    TokenExposure,
    TrialRecord,
    evaluate_trial,
)
from ..errors import (
    ConfigError,
    SidecarSchemaError,
    WattmarkError,
    WorkloadFailure,
)
from ..power_monitor import (
    NvmlBackend,
    PowerTrace,
    ReplayBackend,
    SimulatedClock,
    SyntheticBackend,
    rms_watts,
    start_sampling,
)
from .config import BUILTIN_REPLAY_SIDECAR, BUILTIN_STUB, ExperimentConfig
from .sidecar import WorkloadResult, ingest_sidecar, write_sidecar
from .simulate import mean_watts_for, synthetic_outcome

log = logging.getLogger(__name__)

# Spreads per-trial seeds so conditions never share a stream.
_CONDITION_SEED_STRIDE = 100003


def round_sig(value: float, digits: int = 9) -> float:
    """Round to ``digits`` significant figures (report serialization)."""
    if value == 0 or not math.isfinite(value):
        return float(value)
    return float(f"{value:.{digits}g}")


@dataclass(frozen=True)
class TrialPlan:
    """Identity and seeding of one scheduled trial."""

    condition: str
    target_tokens: int
    trial_index: int
    seed: int

    @property
    def trial_id(self) -> str:
        return f"{self.condition}-{self.trial_index:03d}"


@dataclass(frozen=True)
class FailedTrial:
    trial_id: str
    condition: str
    reason: str


@dataclass(frozen=True)
class CompletedTrial:
    plan: TrialPlan
    record: TrialRecord
    workload: WorkloadResult
    report: EfficiencyReport
    rms_watts: float
    skipped_reads: int
    workload_start_offset_ms: int
    trace_file: str


@dataclass(frozen=True)
class ExperimentResult:
    results_path: Path
    completed: tuple[CompletedTrial, ...]
    failures: tuple[FailedTrial, ...]

    @property
    def retained_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for trial in self.completed:
            counts[trial.plan.condition] = counts.get(trial.plan.condition, 0) + 1
        return counts


class ExperimentRunner:
    """Runs trials sequentially, one sampling activity per trial."""

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config
        self.out_dir = Path(config.out_dir)
        self.traces_dir = self.out_dir / "traces"
        self.sidecars_dir = self.out_dir / "sidecars"
        self.logs_dir = self.out_dir / "logs"

    def plans(self) -> list[TrialPlan]:
        plans = []
        for cond_index, target in enumerate(self.config.conditions):
            label = self.config.label_for(target)
            for trial_index in range(self.config.trials_per_condition):
                plans.append(
                    TrialPlan(
                        condition=label,
                        target_tokens=target,
                        trial_index=trial_index,
                        seed=self.config.seed
                        + _CONDITION_SEED_STRIDE * cond_index
                        + trial_index,
                    )
                )
        return plans

    # -- trace acquisition -------------------------------------------------

    def _replayed_trace(self, plan: TrialPlan) -> PowerTrace:
        trace_path = Path(self.config.replay_dir) / f"{plan.trial_id}.csv"
        return ReplayBackend(trace_path).replay_trace(plan.trial_id)

    def _simulated_trace(self, plan: TrialPlan, duration_s: float) -> tuple[PowerTrace, int]:
        backend = SyntheticBackend(
            mean_watts=mean_watts_for(plan.target_tokens, self.config.synthetic),
            noise_sd=self.config.synthetic.watts_noise_sd,
            seed=[plan.seed, 1],
        )
        session = start_sampling(
            backend,
            self.config.sample_interval_s,
            clock=SimulatedClock(duration_s),
            trial_id=plan.trial_id,
        )
        session.run_to_completion()
        trace = session.stop_and_seal()
        return trace, session.skipped_reads

    def _live_backend(self, plan: TrialPlan):
        if self.config.backend == "synthetic":
            return SyntheticBackend(
                mean_watts=mean_watts_for(plan.target_tokens, self.config.synthetic),
                noise_sd=self.config.synthetic.watts_noise_sd,
                seed=[plan.seed, 1],
            )
        return NvmlBackend(self.config.device_index)

    # -- workload execution ------------------------------------------------

    def _render_command(self, plan: TrialPlan, sidecar_path: Path) -> list[str]:
        mapping = {
            "target_tokens": plan.target_tokens,
            "epochs": self.config.epochs,
            "seed": plan.seed,
            "sidecar_path": str(sidecar_path),
        }
        try:
            return [
                token.format(**mapping)
                for token in shlex.split(self.config.workload_command)
            ]
        except (KeyError, IndexError, ValueError) as exc:
            raise ConfigError(
                f"workload.command has an invalid placeholder: {exc}"
            ) from exc

    def _run_subprocess(self, plan: TrialPlan, command: list[str]) -> None:
        log_path = self.logs_dir / f"{plan.trial_id}.log"
        try:
            with open(log_path, "w", encoding="utf-8") as sink:
                proc = subprocess.run(
                    command,
                    stdout=sink,
                    stderr=subprocess.STDOUT,
                    timeout=self.config.workload_timeout_s,
                )
        except subprocess.TimeoutExpired as exc:
            raise WorkloadFailure(
                f"workload timed out after {self.config.workload_timeout_s:g} s"
            ) from exc
        except OSError as exc:
            raise WorkloadFailure(f"workload could not start: {exc}") from exc
        if proc.returncode != 0:
            raise WorkloadFailure(
                f"workload exited {proc.returncode} (log: {log_path})"
            )

    def _copy_sidecar_fixture(self, plan: TrialPlan, sidecar_path: Path) -> None:
        fixture = Path(self.config.sidecar_dir) / f"{plan.trial_id}.json"
        if not fixture.is_file():
            raise SidecarSchemaError(f"sidecar fixture not found: {fixture}")
        tmp = sidecar_path.with_suffix(".json.tmp")
        tmp.write_bytes(fixture.read_bytes())
        os.replace(tmp, sidecar_path)

    # -- one trial -----------------------------------------------------------

    def run_trial(self, plan: TrialPlan) -> CompletedTrial:
        """Execute one trial; raises a typed error when it must be recorded
        as failed."""
        sidecar_path = self.sidecars_dir / f"{plan.trial_id}.json"
        sidecar_path.unlink(missing_ok=True)
        skipped_reads = 0
        offset_ms = 0

        if self.config.workload_command == BUILTIN_STUB:
            payload, duration_s = synthetic_outcome(
                plan.target_tokens,
                self.config.epochs,
                seed=[plan.seed, 0],
                profile=self.config.synthetic,
            )
            write_sidecar(sidecar_path, payload)
            if self.config.backend == "replay":
                trace = self._replayed_trace(plan)
            else:
                trace, skipped_reads = self._simulated_trace(plan, duration_s)
        elif self.config.workload_command == BUILTIN_REPLAY_SIDECAR:
            self._copy_sidecar_fixture(plan, sidecar_path)
            trace = self._replayed_trace(plan)
        else:
            command = self._render_command(plan, sidecar_path)
            if self.config.backend == "replay":
                self._run_subprocess(plan, command)
                trace = self._replayed_trace(plan)
            else:
                backend = self._live_backend(plan)
                try:
                    # The startup sample precedes the workload launch.
                    session = start_sampling(
                        backend,
                        self.config.sample_interval_s,
                        trial_id=plan.trial_id,
                    )
                    offset_ms = session.elapsed_ms()
                    try:
                        self._run_subprocess(plan, command)
                    finally:
                        trace = session.stop_and_seal()
                        skipped_reads = session.skipped_reads
                finally:
                    backend.close()

        workload = ingest_sidecar(
            sidecar_path,
            target_tokens=plan.target_tokens,
            expected_epochs=self.config.epochs,
        )
        trace_file = f"traces/{plan.trial_id}.csv"
        trace_path = trace.to_csv(self.out_dir / trace_file)
        # The persisted file is the trace of record: reload it so every
        # derived number in the results row can be recomputed from the
        # artifact alone (watts are stored at 9 significant digits).
        trace = PowerTrace.from_csv(
            trace_path,
            trial_id=trace.trial_id,
            sample_interval_s=trace.sample_interval_s,
        )
        record = TrialRecord(
            trial_id=plan.trial_id,
            condition=plan.condition,
            eval_loss=workload.eval_loss,
            model=ModelSpec(workload.param_count),
            compute=ComputeSpec(self.config.cs_tflops, self.config.k_norm),
            exposure=TokenExposure(
                target_tokens=plan.target_tokens,
                epochs=self.config.epochs,
                tt_scale=self.config.tt_scale,
            ),
            power=trace,
        )
        report = evaluate_trial(record, self.config.baseline_pe)
        return CompletedTrial(
            plan=plan,
            record=record,
            workload=workload,
            report=report,
            rms_watts=rms_watts(trace),
            skipped_reads=skipped_reads,
            workload_start_offset_ms=offset_ms,
            trace_file=trace_file,
        )

    # -- the whole experiment -------------------------------------------------

    def _ok_row(self, trial: CompletedTrial) -> dict:
        workload = trial.workload
        return {
            "trial_id": trial.plan.trial_id,
            "condition": trial.plan.condition,
            "trial_index": trial.plan.trial_index,
            "target_tokens": trial.plan.target_tokens,
            "seed": trial.plan.seed,
            "status": "ok",
            "workload": {
                "eval_loss": workload.eval_loss,
                "true_tokens": workload.true_tokens,
                "epochs_completed": workload.epochs_completed,
                "skipped_batches": workload.skipped_batches,
                "param_count": workload.param_count,
                "eval_source": workload.eval_source,
            },
            "power": {
                "trace_file": trial.trace_file,
                "sample_interval_s": trial.record.power.sample_interval_s,
                "sample_count": len(trial.record.power),
                "skipped_reads": trial.skipped_reads,
                "workload_start_offset_ms": trial.workload_start_offset_ms,
                "rms_watts": round_sig(trial.rms_watts),
            },
            "report": {
                name: round_sig(value)
                for name, value in trial.report.as_dict().items()
            },
        }

    def _failed_row(self, plan: TrialPlan, error: WattmarkError) -> dict:
        return {
            "trial_id": plan.trial_id,
            "condition": plan.condition,
            "trial_index": plan.trial_index,
            "target_tokens": plan.target_tokens,
            "seed": plan.seed,
            "status": "failed",
            "error_type": type(error).__name__,
            "reason": str(error),
        }

    def run_experiment(self, progress=None) -> ExperimentResult:
        """Run every planned trial sequentially and persist the results file."""
        for directory in (self.out_dir, self.traces_dir, self.sidecars_dir, self.logs_dir):
            directory.mkdir(parents=True, exist_ok=True)
        rows: list[dict] = []
        completed: list[CompletedTrial] = []
        failures: list[FailedTrial] = []
        for plan in self.plans():
            try:
                trial = self.run_trial(plan)
            except ConfigError:
                raise
            except WattmarkError as exc:
                log.error("trial %s failed: %s", plan.trial_id, exc)
                failures.append(
                    FailedTrial(plan.trial_id, plan.condition, str(exc))
                )
                rows.append(self._failed_row(plan, exc))
                if progress is not None:
                    progress(plan.trial_id, f"failed: {exc}")
                continue
            completed.append(trial)
            rows.append(self._ok_row(trial))
            if progress is not None:
                progress(
                    plan.trial_id,
                    f"ok ({len(trial.record.power)} samples, "
                    f"rms {trial.rms_watts:.1f} W)",
                )
        results_path = self.out_dir / "results.jsonl"
        payload = "\n".join(json.dumps(row, separators=(",", ":")) for row in rows)
        results_path.write_text(payload + "\n", encoding="utf-8", newline="\n")
        return ExperimentResult(
            results_path=results_path,
            completed=tuple(completed),
            failures=tuple(failures),
        )


def run_experiment(config: ExperimentConfig, progress=None) -> ExperimentResult:
    """Convenience wrapper: run the whole experiment for a config."""
    return ExperimentRunner(config).run_experiment(progress)

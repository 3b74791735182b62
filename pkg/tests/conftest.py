from __future__ import annotations

import json
from pathlib import Path

import pytest

from wattmark.power_monitor import PowerSample, PowerTrace

FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def expected_stats() -> dict:
    return json.loads((FIXTURES / "stats" / "expected_stats.json").read_text())


@pytest.fixture(scope="session")
def synthetic_run(tmp_path_factory):
    """One shared 2x3 synthetic experiment reused by read-only tests."""
    from wattmark.orchestrator import ExperimentConfig, run_experiment

    config = ExperimentConfig(
        conditions=(500000, 1000000),
        trials_per_condition=3,
        cs_tflops=31.52,
        seed=7,
        out_dir=tmp_path_factory.mktemp("shared-run") / "out",
        backend="synthetic",
    )
    return config, run_experiment(config)


def make_trace(
    watts, interval_s: float = 60.0, trial_id: str = "trial", sealed: bool = True
) -> PowerTrace:
    trace = PowerTrace(trial_id, interval_s)
    for k, value in enumerate(watts):
        trace.append(PowerSample(elapsed_ms=k * int(interval_s * 1000), watts=value))
    if sealed:
        trace.seal()
    return trace


def write_config(
    path: Path,
    *,
    conditions=(500000, 1000000),
    trials: int = 3,
    out_dir: Path,
    backend: str = "synthetic",
    seed: int = 7,
    replay_dir: Path | None = None,
    workload_command: str | None = None,
    sidecar_dir: Path | None = None,
    extra: str = "",
) -> Path:
    conditions_toml = "[" + ", ".join(str(c) for c in conditions) + "]"
    replay_line = f'replay_dir = "{replay_dir}"\n' if replay_dir is not None else ""
    workload_block = ""
    if workload_command is not None:
        escaped = workload_command.replace("\\", "\\\\").replace('"', '\\"')
        workload_block = f'[workload]\ncommand = "{escaped}"\n'
        if sidecar_dir is not None:
            workload_block += f'sidecar_dir = "{sidecar_dir}"\n'
    path.write_text(
        f"""
[experiment]
conditions = {conditions_toml}
trials_per_condition = {trials}
seed = {seed}
out_dir = "{out_dir}"

[power]
backend = "{backend}"
{replay_line}

[metrics]
cs_tflops = 31.52

{workload_block}
{extra}
""",
        encoding="utf-8",
    )
    return path

"""Experiment configuration: a TOML file plus CLI/env overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from ..errors import ConfigError
from .simulate import SyntheticProfile

BACKENDS = ("live", "replay", "synthetic")
BUILTIN_STUB = "builtin:stub"
BUILTIN_REPLAY_SIDECAR = "builtin:replay-sidecar"
BUILTIN_WORKLOADS = (BUILTIN_STUB, BUILTIN_REPLAY_SIDECAR)
COMMAND_PLACEHOLDERS = ("target_tokens", "epochs", "seed", "sidecar_path")


def condition_label(target_tokens: int) -> str:
    """Human-readable label for a token target: 500000 -> '500K'."""
    for scale, suffix in ((10**9, "B"), (10**6, "M"), (10**3, "K")):
        if target_tokens >= scale:
            return f"{target_tokens / scale:g}{suffix}"
    return str(target_tokens)


@dataclass(frozen=True, kw_only=True)
class ExperimentConfig:
    """Everything one experiment run needs; validated on construction."""

    conditions: tuple[int, ...]
    trials_per_condition: int
    cs_tflops: float
    epochs: int = 3
    seed: int = 0
    alpha: float = 0.05
    out_dir: Path = Path("results")
    backend: str = "synthetic"
    sample_interval_s: float = 60.0
    device_index: int = 0
    replay_dir: Path | None = None
    sidecar_dir: Path | None = None
    workload_command: str = BUILTIN_STUB
    workload_timeout_s: float = 3600.0
    k_norm: float = 1.0
    tt_scale: float = 1.0
    baseline_pe: float = 1.0
    synthetic: SyntheticProfile = field(default_factory=SyntheticProfile)

    def __post_init__(self) -> None:
        object.__setattr__(self, "conditions", tuple(self.conditions))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        for name in ("replay_dir", "sidecar_dir"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, Path(value))
        self._validate()

    def _validate(self) -> None:
        if len(self.conditions) < 2:
            raise ConfigError(
                f"need at least 2 conditions, got {len(self.conditions)}"
            )
        for target in self.conditions:
            if isinstance(target, bool) or not isinstance(target, int) or target <= 0:
                raise ConfigError(
                    f"conditions must be positive integer token targets, got {target!r}"
                )
        labels = self.condition_labels
        if len(set(labels)) != len(labels):
            raise ConfigError(f"condition labels are not unique: {labels}")
        if not isinstance(self.trials_per_condition, int) or self.trials_per_condition < 3:
            raise ConfigError(
                f"trials_per_condition must be an integer >= 3, "
                f"got {self.trials_per_condition!r}"
            )
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise ConfigError(f"epochs must be a positive integer, got {self.epochs!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if self.backend not in BACKENDS:
            raise ConfigError(
                f"backend must be one of {BACKENDS}, got {self.backend!r}"
            )
        for name in ("sample_interval_s", "workload_timeout_s", "cs_tflops",
                     "k_norm", "tt_scale", "baseline_pe"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not math.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if not isinstance(self.device_index, int) or self.device_index < 0:
            raise ConfigError(
                f"device_index must be a non-negative integer, got {self.device_index!r}"
            )
        if self.backend == "replay" and self.replay_dir is None:
            raise ConfigError("the replay backend needs power.replay_dir")
        if not self.workload_command.strip():
            raise ConfigError("workload.command must not be empty")
        if self.workload_command == BUILTIN_REPLAY_SIDECAR:
            if self.sidecar_dir is None:
                raise ConfigError(f"{BUILTIN_REPLAY_SIDECAR} needs workload.sidecar_dir")
            if self.backend != "replay":
                raise ConfigError(
                    f"{BUILTIN_REPLAY_SIDECAR} is only meaningful with the replay backend"
                )
        if self.workload_command == BUILTIN_STUB and self.backend == "live":
            raise ConfigError(
                "the live backend needs a real workload command, not the builtin stub"
            )
        if self.workload_command not in BUILTIN_WORKLOADS \
                and "{sidecar_path}" not in self.workload_command:
            raise ConfigError(
                "workload.command must reference the {sidecar_path} placeholder"
            )

    @property
    def condition_labels(self) -> tuple[str, ...]:
        return tuple(condition_label(t) for t in self.conditions)

    def label_for(self, target_tokens: int) -> str:
        return condition_label(target_tokens)


def _take_section(data: dict, name: str, known: tuple[str, ...]) -> dict:
    section = data.pop(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    for key in section:
        if key not in known:
            raise ConfigError(f"unknown config key {name}.{key}")
    return section


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate an experiment configuration file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc

    experiment = _take_section(
        data, "experiment",
        ("conditions", "trials_per_condition", "epochs", "seed", "alpha", "out_dir"),
    )
    power = _take_section(
        data, "power", ("backend", "sample_interval_s", "device_index", "replay_dir")
    )
    metrics = _take_section(
        data, "metrics", ("cs_tflops", "k_norm", "tt_scale", "baseline_pe")
    )
    workload = _take_section(data, "workload", ("command", "timeout_s", "sidecar_dir"))
    synthetic_keys = tuple(f.name for f in dataclasses.fields(SyntheticProfile))
    synthetic = _take_section(data, "synthetic", synthetic_keys)
    for key in data:
        raise ConfigError(f"unknown config section [{key}]")

    for required_key, section, section_name in (
        ("conditions", experiment, "experiment"),
        ("trials_per_condition", experiment, "experiment"),
        ("cs_tflops", metrics, "metrics"),
    ):
        if required_key not in section:
            raise ConfigError(f"missing required config key {section_name}.{required_key}")

    kwargs: dict = {
        "conditions": experiment["conditions"],
        "trials_per_condition": experiment["trials_per_condition"],
        "cs_tflops": metrics["cs_tflops"],
    }
    optional = {
        "epochs": experiment.get("epochs"),
        "seed": experiment.get("seed"),
        "alpha": experiment.get("alpha"),
        "out_dir": experiment.get("out_dir"),
        "backend": power.get("backend"),
        "sample_interval_s": power.get("sample_interval_s"),
        "device_index": power.get("device_index"),
        "replay_dir": power.get("replay_dir"),
        "sidecar_dir": workload.get("sidecar_dir"),
        "workload_command": workload.get("command"),
        "workload_timeout_s": workload.get("timeout_s"),
        "k_norm": metrics.get("k_norm"),
        "tt_scale": metrics.get("tt_scale"),
        "baseline_pe": metrics.get("baseline_pe"),
    }
    kwargs.update({k: v for k, v in optional.items() if v is not None})
    if synthetic:
        try:
            kwargs["synthetic"] = SyntheticProfile(**synthetic)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[synthetic] section invalid: {exc}") from exc
    if not isinstance(kwargs["conditions"], (list, tuple)):
        raise ConfigError("experiment.conditions must be a list of token targets")
    return ExperimentConfig(**kwargs)


def apply_overrides(
    config: ExperimentConfig,
    *,
    backend: str | None = None,
    seed: int | None = None,
    out_dir: str | Path | None = None,
    alpha: float | None = None,
) -> ExperimentConfig:
    """Return a copy of ``config`` with CLI/env overrides applied."""
    changes: dict = {}
    if backend is not None:
        changes["backend"] = backend
    if seed is not None:
        changes["seed"] = seed
    if out_dir is not None:
        changes["out_dir"] = Path(out_dir)
    if alpha is not None:
        changes["alpha"] = alpha
    if not changes:
        return config
    return dataclasses.replace(config, **changes)

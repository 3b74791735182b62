"""Deterministic synthetic workload outcomes for stub and simulated trials.

The profile is calibrated so that, across growing token targets, mean
wattage and trial duration rise roughly linearly while evaluation loss
moves only slightly — the regime in which energy-aware efficiency must
fall monotonically as token exposure grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class SyntheticProfile:
    """Calibration of the synthetic backend and the builtin stub workload."""

    watts_base: float = 150.0
    watts_per_mtoken: float = 40.0
    watts_noise_sd: float = 4.0
    duration_base_s: float = 60.0
    duration_per_mtoken_s: float = 120.0
    loss_base: float = 1.32
    loss_per_mtoken: float = -0.004
    loss_noise_sd: float = 0.008
    param_count: int = 5_000_000

    def __post_init__(self) -> None:
        positive = ("watts_base", "duration_base_s", "loss_base")
        non_negative = (
            "watts_per_mtoken",
            "watts_noise_sd",
            "duration_per_mtoken_s",
            "loss_noise_sd",
        )
        for name in positive + non_negative:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not math.isfinite(value):
                raise ConfigError(f"synthetic.{name} must be finite, got {value!r}")
            if name in positive and value <= 0:
                raise ConfigError(f"synthetic.{name} must be positive, got {value!r}")
            if name in non_negative and value < 0:
                raise ConfigError(f"synthetic.{name} must be >= 0, got {value!r}")
        if not isinstance(self.loss_per_mtoken, (int, float)) \
                or not math.isfinite(self.loss_per_mtoken):
            raise ConfigError(
                f"synthetic.loss_per_mtoken must be finite, got {self.loss_per_mtoken!r}"
            )
        if not isinstance(self.param_count, int) or self.param_count <= 0:
            raise ConfigError(
                f"synthetic.param_count must be a positive integer, "
                f"got {self.param_count!r}"
            )


def mean_watts_for(target_tokens: int, profile: SyntheticProfile) -> float:
    """Expected wattage of the synthetic backend for one token target."""
    return profile.watts_base + profile.watts_per_mtoken * (target_tokens / 1e6)


def trial_duration_s(target_tokens: int, profile: SyntheticProfile) -> float:
    """Simulated wall time of one trial for the builtin stub workload."""
    return profile.duration_base_s + profile.duration_per_mtoken_s * (
        target_tokens / 1e6
    )


def synthetic_outcome(
    target_tokens: int,
    epochs: int,
    seed,
    profile: SyntheticProfile = SyntheticProfile(),
) -> tuple[dict, float]:
    """One deterministic stub-workload result.

    Returns the sidecar payload and the simulated trial duration in seconds.
    """
    rng = np.random.default_rng(seed)
    mtok = target_tokens / 1e6
    eval_loss = (
        profile.loss_base
        + profile.loss_per_mtoken * mtok
        + float(rng.normal(0.0, profile.loss_noise_sd))
    )
    true_tokens = int(target_tokens + rng.integers(0, 64))
    skipped_batches = int(rng.integers(1, 3)) if rng.random() < 0.05 else 0
    eval_source = "fallback-prompt" if rng.random() < 0.02 else "default-prompt"
    payload = {
        "eval_loss": eval_loss,
        "true_tokens": true_tokens,
        "epochs_completed": int(epochs),
        "skipped_batches": skipped_batches,
        "param_count": profile.param_count,
        "eval_source": eval_source,
    }
    return payload, trial_duration_s(target_tokens, profile)

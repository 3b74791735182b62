"""Per-trial efficiency metrics.

Pure double-precision functions over immutable inputs: inverse perplexity,
both parameter-efficiency formulations, TFLOPS per watt, token-exposure
normalization, and efficiency loss against a fixed baseline.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .errors import ContractViolation, NumericDomainError, WattmarkError
from .power_monitor import PowerTrace, rms_watts

# exp(-eval_loss) must stay below the double-precision ceiling.
_MAX_LOSS = math.log(sys.float_info.max)


def _require_positive(name: str, value: float) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ContractViolation(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value) or value <= 0:
        raise ContractViolation(f"{name} must be positive and finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class ModelSpec:
    """Size of the trained model."""

    param_count: int

    def __post_init__(self) -> None:
        if isinstance(self.param_count, bool) or not isinstance(self.param_count, int):
            raise ContractViolation(
                f"param_count must be an integer, got {self.param_count!r}"
            )
        if self.param_count <= 0:
            raise ContractViolation(
                f"param_count must be positive, got {self.param_count}"
            )

    @property
    def ms_params(self) -> float:
        """Model size in billions of parameters."""
        return self.param_count / 1e9


@dataclass(frozen=True)
class ComputeSpec:
    """Configured compute constants: throughput and the dimensionless K."""

    cs_tflops: float
    k_norm: float = 1.0

    def __post_init__(self) -> None:
        _require_positive("cs_tflops", self.cs_tflops)
        _require_positive("k_norm", self.k_norm)


@dataclass(frozen=True)
class TokenExposure:
    """Token budget of one trial: target true tokens times epochs."""

    target_tokens: int
    epochs: int
    tt_scale: float = 1.0

    def __post_init__(self) -> None:
        for name in ("target_tokens", "epochs"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ContractViolation(
                    f"{name} must be a positive integer, got {value!r}"
                )
        _require_positive("tt_scale", self.tt_scale)

    @property
    def tt_tokens(self) -> float:
        """Total token exposure in millions of tokens."""
        return self.target_tokens * self.epochs / 1e6


@dataclass(frozen=True)
class TrialRecord:
    """One trial's workload outcome joined with its sealed power trace."""

    trial_id: str
    condition: str
    eval_loss: float
    model: ModelSpec
    compute: ComputeSpec
    exposure: TokenExposure
    power: PowerTrace

    def __post_init__(self) -> None:
        if not isinstance(self.eval_loss, (int, float)) or isinstance(
            self.eval_loss, bool
        ) or not math.isfinite(self.eval_loss):
            raise ContractViolation(
                f"eval_loss must be finite, got {self.eval_loss!r}"
            )


@dataclass(frozen=True)
class EfficiencyReport:
    """Derived metrics for one trial."""

    inv_ppl: float
    pe_dissertation: float
    pe_energy: float
    tflops_per_watt: float
    pe_loss_vs_baseline: float

    def as_dict(self) -> dict[str, float]:
        return {
            "inv_ppl": self.inv_ppl,
            "pe_dissertation": self.pe_dissertation,
            "pe_energy": self.pe_energy,
            "tflops_per_watt": self.tflops_per_watt,
            "pe_loss_vs_baseline": self.pe_loss_vs_baseline,
        }


def inv_ppl(eval_loss: float) -> float:
    """Inverse perplexity, exp(-eval_loss)."""
    if not isinstance(eval_loss, (int, float)) or isinstance(eval_loss, bool):
        raise NumericDomainError(f"eval_loss must be a real number, got {eval_loss!r}")
    if not math.isfinite(eval_loss):
        raise NumericDomainError(f"eval_loss must be finite, got {eval_loss!r}")
    if eval_loss < -_MAX_LOSS:
        raise NumericDomainError(
            f"exp({-eval_loss:g}) overflows double precision; eval_loss {eval_loss!r} "
            f"is outside the numerically stable range"
        )
    try:
        return math.exp(-eval_loss)
    except OverflowError as exc:  # boundary rounding just past the guard
        raise NumericDomainError(
            f"exp({-eval_loss:g}) overflows double precision"
        ) from exc


def pe_dissertation(
    inv_ppl: float, tflops_measured: float, ms_params: float
) -> float:
    """Parameter efficiency without the energy terms."""
    inv_ppl = _require_positive("inv_ppl", inv_ppl)
    tflops_measured = _require_positive("tflops_measured", tflops_measured)
    ms_params = _require_positive("ms_params", ms_params)
    return inv_ppl / (tflops_measured * ms_params)


def pe_energy(
    inv_ppl: float,
    cs_tflops: float,
    tt_scale: float,
    ms_params: float,
    tt_tokens: float,
    rms_w: float,
    k_norm: float = 1.0,
) -> float:
    """Energy-aware parameter efficiency.

    K * invPPL * CS_tflops * TT_scale / (MS_params * TT_tokens * RMS watts).
    """
    inv_ppl = _require_positive("inv_ppl", inv_ppl)
    cs_tflops = _require_positive("cs_tflops", cs_tflops)
    tt_scale = _require_positive("tt_scale", tt_scale)
    ms_params = _require_positive("ms_params", ms_params)
    tt_tokens = _require_positive("tt_tokens", tt_tokens)
    rms_w = _require_positive("rms_w", rms_w)
    k_norm = _require_positive("k_norm", k_norm)
    return (k_norm * inv_ppl * cs_tflops * tt_scale) / (ms_params * tt_tokens * rms_w)


def tflops_per_watt(cs_tflops: float, rms_w: float) -> float:
    """Power efficiency: configured TFLOPS over RMS watts."""
    cs_tflops = _require_positive("cs_tflops", cs_tflops)
    rms_w = _require_positive("rms_w", rms_w)
    return cs_tflops / rms_w


def token_exposure(
    target_tokens: int, epochs: int, tt_scale: float = 1.0
) -> TokenExposure:
    """Build the token-exposure term for a trial."""
    return TokenExposure(target_tokens=target_tokens, epochs=epochs, tt_scale=tt_scale)


def pe_loss(pe: float, pe_baseline: float) -> float:
    """Efficiency loss relative to a fixed baseline; negative means gain."""
    pe = _require_positive("pe", pe)
    pe_baseline = _require_positive("pe_baseline", pe_baseline)
    return (pe_baseline - pe) / pe_baseline


def evaluate_trial(record: TrialRecord, baseline: float) -> EfficiencyReport:
    """Compose all per-trial metrics from a TrialRecord.

    Component errors are re-raised with the trial id attached.
    """
    baseline = _require_positive("baseline", baseline)
    try:
        rms = rms_watts(record.power)
        ip = inv_ppl(record.eval_loss)
        pe_d = pe_dissertation(ip, record.compute.cs_tflops, record.model.ms_params)
        pe_e = pe_energy(
            ip,
            record.compute.cs_tflops,
            record.exposure.tt_scale,
            record.model.ms_params,
            record.exposure.tt_tokens,
            rms,
            k_norm=record.compute.k_norm,
        )
        tpw = tflops_per_watt(record.compute.cs_tflops, rms)
        loss = pe_loss(pe_e, baseline)
    except WattmarkError as exc:
        raise type(exc)(f"trial {record.trial_id!r}: {exc}") from exc
    return EfficiencyReport(
        inv_ppl=ip,
        pe_dissertation=pe_d,
        pe_energy=pe_e,
        tflops_per_watt=tpw,
        pe_loss_vs_baseline=loss,
    )

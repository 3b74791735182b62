from __future__ import annotations

import math

import numpy as np
import pytest

from wattmark.efficiency_metrics import (
    ComputeSpec,
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
from wattmark.errors import ContractViolation, NumericDomainError

from .conftest import make_trace


class TestInvPpl:
    def test_zero_loss(self):
        assert inv_ppl(0.0) == 1.0

    def test_log_four(self):
        assert inv_ppl(math.log(4.0)) == pytest.approx(0.25, rel=1e-15)

    def test_strictly_decreasing(self):
        losses = np.linspace(-2.0, 12.0, 100)
        values = [inv_ppl(x) for x in losses]
        assert all(a > b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("loss", [math.nan, math.inf, -math.inf])
    def test_nonfinite_rejected(self, loss):
        with pytest.raises(NumericDomainError):
            inv_ppl(loss)

    def test_overflowing_negative_loss_rejected(self):
        with pytest.raises(NumericDomainError):
            inv_ppl(-1e6)


class TestPeDissertation:
    def test_identity_inputs(self):
        assert pe_dissertation(1.0, 1.0, 1.0) == 1.0

    def test_hand_example(self):
        # 0.5 / (2 * 1.1) = 0.22727272...
        value = pe_dissertation(0.5, 2.0, 1.1)
        assert value == pytest.approx(0.2272727, rel=1e-6)

    def test_reciprocal_matched_agreement_with_energy_score(self):
        # With every energy term at unity and the compute terms reciprocal-
        # matched, both scores reduce to inv_ppl / (tflops * ms_params).
        rng = np.random.default_rng(29)
        for _ in range(20):
            i = float(rng.uniform(0.05, 1.0))
            t = float(rng.uniform(0.5, 80.0))
            m = float(rng.uniform(0.001, 20.0))
            lhs = pe_dissertation(i, t, m)
            rhs = pe_energy(
                inv_ppl=i,
                cs_tflops=1.0 / t,
                tt_scale=1.0,
                ms_params=m,
                tt_tokens=1.0,
                rms_w=1.0,
            )
            assert lhs == pytest.approx(rhs, rel=1e-12)

    @pytest.mark.parametrize("field", ["inv_ppl", "tflops_measured", "ms_params"])
    def test_nonpositive_input_rejected(self, field):
        kwargs = {"inv_ppl": 0.5, "tflops_measured": 1.0, "ms_params": 1.0}
        kwargs[field] = 0.0
        with pytest.raises(ContractViolation):
            pe_dissertation(**kwargs)


class TestPeEnergy:
    def test_identity_inputs(self):
        value = pe_energy(
            inv_ppl=1.0,
            cs_tflops=1.0,
            tt_scale=1.0,
            ms_params=1.0,
            tt_tokens=1.0,
            rms_w=1.0,
        )
        assert value == 1.0

    def test_hand_example(self):
        # 0.2 * 100 / (1.1 * 1.5 * 200) = 20 / 330 = 0.0606060...
        value = pe_energy(
            inv_ppl=0.2,
            cs_tflops=100.0,
            tt_scale=1.0,
            ms_params=1.1,
            tt_tokens=1.5,
            rms_w=200.0,
            k_norm=1.0,
        )
        assert value == pytest.approx(0.0606061, rel=1e-6)

    def test_doubling_power_halves_score(self):
        base = pe_energy(
            inv_ppl=0.2, cs_tflops=100.0, tt_scale=1.0, ms_params=1.1,
            tt_tokens=1.5, rms_w=200.0,
        )
        doubled = pe_energy(
            inv_ppl=0.2, cs_tflops=100.0, tt_scale=1.0, ms_params=1.1,
            tt_tokens=1.5, rms_w=400.0,
        )
        assert doubled == pytest.approx(0.0303030, abs=5e-8)
        assert doubled == pytest.approx(base / 2.0, rel=1e-15)

    def test_homogeneity_in_every_factor(self):
        # Degree +1 in inv_ppl, cs_tflops, tt_scale, k_norm; degree -1 in
        # ms_params, tt_tokens, rms_watts.
        rng = np.random.default_rng(23)
        numerator = ("inv_ppl", "cs_tflops", "tt_scale", "k_norm")
        denominator = ("ms_params", "tt_tokens", "rms_w")
        for _ in range(40):
            kwargs = {
                name: float(rng.uniform(0.01, 50.0))
                for name in numerator + denominator
            }
            factor = float(rng.uniform(0.1, 10.0))
            base = pe_energy(**kwargs)
            for name in numerator:
                scaled = pe_energy(**{**kwargs, name: kwargs[name] * factor})
                assert scaled == pytest.approx(factor * base, rel=1e-12)
            for name in denominator:
                scaled = pe_energy(**{**kwargs, name: kwargs[name] * factor})
                assert scaled == pytest.approx(base / factor, rel=1e-12)

    def test_nonpositive_factor_rejected(self):
        with pytest.raises(ContractViolation):
            pe_energy(
                inv_ppl=0.3, cs_tflops=30.0, tt_scale=1.0, ms_params=0.005,
                tt_tokens=1.5, rms_w=0.0,
            )


class TestTflopsPerWatt:
    def test_unit_ratio(self):
        assert tflops_per_watt(100.0, 100.0) == 1.0

    def test_hand_example(self):
        # 31.5 / 150 = 0.21
        assert tflops_per_watt(31.5, 150.0) == pytest.approx(0.21, rel=1e-12)

    def test_zero_watts_rejected(self):
        with pytest.raises(ContractViolation):
            tflops_per_watt(100.0, 0.0)


class TestTokenExposure:
    def test_millions_of_tokens(self):
        assert token_exposure(500000, 3).tt_tokens == pytest.approx(1.5, rel=1e-15)
        assert token_exposure(1000000, 1).tt_tokens == pytest.approx(1.0, rel=1e-15)
        assert token_exposure(2000000, 3).tt_tokens == pytest.approx(6.0, rel=1e-15)

    def test_exposure_dataclass_agrees(self):
        exposure = TokenExposure(target_tokens=500000, epochs=3)
        assert exposure.tt_tokens == pytest.approx(1.5, rel=1e-15)

    def test_nonpositive_rejected(self):
        with pytest.raises(ContractViolation):
            token_exposure(0, 3)
        with pytest.raises(ContractViolation):
            token_exposure(500000, 0)


class TestPeLoss:
    def test_equal_is_zero(self):
        assert pe_loss(2.0, 2.0) == 0.0

    def test_half_of_baseline(self):
        assert pe_loss(1.0, 2.0) == pytest.approx(0.5, rel=1e-15)

    def test_above_baseline_is_negative(self):
        assert pe_loss(2.4, 2.0) == pytest.approx(-0.2, rel=1e-15)

    def test_nonpositive_baseline_rejected(self):
        with pytest.raises(ContractViolation):
            pe_loss(1.0, 0.0)


class TestEvaluateTrial:
    def _record(self, watts, *, eval_loss=0.0, trial_id="demo"):
        return TrialRecord(
            trial_id=trial_id,
            condition="1M",
            eval_loss=eval_loss,
            model=ModelSpec(param_count=1_000_000_000),
            compute=ComputeSpec(cs_tflops=1.0),
            exposure=TokenExposure(target_tokens=1_000_000, epochs=1),
            power=make_trace(watts),
        )

    def test_identity_record(self):
        report = evaluate_trial(self._record([1.0, 1.0]), 1.0)
        assert report.inv_ppl == 1.0
        assert report.pe_dissertation == 1.0
        assert report.pe_energy == 1.0
        assert report.tflops_per_watt == 1.0
        assert report.pe_loss_vs_baseline == 0.0

    def test_as_dict_keys(self):
        report = evaluate_trial(self._record([1.0]), 1.0)
        assert set(report.as_dict()) == {
            "inv_ppl",
            "pe_dissertation",
            "pe_energy",
            "tflops_per_watt",
            "pe_loss_vs_baseline",
        }

    def test_unsealed_trace_rejected_with_trial_id(self):
        record = TrialRecord(
            trial_id="open-trace",
            condition="1M",
            eval_loss=0.0,
            model=ModelSpec(param_count=1_000_000_000),
            compute=ComputeSpec(cs_tflops=1.0),
            exposure=TokenExposure(target_tokens=1_000_000, epochs=1),
            power=make_trace([1.0], sealed=False),
        )
        with pytest.raises(ContractViolation, match="open-trace"):
            evaluate_trial(record, 1.0)

    def test_error_type_preserved(self):
        # A huge negative loss passes TrialRecord validation but overflows
        # exp(); the error arrives typed, with the trial id attached.
        with pytest.raises(NumericDomainError, match="demo"):
            evaluate_trial(self._record([1.0], eval_loss=-1e6), 1.0)

    def test_random_inputs_match_direct_formula(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            watts = list(rng.uniform(50.0, 400.0, size=rng.integers(2, 40)))
            loss = float(rng.uniform(0.5, 3.0))
            params = int(rng.integers(1_000_000, 10_000_000_000))
            tflops = float(rng.uniform(1.0, 100.0))
            target = int(rng.integers(100_000, 5_000_000))
            epochs = int(rng.integers(1, 5))
            record = TrialRecord(
                trial_id="prop",
                condition="x",
                eval_loss=loss,
                model=ModelSpec(param_count=params),
                compute=ComputeSpec(cs_tflops=tflops),
                exposure=TokenExposure(target_tokens=target, epochs=epochs),
                power=make_trace(watts),
            )
            report = evaluate_trial(record, 1.0)
            rms = math.sqrt(sum(w * w for w in watts) / len(watts))
            expected = (
                math.exp(-loss) * tflops / ((params / 1e9) * (target * epochs / 1e6) * rms)
            )
            assert report.pe_energy == pytest.approx(expected, rel=1e-12)
            assert report.tflops_per_watt == pytest.approx(tflops / rms, rel=1e-12)

from __future__ import annotations

import csv
import dataclasses

import numpy as np
import pytest

from wattmark.errors import NoDataError
from wattmark.orchestrator import build_matrix, load_rows, metric_value, ok_rows
from wattmark.reporting import (
    SUMMARY_METRICS,
    fmt_p,
    fmt_stat,
    render_analysis_text,
    render_summary_text,
    summary_stats,
    write_analysis_csvs,
    write_plotdata,
)
from wattmark.stats_engine import ConditionMatrix, analyze

from .conftest import FIXTURES


def load_matrix(name: str) -> ConditionMatrix:
    return ConditionMatrix.from_csv(FIXTURES / "stats" / f"{name}.csv")


@pytest.fixture(scope="module")
def rows(synthetic_run):
    _, outcome = synthetic_run
    return load_rows(outcome.results_path)


@pytest.fixture(scope="module")
def bundle(rows):
    return analyze(build_matrix(rows, "pe_energy"), 0.05)


class TestFormatting:
    def test_stat_fixed_places(self):
        assert fmt_stat(1.23456789) == "1.2346"
        assert fmt_stat(0.0) == "0.0000"

    def test_stat_infinities(self):
        assert fmt_stat(float("inf")) == "inf"
        assert fmt_stat(float("-inf")) == "-inf"

    def test_p_floor(self):
        assert fmt_p(0.0009) == "<0.001"
        assert fmt_p(0.001) == "0.0010"
        assert fmt_p(0.04321) == "0.0432"


class TestSummary:
    def test_recomputes_from_rows(self, rows):
        summary = summary_stats(rows)
        assert [entry["condition"] for entry in summary] == ["500K", "1M"]
        for entry in summary:
            cond = [
                r for r in ok_rows(rows) if r["condition"] == entry["condition"]
            ]
            assert entry["n"] == len(cond)
            for metric in SUMMARY_METRICS:
                values = np.asarray([metric_value(r, metric) for r in cond])
                stats = entry[metric]
                assert stats["mean"] == pytest.approx(values.mean(), rel=1e-12)
                assert stats["sd"] == pytest.approx(
                    values.std(ddof=1), rel=1e-12
                )
                assert stats["min"] == values.min()
                assert stats["max"] == values.max()

    def test_render_lists_every_metric(self, rows):
        text = render_summary_text(summary_stats(rows))
        for metric in SUMMARY_METRICS:
            assert metric in text
        assert "condition  n  mean" in text
        assert "500K" in text and "1M" in text

    def test_failed_rows_do_not_count(self, rows):
        failed = dict(rows[0])
        failed["status"] = "failed"
        summary = summary_stats(rows + [failed])
        assert summary_stats(rows) == summary

    def test_no_successes_is_an_error(self, rows):
        failed = [dict(r, status="failed") for r in rows]
        with pytest.raises(NoDataError):
            summary_stats(failed)


class TestAnalysisText:
    def test_sections_present(self, bundle):
        text = render_analysis_text(bundle, "pe_energy")
        assert text.startswith("Analysis of pe_energy (alpha = 0.05)")
        for heading in (
            "Normality (Shapiro-Wilk)",
            "Sphericity (Mauchly)",
            "ANOVA (repeated measures)",
            "Pairwise (paired t, Bonferroni over m = 1)",
        ):
            assert heading in text

    def test_two_conditions_skip_sphericity_stats(self, bundle):
        # k = 2 designs are spherical by construction.
        assert "satisfied (k=2)" in render_analysis_text(bundle, "pe_energy")

    def test_violation_is_reported(self):
        result = analyze(load_matrix("matrix_02_nonspherical"), 0.05)
        text = render_analysis_text(result, "pe_energy")
        assert "-> violated" in text
        assert f"chi2({result.sphericity.df})" in text

    def test_spherical_design_reported_satisfied(self):
        result = analyze(load_matrix("matrix_01_effect"), 0.05)
        text = render_analysis_text(result, "pe_energy")
        assert "-> satisfied" in text
        assert "reject the no-effect hypothesis" in text

    def test_retain_wording(self):
        result = analyze(load_matrix("matrix_00_null"), 0.05)
        assert "retain the no-effect hypothesis" in render_analysis_text(
            result, "pe_energy"
        )

    def test_exact_fit_flagged(self):
        # A perfect within-subject fit cannot reach the full pipeline (its
        # contrast covariance is singular), so flip the flag on a real bundle.
        result = analyze(load_matrix("matrix_01_effect"), 0.05)
        flagged = dataclasses.replace(
            result, anova=dataclasses.replace(result.anova, exact_fit=True)
        )
        assert "[exact fit]" in render_analysis_text(flagged, "pe_energy")
        assert "[exact fit]" not in render_analysis_text(result, "pe_energy")

    def test_tiny_p_uses_display_floor(self):
        result = analyze(load_matrix("matrix_02_nonspherical"), 0.05)
        assert "p = <0.001" in render_analysis_text(result, "pe_energy")


def read_csv(path):
    with open(path, newline="") as source:
        return list(csv.reader(source))


@pytest.fixture(scope="module")
def written(tmp_path_factory):
    result = analyze(load_matrix("matrix_02_nonspherical"), 0.05)
    out_dir = tmp_path_factory.mktemp("csvs")
    return result, write_analysis_csvs(result, "pe_energy", out_dir)


class TestAnalysisCsvs:
    def test_all_four_files(self, written):
        _, paths = written
        assert set(paths) == {"normality", "sphericity", "anova", "pairwise"}
        for kind, path in paths.items():
            assert path.name == f"pe_energy_{kind}.csv"
            assert path.is_file()

    def test_full_precision_round_trip(self, written):
        result, paths = written
        anova_rows = read_csv(paths["anova"])
        record = dict(zip(anova_rows[0], anova_rows[1]))
        assert float(record["f"]) == result.anova.f_value
        assert float(record["p"]) == result.anova.p_value
        assert float(record["eta_g_sq"]) == result.anova.eta_g_sq
        assert float(record["gg_epsilon"]) == result.anova.gg_epsilon
        assert float(record["p_gg"]) == result.anova.p_gg
        assert float(record["operative_p"]) == result.operative_p
        assert record["reject"] == ("true" if result.reject else "false")
        assert record["df_num"] == str(result.anova.df_num)

    def test_sphericity_file(self, written):
        result, paths = written
        rows = read_csv(paths["sphericity"])
        record = dict(zip(rows[0], rows[1]))
        assert float(record["w"]) == result.sphericity.w_stat
        assert float(record["chi_sq"]) == result.sphericity.chi_sq
        assert record["violated"] == "true"

    def test_pairwise_file(self, written):
        result, paths = written
        rows = read_csv(paths["pairwise"])
        assert rows[0] == ["pair", "t", "p_raw", "p_corrected", "reject"]
        assert len(rows) - 1 == len(result.pairwise)
        for line, res in zip(rows[1:], result.pairwise):
            assert line[0] == f"{res.pair[0]} vs {res.pair[1]}"
            assert float(line[1]) == res.t_value
            assert float(line[3]) == res.p_corrected

    def test_normality_file(self, written):
        result, paths = written
        rows = read_csv(paths["normality"])
        assert rows[0] == ["condition", "w", "p", "verdict"]
        by_label = {line[0]: line for line in rows[1:]}
        for label, res in result.normality.items():
            assert float(by_label[label][1]) == res.w_stat
            assert by_label[label][3] == res.verdict

    def test_unix_line_endings(self, written):
        _, paths = written
        for path in paths.values():
            raw = path.read_bytes()
            assert b"\r" not in raw
            assert raw.endswith(b"\n")


class TestPlotData:
    def test_one_file_per_metric(self, rows, tmp_path):
        paths = write_plotdata(rows, tmp_path)
        assert [p.name for p in paths] == [
            "plot_pe_energy.csv",
            "plot_pe_dissertation.csv",
            "plot_inv_ppl.csv",
            "plot_tflops_per_watt.csv",
            "plot_pe_loss_vs_baseline.csv",
            "plot_rms_watts.csv",
            "plot_sample_count.csv",
        ]

    def test_values_match_column_stats(self, rows, tmp_path):
        (path,) = write_plotdata(rows, tmp_path, metrics=("pe_energy",))
        table = read_csv(path)
        assert table[0] == ["condition", "mean", "sd", "n"]
        matrix = build_matrix(rows, "pe_energy")
        for line, label in zip(table[1:], matrix.conditions):
            column = matrix.column(label)
            assert float(line[1]) == pytest.approx(column.mean(), rel=1e-15)
            assert float(line[2]) == pytest.approx(
                column.std(ddof=1), rel=1e-12
            )
            assert line[3] == str(column.size)

    def test_single_trial_sd_is_zero(self, rows, tmp_path):
        keep = [r for r in rows if r["trial_index"] == 0]
        (path,) = write_plotdata(keep, tmp_path, metrics=("rms_watts",))
        for line in read_csv(path)[1:]:
            assert float(line[2]) == 0.0
            assert line[3] == "1"

    def test_all_failed_is_an_error(self, rows, tmp_path):
        failed = [dict(r, status="failed") for r in rows]
        with pytest.raises(NoDataError):
            write_plotdata(failed, tmp_path)

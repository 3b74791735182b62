from __future__ import annotations

import json
import os
import shutil

import pytest

from wattmark.cli import main
from wattmark.orchestrator import load_rows

from .conftest import FIXTURES, write_config

REPLAY_TRACES = FIXTURES / "replay" / "traces"


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in list(os.environ):
        if name.startswith("WATTMARK_"):
            monkeypatch.delenv(name)


@pytest.fixture(scope="module")
def run_dir(synthetic_run):
    _, outcome = synthetic_run
    return outcome.results_path.parent


class TestRun:
    def test_full_run(self, tmp_path, capsys):
        config = write_config(tmp_path / "exp.toml", out_dir=tmp_path / "out")
        assert main(["run", "--config", str(config)]) == 0
        out = capsys.readouterr().out
        for done, trial_id in enumerate(
            ["500K-000", "500K-001", "500K-002", "1M-000", "1M-001", "1M-002"], 1
        ):
            assert f"[{done}/6] {trial_id}: ok" in out
        assert "results file: " in out
        assert "Analysis of pe_energy (alpha = 0.05)" in out
        assert (tmp_path / "out" / "results.jsonl").is_file()

    def test_missing_config_is_config_error(self, capsys):
        assert main(["run"]) == 2
        err = capsys.readouterr().err
        assert "--config" in err and "WATTMARK_CONFIG" in err

    def test_config_from_environment(self, tmp_path, monkeypatch, capsys):
        config = write_config(tmp_path / "exp.toml", out_dir=tmp_path / "out")
        monkeypatch.setenv("WATTMARK_CONFIG", str(config))
        assert main(["run"]) == 0
        assert (tmp_path / "out" / "results.jsonl").is_file()

    def test_nonexistent_config(self, tmp_path, capsys):
        assert main(["run", "--config", str(tmp_path / "nope.toml")]) == 2
        assert "error: " in capsys.readouterr().err

    def test_trial_failures_exit_partial(self, tmp_path, capsys):
        # Only three recorded traces exist per condition, so a fourth trial
        # has nothing to replay and must fail without sinking the run.
        config = write_config(
            tmp_path / "exp.toml",
            out_dir=tmp_path / "out",
            backend="replay",
            replay_dir=REPLAY_TRACES,
            trials=4,
        )
        assert main(["run", "--config", str(config)]) == 3
        out = capsys.readouterr().out
        assert "failed trials (2): " in out
        assert "500K-003" in out and "1M-003" in out
        # The surviving trials still form a balanced design worth analyzing.
        assert "Analysis of pe_energy" in out

    def test_seed_flag_beats_environment(self, tmp_path, monkeypatch, capsys):
        config = write_config(tmp_path / "exp.toml", out_dir=tmp_path / "a", seed=3)
        monkeypatch.setenv("WATTMARK_SEED", "5")
        assert main(["run", "--config", str(config), "--seed", "9"]) == 0

        reference = write_config(
            tmp_path / "ref.toml", out_dir=tmp_path / "b", seed=9
        )
        monkeypatch.delenv("WATTMARK_SEED")
        assert main(["run", "--config", str(reference)]) == 0
        assert (tmp_path / "a" / "results.jsonl").read_bytes() == (
            tmp_path / "b" / "results.jsonl"
        ).read_bytes()

    def test_backend_override_is_revalidated(self, tmp_path, capsys):
        # Switching to replay without a replay_dir is caught before running.
        config = write_config(tmp_path / "exp.toml", out_dir=tmp_path / "out")
        assert main(["run", "--config", str(config), "--backend", "replay"]) == 2
        assert "replay" in capsys.readouterr().err


class TestAnalyze:
    def test_reports_and_csvs(self, run_dir, tmp_path, capsys):
        code = main(
            [
                "analyze",
                "--results", str(run_dir / "results.jsonl"),
                "--out-dir", str(tmp_path),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "Analysis of pe_energy (alpha = 0.05)" in out
        assert out.count("wrote ") == 4
        for kind in ("normality", "sphericity", "anova", "pairwise"):
            assert (tmp_path / f"pe_energy_{kind}.csv").is_file()

    def test_metric_flag(self, run_dir, tmp_path, capsys):
        code = main(
            [
                "analyze",
                "--results", str(run_dir / "results.jsonl"),
                "--metric", "rms_watts",
                "--out-dir", str(tmp_path),
            ]
        )
        assert code == 0
        assert "Analysis of rms_watts" in capsys.readouterr().out
        assert (tmp_path / "rms_watts_anova.csv").is_file()

    def test_everything_from_environment(self, run_dir, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("WATTMARK_RESULTS", str(run_dir / "results.jsonl"))
        monkeypatch.setenv("WATTMARK_METRIC", "inv_ppl")
        monkeypatch.setenv("WATTMARK_ALPHA", "0.01")
        monkeypatch.setenv("WATTMARK_OUT_DIR", str(tmp_path))
        assert main(["analyze"]) == 0
        out = capsys.readouterr().out
        assert "Analysis of inv_ppl (alpha = 0.01)" in out
        assert (tmp_path / "inv_ppl_anova.csv").is_file()

    def test_unknown_metric_from_environment(self, run_dir, monkeypatch, capsys):
        monkeypatch.setenv("WATTMARK_METRIC", "speed")
        code = main(["analyze", "--results", str(run_dir / "results.jsonl")])
        assert code == 2
        assert "unknown metric 'speed'" in capsys.readouterr().err

    def test_malformed_alpha_environment(self, run_dir, monkeypatch, capsys):
        monkeypatch.setenv("WATTMARK_ALPHA", "high")
        code = main(["analyze", "--results", str(run_dir / "results.jsonl")])
        assert code == 2
        assert "WATTMARK_ALPHA" in capsys.readouterr().err

    def test_alpha_out_of_range(self, run_dir, tmp_path, capsys):
        code = main(
            [
                "analyze",
                "--results", str(run_dir / "results.jsonl"),
                "--alpha", "1.5",
                "--out-dir", str(tmp_path),
            ]
        )
        assert code == 4

    def test_missing_results_file(self, tmp_path, capsys):
        code = main(["analyze", "--results", str(tmp_path / "results.jsonl")])
        assert code == 4
        assert "not found" in capsys.readouterr().err

    def test_unbalanced_results(self, run_dir, tmp_path, capsys):
        rows = load_rows(run_dir / "results.jsonl")
        lopsided = tmp_path / "results.jsonl"
        with open(lopsided, "w", encoding="utf-8") as sink:
            for row in rows[1:]:
                sink.write(json.dumps(row) + "\n")
        assert main(["analyze", "--results", str(lopsided)]) == 4


class TestPlotData:
    def test_writes_every_metric(self, run_dir, tmp_path, capsys):
        code = main(
            [
                "plotdata",
                "--results", str(run_dir / "results.jsonl"),
                "--out-dir", str(tmp_path),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.count("wrote ") == 7
        assert len(list(tmp_path.glob("plot_*.csv"))) == 7

    def test_missing_results(self, tmp_path, capsys):
        assert main(["plotdata", "--results", str(tmp_path / "none.jsonl")]) == 4


class TestReplayValidate:
    def test_clean_run_validates(self, run_dir, capsys):
        code = main(["replay-validate", "--results", str(run_dir / "results.jsonl")])
        assert code == 0
        out = capsys.readouterr().out
        assert "validated 6 traces" in out

    def test_tampered_trace_is_caught(self, run_dir, tmp_path, capsys):
        copy = tmp_path / "run"
        shutil.copytree(run_dir, copy)
        rows = load_rows(copy / "results.jsonl")
        trace_path = copy / rows[0]["power"]["trace_file"]
        lines = trace_path.read_text().splitlines()
        elapsed, watts = lines[1].split(",")
        lines[1] = f"{elapsed},{float(watts) + 25.0}"
        trace_path.write_text("\n".join(lines) + "\n")

        assert main(["replay-validate", "--results", str(copy / "results.jsonl")]) == 4
        out = capsys.readouterr().out
        assert rows[0]["trial_id"] in out
        assert "1 of 6 traces do not replay cleanly" in out

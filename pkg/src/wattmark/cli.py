"""Command-line entry point: run, analyze, plotdata, replay-validate.

Flags may also come from WATTMARK_-prefixed environment variables
(WATTMARK_CONFIG, WATTMARK_BACKEND, WATTMARK_RESULTS, WATTMARK_METRIC,
WATTMARK_ALPHA, WATTMARK_OUT_DIR, WATTMARK_SEED); explicit flags win.

Exit codes: 0 success, 2 configuration error, 3 trial failures present,
4 analysis precondition failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import (
    BalancedDesignError,
    ConfigError,
    ContractViolation,
    DegenerateDesignError,
    DegeneratePairError,
    DegenerateSampleError,
    InvalidTraceError,
    NoDataError,
    TooFewSamplesError,
)
from .orchestrator import (
    BACKENDS,
    ExperimentRunner,
    METRICS,
    apply_overrides,
    build_matrix,
    load_config,
    load_rows,
    round_sig,
)
from .orchestrator.results import ok_rows
from .power_monitor import PowerTrace, rms_watts
from .reporting import (
    render_analysis_text,
    render_summary_text,
    summary_stats,
    write_analysis_csvs,
    write_plotdata,
)
from .stats_engine import analyze

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3
EXIT_ANALYSIS = 4

ENV_PREFIX = "WATTMARK_"

_ANALYSIS_ERRORS = (
    BalancedDesignError,
    ContractViolation,
    DegenerateDesignError,
    DegeneratePairError,
    DegenerateSampleError,
    InvalidTraceError,
    NoDataError,
    TooFewSamplesError,
)

log = logging.getLogger(__name__)


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name)


def _env_number(name: str, convert):
    raw = _env(name)
    if raw is None:
        return None
    try:
        return convert(raw)
    except ValueError as exc:
        raise ConfigError(f"environment variable {ENV_PREFIX}{name} is invalid: {exc}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wattmark",
        description="GPU power profiling and training-efficiency analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the configured experiment")
    run_p.add_argument("--config", type=Path, default=None, help="experiment TOML file")
    run_p.add_argument(
        "--backend", choices=BACKENDS, default=None, help="override power.backend"
    )
    run_p.add_argument("--seed", type=int, default=None, help="override experiment.seed")
    run_p.add_argument(
        "--out-dir", type=Path, default=None, help="override experiment.out_dir"
    )

    analyze_p = sub.add_parser("analyze", help="analyze a results file")
    analyze_p.add_argument("--results", type=Path, default=None, help="results.jsonl path")
    analyze_p.add_argument(
        "--metric", choices=METRICS, default=None, help="metric to analyze"
    )
    analyze_p.add_argument("--alpha", type=float, default=None, help="significance level")
    analyze_p.add_argument(
        "--out-dir", type=Path, default=None, help="where to write analysis CSVs"
    )

    plot_p = sub.add_parser("plotdata", help="export condition-vs-metric CSVs")
    plot_p.add_argument("--results", type=Path, default=None)
    plot_p.add_argument("--out-dir", type=Path, default=None)

    replay_p = sub.add_parser(
        "replay-validate",
        help="recompute RMS watts from stored traces and compare to the results file",
    )
    replay_p.add_argument("--results", type=Path, default=None)
    return parser


def _required_path(value: Path | None, env_name: str, flag: str) -> Path:
    if value is not None:
        return value
    raw = _env(env_name)
    if raw:
        return Path(raw)
    raise ConfigError(f"no {flag} given (use {flag} or {ENV_PREFIX}{env_name})")


def cmd_run(args: argparse.Namespace) -> int:
    config_path = _required_path(args.config, "CONFIG", "--config")
    config = load_config(config_path)
    config = apply_overrides(
        config,
        backend=args.backend or _env("BACKEND"),
        seed=args.seed if args.seed is not None else _env_number("SEED", int),
        out_dir=args.out_dir or _env("OUT_DIR"),
    )
    runner = ExperimentRunner(config)
    total = len(runner.plans())
    state = {"done": 0}

    def progress(trial_id: str, status: str) -> None:
        state["done"] += 1
        print(f"[{state['done']}/{total}] {trial_id}: {status}")

    result = runner.run_experiment(progress=progress)
    print(f"\nresults file: {result.results_path}")
    rows = load_rows(result.results_path)
    print()
    print(render_summary_text(summary_stats(rows)))
    if result.failures:
        failed_ids = ", ".join(f.trial_id for f in result.failures)
        print(f"\nfailed trials ({len(result.failures)}): {failed_ids}")
    try:
        bundle = analyze(build_matrix(rows, "pe_energy"), config.alpha)
    except _ANALYSIS_ERRORS as exc:
        print(f"\nanalysis skipped: {exc}")
    else:
        print()
        print(render_analysis_text(bundle, "pe_energy"))
    return EXIT_PARTIAL if result.failures else EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    results_path = _required_path(args.results, "RESULTS", "--results")
    metric = args.metric or _env("METRIC") or "pe_energy"
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}; available: {', '.join(METRICS)}")
    alpha = args.alpha if args.alpha is not None else _env_number("ALPHA", float)
    if alpha is None:
        alpha = 0.05
    rows = load_rows(results_path)
    bundle = analyze(build_matrix(rows, metric), alpha)
    print(render_analysis_text(bundle, metric))
    out_dir = args.out_dir or _env("OUT_DIR") or results_path.parent
    paths = write_analysis_csvs(bundle, metric, out_dir)
    for name in ("normality", "sphericity", "anova", "pairwise"):
        print(f"wrote {paths[name]}")
    return EXIT_OK


def cmd_plotdata(args: argparse.Namespace) -> int:
    results_path = _required_path(args.results, "RESULTS", "--results")
    rows = load_rows(results_path)
    out_dir = args.out_dir or _env("OUT_DIR") or results_path.parent
    for path in write_plotdata(rows, out_dir):
        print(f"wrote {path}")
    return EXIT_OK


def cmd_replay_validate(args: argparse.Namespace) -> int:
    results_path = _required_path(args.results, "RESULTS", "--results")
    rows = load_rows(results_path)
    retained = ok_rows(rows)
    if not retained:
        raise NoDataError("results contain no successful trials to validate")
    mismatches = []
    for row in retained:
        trace_path = results_path.parent / row["power"]["trace_file"]
        recomputed = round_sig(rms_watts(PowerTrace.from_csv(trace_path)))
        stored = row["power"]["rms_watts"]
        if recomputed != stored:
            mismatches.append((row["trial_id"], stored, recomputed))
    if mismatches:
        for trial_id, stored, recomputed in mismatches:
            print(f"{trial_id}: stored {stored!r} != replayed {recomputed!r}")
        print(f"{len(mismatches)} of {len(retained)} traces do not replay cleanly")
        return EXIT_ANALYSIS
    print(f"validated {len(retained)} traces: replayed RMS matches the results file")
    return EXIT_OK


_HANDLERS = {
    "run": cmd_run,
    "analyze": cmd_analyze,
    "plotdata": cmd_plotdata,
    "replay-validate": cmd_replay_validate,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _ANALYSIS_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())

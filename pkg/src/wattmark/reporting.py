"""Rendered tables, analysis CSVs, and plot-ready data files.

Every number rendered here is re-derived from the results file alone.
Text tables print test statistics to 4 decimal places and p values as
"<0.001" below that threshold; CSV files keep full precision.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .errors import NoDataError
from .orchestrator.results import METRICS, condition_order, metric_value, ok_rows
from .stats_engine import AnalysisBundle

SUMMARY_METRICS = ("pe_energy", "rms_watts", "inv_ppl", "sample_count")

P_DISPLAY_FLOOR = 0.001


def fmt_stat(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.4f}"


def fmt_p(p: float) -> str:
    return "<0.001" if p < P_DISPLAY_FLOOR else f"{p:.4f}"


def _render_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


# -- descriptive summary ----------------------------------------------------

def summary_stats(rows: list[dict]) -> list[dict]:
    """Per-condition mean/sd/min/max for the headline metrics."""
    retained = ok_rows(rows)
    if not retained:
        raise NoDataError("results contain no successful trials")
    table = []
    for label in condition_order(retained):
        cond = [r for r in retained if r["condition"] == label]
        entry: dict = {"condition": label, "n": len(cond)}
        for metric in SUMMARY_METRICS:
            values = np.asarray([metric_value(r, metric) for r in cond])
            entry[metric] = {
                "mean": float(values.mean()),
                "sd": float(values.std(ddof=1)) if values.size > 1 else 0.0,
                "min": float(values.min()),
                "max": float(values.max()),
            }
        table.append(entry)
    return table


def render_summary_text(summary: list[dict]) -> str:
    blocks = []
    for metric in SUMMARY_METRICS:
        rows = [
            [
                entry["condition"],
                str(entry["n"]),
                f"{entry[metric]['mean']:.6g}",
                f"{entry[metric]['sd']:.6g}",
                f"{entry[metric]['min']:.6g}",
                f"{entry[metric]['max']:.6g}",
            ]
            for entry in summary
        ]
        blocks.append(
            f"{metric}\n"
            + _render_table(["condition", "n", "mean", "sd", "min", "max"], rows)
        )
    return "\n\n".join(blocks)


# -- inferential report -------------------------------------------------------

def render_analysis_text(bundle: AnalysisBundle, metric: str) -> str:
    parts = [f"Analysis of {metric} (alpha = {bundle.alpha:g})"]

    normality_rows = [
        [label, fmt_stat(res.w_stat), fmt_p(res.p_value), res.verdict]
        for label, res in bundle.normality.items()
    ]
    parts.append(
        "Normality (Shapiro-Wilk)\n"
        + _render_table(["condition", "W", "p", "verdict"], normality_rows)
    )

    sph = bundle.sphericity
    if sph.df == 0:
        sph_line = "satisfied (k=2)"
    else:
        state = "violated" if bundle.sphericity_violated else "satisfied"
        sph_line = (
            f"W = {fmt_stat(sph.w_stat)}, chi2({sph.df}) = {fmt_stat(sph.chi_sq)}, "
            f"p = {fmt_p(sph.p_value)} -> {state}"
        )
    parts.append(f"Sphericity (Mauchly)\n{sph_line}")

    anova = bundle.anova
    flags = "  [exact fit]" if anova.exact_fit else ""
    anova_lines = [
        f"F({anova.df_num}, {anova.df_den}) = {fmt_stat(anova.f_value)}, "
        f"p = {fmt_p(anova.p_value)}, eta_g^2 = {fmt_stat(anova.eta_g_sq)}{flags}",
        f"GG epsilon = {fmt_stat(anova.gg_epsilon)}, p_gg = {fmt_p(anova.p_gg)}",
        f"operative p = {fmt_p(bundle.operative_p)} -> "
        + ("reject" if bundle.reject else "retain")
        + " the no-effect hypothesis",
    ]
    parts.append("ANOVA (repeated measures)\n" + "\n".join(anova_lines))

    m = len(bundle.pairwise)
    pairwise_rows = [
        [
            f"{a} vs {b}",
            fmt_stat(res.t_value),
            fmt_p(res.p_raw),
            fmt_p(res.p_corrected),
            "yes" if res.reject else "no",
        ]
        for res in bundle.pairwise
        for a, b in [res.pair]
    ]
    parts.append(
        f"Pairwise (paired t, Bonferroni over m = {m})\n"
        + _render_table(["pair", "t", "p_raw", "p_corrected", "reject"], pairwise_rows)
    )
    return "\n\n".join(parts)


def _write_csv(path: Path, headers: list[str], rows: list[list]) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as sink:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)
    return path


def _full(value: float) -> str:
    return repr(float(value))


def write_analysis_csvs(
    bundle: AnalysisBundle, metric: str, out_dir: str | Path
) -> dict[str, Path]:
    """Write the machine-readable companions of the text report."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    paths["normality"] = _write_csv(
        out_dir / f"{metric}_normality.csv",
        ["condition", "w", "p", "verdict"],
        [
            [label, _full(res.w_stat), _full(res.p_value), res.verdict]
            for label, res in bundle.normality.items()
        ],
    )
    sph = bundle.sphericity
    paths["sphericity"] = _write_csv(
        out_dir / f"{metric}_sphericity.csv",
        ["w", "chi_sq", "df", "p", "violated"],
        [[
            _full(sph.w_stat),
            _full(sph.chi_sq),
            str(sph.df),
            _full(sph.p_value),
            "true" if bundle.sphericity_violated else "false",
        ]],
    )
    anova = bundle.anova
    paths["anova"] = _write_csv(
        out_dir / f"{metric}_anova.csv",
        [
            "f", "df_num", "df_den", "p", "eta_g_sq", "gg_epsilon", "p_gg",
            "exact_fit", "operative_p", "reject",
        ],
        [[
            _full(anova.f_value),
            str(anova.df_num),
            str(anova.df_den),
            _full(anova.p_value),
            _full(anova.eta_g_sq),
            _full(anova.gg_epsilon),
            _full(anova.p_gg),
            "true" if anova.exact_fit else "false",
            _full(bundle.operative_p),
            "true" if bundle.reject else "false",
        ]],
    )
    paths["pairwise"] = _write_csv(
        out_dir / f"{metric}_pairwise.csv",
        ["pair", "t", "p_raw", "p_corrected", "reject"],
        [
            [
                f"{res.pair[0]} vs {res.pair[1]}",
                _full(res.t_value),
                _full(res.p_raw),
                _full(res.p_corrected),
                "true" if res.reject else "false",
            ]
            for res in bundle.pairwise
        ],
    )
    return paths


# -- plot-ready data -----------------------------------------------------------

def write_plotdata(
    rows: list[dict], out_dir: str | Path, metrics: tuple[str, ...] = METRICS
) -> list[Path]:
    """One CSV per metric: condition, mean, sd, n."""
    retained = ok_rows(rows)
    if not retained:
        raise NoDataError("results contain no successful trials")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    conditions = condition_order(retained)
    paths = []
    for metric in metrics:
        data_rows = []
        for label in conditions:
            values = np.asarray(
                [
                    metric_value(r, metric)
                    for r in retained
                    if r["condition"] == label
                ]
            )
            sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
            data_rows.append(
                [label, _full(values.mean()), _full(sd), str(values.size)]
            )
        paths.append(
            _write_csv(
                out_dir / f"plot_{metric}.csv",
                ["condition", "mean", "sd", "n"],
                data_rows,
            )
        )
    return paths

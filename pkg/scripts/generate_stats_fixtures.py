#!/usr/bin/env python3
"""Generate the committed statistics fixtures and their expected values.

Run once (requires the dev extras: statsmodels, pandas); the outputs under
tests/fixtures/ are committed so the test suite never depends on the
reference implementations at runtime.

Expected values come from independent routes, not from the package:
  - F, dfs, p          : statsmodels AnovaRM
  - eta_g^2            : explicit loop-based sum-of-squares decomposition
  - GG epsilon         : Box's raw-covariance formula
  - Mauchly W/chi2/p   : eigenvalues of the contrast covariance on a
                         QR-derived basis of the centering subspace
  - Shapiro-Wilk       : scipy.stats.shapiro
  - paired t           : scipy.stats.ttest_rel, Bonferroni-clamped

Usage: python3 scripts/generate_stats_fixtures.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import linalg, stats
from statsmodels.stats.anova import AnovaRM

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
CONDITIONS = ("500K", "1M", "2M")


# -- independent reference routes ------------------------------------------------

def anova_reference(x: np.ndarray) -> dict:
    n, k = x.shape
    frame = pd.DataFrame(
        {
            "subject": np.repeat(np.arange(n), k),
            "condition": np.tile(np.arange(k), n),
            "y": x.ravel(),
        }
    )
    table = AnovaRM(frame, "y", "subject", within=["condition"]).fit().anova_table
    f_value = float(table["F Value"].iloc[0])
    df_num = int(table["Num DF"].iloc[0])
    df_den = int(table["Den DF"].iloc[0])
    p_value = float(table["Pr > F"].iloc[0])

    # Generalized eta squared by explicit loops (spreadsheet-style).
    grand = sum(x[i][j] for i in range(n) for j in range(k)) / (n * k)
    ss_cond = n * sum((sum(x[i][j] for i in range(n)) / n - grand) ** 2 for j in range(k))
    ss_subj = k * sum((sum(x[i][j] for j in range(k)) / k - grand) ** 2 for i in range(n))
    ss_total = sum((x[i][j] - grand) ** 2 for i in range(n) for j in range(k))
    ss_err = ss_total - ss_cond - ss_subj
    eta_g_sq = ss_cond / (ss_cond + ss_subj + ss_err)

    # Box's epsilon from the raw covariance matrix.
    s = np.cov(x, rowvar=False, ddof=1)
    mean_diag = float(np.trace(s)) / k
    grand_cov = float(s.mean())
    row_means = s.mean(axis=1)
    num = k * k * (mean_diag - grand_cov) ** 2
    den = (k - 1) * (
        float((s * s).sum())
        - 2 * k * float((row_means**2).sum())
        + k * k * grand_cov**2
    )
    epsilon = min(max(num / den, 1.0 / (k - 1)), 1.0)
    p_gg = float(stats.f.sf(f_value, epsilon * df_num, epsilon * df_den))
    return {
        "f_value": f_value,
        "df_num": df_num,
        "df_den": df_den,
        "p_value": p_value,
        "eta_g_sq": eta_g_sq,
        "gg_epsilon": epsilon,
        "p_gg": p_gg,
    }


def mauchly_reference(x: np.ndarray) -> dict:
    n, k = x.shape
    d = k - 1
    # Orthonormal basis of the subspace orthogonal to the unit vector,
    # derived by QR (different from any named contrast family).
    basis = linalg.null_space(np.ones((1, k))).T
    t = basis @ np.cov(x, rowvar=False, ddof=1) @ basis.T
    lam = np.linalg.eigvalsh(t)
    w = float(np.prod(lam) / lam.mean() ** d)
    correction = 1.0 - (2.0 * d * d + d + 2.0) / (6.0 * d * (n - 1))
    chi_sq = float(-(n - 1) * correction * math.log(w))
    df = k * (k - 1) // 2 - 1
    return {
        "w_stat": w,
        "chi_sq": chi_sq,
        "df": df,
        "p_value": float(stats.chi2.sf(chi_sq, df)),
    }


def pairwise_reference(x: np.ndarray, conditions) -> list[dict]:
    n, k = x.shape
    m = k * (k - 1) // 2
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            t_value, p_raw = stats.ttest_rel(x[:, i], x[:, j])
            out.append(
                {
                    "pair": [conditions[i], conditions[j]],
                    "t_value": float(t_value),
                    "df": n - 1,
                    "p_raw": float(p_raw),
                    "p_corrected": min(1.0, m * float(p_raw)),
                }
            )
    return out


def shapiro_reference(x: np.ndarray) -> dict:
    w, p = stats.shapiro(x)
    return {"w_stat": float(w), "p_value": float(p)}


def expected_for(x: np.ndarray, conditions) -> dict:
    return {
        "anova": anova_reference(x),
        "mauchly": mauchly_reference(x),
        "shapiro": {
            label: shapiro_reference(x[:, j]) for j, label in enumerate(conditions)
        },
        "pairwise": pairwise_reference(x, conditions),
    }


# -- fixture matrices ----------------------------------------------------------

def make_matrices() -> dict[str, np.ndarray]:
    n = 50
    matrices: dict[str, np.ndarray] = {}

    rng = np.random.default_rng(101)
    matrices["matrix_00_null"] = rng.normal(100.0, 5.0, size=(n, 3))

    rng = np.random.default_rng(102)
    subject = rng.normal(0.0, 3.0, size=(n, 1))
    matrices["matrix_01_effect"] = (
        100.0 + subject + np.array([0.0, -5.0, -12.0]) + rng.normal(0.0, 1.5, size=(n, 3))
    )

    rng = np.random.default_rng(103)
    cov = np.array([[4.0, 3.0, 1.0], [3.0, 9.0, 2.0], [1.0, 2.0, 40.0]])
    matrices["matrix_02_nonspherical"] = rng.multivariate_normal(
        [50.0, 52.0, 55.0], cov, size=n
    )

    rng = np.random.default_rng(104)
    matrices["matrix_03_skewed"] = rng.exponential(2.0, size=(n, 3)) + np.array(
        [10.0, 11.0, 12.5]
    )

    rng = np.random.default_rng(105)
    subject = rng.normal(0.0, 2e-5, size=(n, 1))
    matrices["matrix_04_pe_shaped"] = (
        np.array([1.0e-3, 4.5e-4, 1.9e-4]) + subject + rng.normal(0.0, 1e-5, size=(n, 3))
    )
    return matrices


def write_matrix_csv(path: Path, conditions, values: np.ndarray) -> None:
    lines = [",".join(conditions)]
    for row in values:
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def main() -> None:
    stats_dir = FIXTURES / "stats"
    shapiro_dir = FIXTURES / "shapiro"
    stats_dir.mkdir(parents=True, exist_ok=True)
    shapiro_dir.mkdir(parents=True, exist_ok=True)

    expected: dict = {"matrices": {}, "shapiro_samples": {}}

    for name, values in make_matrices().items():
        write_matrix_csv(stats_dir / f"{name}.csv", CONDITIONS, values)
        expected["matrices"][name] = expected_for(values, CONDITIONS)

    # Small hand-checkable design for unit tests.
    small = np.array(
        [[1.0, 2.0, 3.0], [2.0, 3.0, 5.0], [3.0, 4.0, 6.0], [4.0, 6.0, 8.0]]
    )
    write_matrix_csv(stats_dir / "matrix_small.csv", CONDITIONS, small)
    expected["matrices"]["matrix_small"] = expected_for(small, CONDITIONS)

    samples = {
        "normal_n50": np.random.default_rng(7).normal(0.0, 1.0, size=50),
        "expon_n50": np.random.default_rng(8).exponential(1.0, size=50),
    }
    for name, sample in samples.items():
        (shapiro_dir / f"{name}.csv").write_text(
            "\n".join(repr(float(v)) for v in sample) + "\n",
            encoding="utf-8",
            newline="\n",
        )
        expected["shapiro_samples"][name] = shapiro_reference(sample)

    out = stats_dir / "expected_stats.json"
    out.write_text(json.dumps(expected, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out}")
    for name in expected["matrices"]:
        anova = expected["matrices"][name]["anova"]
        print(
            f"  {name}: F({anova['df_num']}, {anova['df_den']}) = "
            f"{anova['f_value']:.4f}, p = {anova['p_value']:.3e}, "
            f"eps = {anova['gg_epsilon']:.4f}"
        )


if __name__ == "__main__":
    main()

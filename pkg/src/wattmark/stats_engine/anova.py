"""One-factor repeated-measures ANOVA with sphericity diagnostics.

Implements the standard within-subject decomposition
SS_total = SS_subjects + SS_conditions + SS_error, Mauchly's sphericity
test on the covariance of orthonormal contrasts, the Greenhouse-Geisser
epsilon, and generalized eta squared for a purely within-subject design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as chi2_dist
from scipy.stats import f as f_dist

from ..errors import ContractViolation, DegenerateDesignError
from .matrix import ConditionMatrix

# Sums of squares at or below this fraction of SS_total are treated as zero.
_REL_TOL = 1e-12


@dataclass(frozen=True)
class AnovaResult:
    """Repeated-measures ANOVA outcome for one metric."""

    f_value: float
    df_num: int
    df_den: int
    p_value: float
    eta_g_sq: float
    gg_epsilon: float
    p_gg: float
    exact_fit: bool = False


@dataclass(frozen=True)
class SphericityResult:
    """Mauchly's test outcome."""

    w_stat: float
    chi_sq: float
    df: int
    p_value: float

    def satisfied(self, alpha: float) -> bool:
        return self.p_value >= alpha


def orthonormal_contrasts(k: int) -> np.ndarray:
    """Normalized Helmert contrasts: (k-1) orthonormal rows, each
    orthogonal to the unit vector."""
    if k < 2:
        raise ContractViolation(f"contrasts need k >= 2, got {k}")
    c = np.zeros((k - 1, k))
    for r in range(1, k):
        c[r - 1, :r] = 1.0
        c[r - 1, r] = -float(r)
        c[r - 1] /= math.sqrt(r * (r + 1))
    return c


def _contrast_covariance(matrix: ConditionMatrix) -> np.ndarray:
    """Sample covariance of the orthonormal contrast scores, (k-1) x (k-1)."""
    contrasts = orthonormal_contrasts(matrix.n_conditions)
    scores = matrix.values @ contrasts.T
    return np.cov(scores, rowvar=False, ddof=1).reshape(
        matrix.n_conditions - 1, matrix.n_conditions - 1
    )


def _epsilon_from_contrast_cov(t: np.ndarray, k: int) -> float:
    trace = float(np.trace(t))
    frob_sq = float((t * t).sum())
    if not frob_sq > 0.0:
        raise DegenerateDesignError(
            "contrast covariance is zero; epsilon is undefined"
        )
    eps = trace * trace / ((k - 1) * frob_sq)
    return min(max(eps, 1.0 / (k - 1)), 1.0)


def gg_epsilon(matrix: ConditionMatrix) -> float:
    """Greenhouse-Geisser epsilon, clamped to [1/(k-1), 1]; exactly 1 at k=2."""
    if matrix.n_conditions == 2:
        return 1.0
    return _epsilon_from_contrast_cov(
        _contrast_covariance(matrix), matrix.n_conditions
    )


def mauchly(matrix: ConditionMatrix) -> SphericityResult:
    """Mauchly's sphericity test with the chi-square approximation."""
    n, k = matrix.n_subjects, matrix.n_conditions
    if k == 2:
        # A single difference variance is trivially spherical.
        return SphericityResult(w_stat=1.0, chi_sq=0.0, df=0, p_value=1.0)
    if n <= k:
        raise ContractViolation(
            f"Mauchly's test needs more subjects than conditions (n={n}, k={k})"
        )
    t = _contrast_covariance(matrix)
    d = k - 1
    eigs = np.linalg.eigvalsh(t)
    trace = float(eigs.sum())
    # A (numerically) rank-deficient contrast covariance means some contrast
    # of the conditions has zero variance; the determinant ratio is undefined.
    if not trace > 0.0 or eigs[0] <= 1e-12 * eigs[-1]:
        raise DegenerateDesignError(
            "singular contrast covariance; sphericity is undefined"
        )
    logdet = float(np.log(eigs).sum())
    log_w = float(logdet - d * math.log(trace / d))
    w = min(math.exp(log_w), 1.0)
    correction = 1.0 - (2.0 * d * d + d + 2.0) / (6.0 * d * (n - 1))
    chi_sq = max(0.0, -(n - 1) * correction * log_w)
    df = k * (k - 1) // 2 - 1
    p = float(chi2_dist.sf(chi_sq, df))
    return SphericityResult(w_stat=w, chi_sq=chi_sq, df=df, p_value=p)


def rm_anova(matrix: ConditionMatrix) -> AnovaResult:
    """One-factor repeated-measures ANOVA over a fully crossed matrix."""
    x = matrix.values
    n, k = matrix.n_subjects, matrix.n_conditions
    grand = x.mean()
    ss_cond = n * float(((x.mean(axis=0) - grand) ** 2).sum())
    ss_subj = k * float(((x.mean(axis=1) - grand) ** 2).sum())
    ss_total = float(((x - grand) ** 2).sum())
    ss_err = max(ss_total - ss_cond - ss_subj, 0.0)
    df_num = k - 1
    df_den = (n - 1) * (k - 1)

    if ss_total == 0.0:
        raise DegenerateDesignError(
            "matrix is constant; no variance to decompose"
        )
    tol = _REL_TOL * ss_total
    zero_effect = ss_cond <= tol
    zero_error = ss_err <= tol

    if zero_error and zero_effect:
        # Subjects differ but conditions add nothing and fit each subject
        # exactly: the null effect, reported as F = 0.
        return AnovaResult(
            f_value=0.0,
            df_num=df_num,
            df_den=df_den,
            p_value=1.0,
            eta_g_sq=0.0,
            gg_epsilon=1.0,
            p_gg=1.0,
        )
    eta_g_sq = ss_cond / (ss_cond + ss_subj + ss_err)
    if zero_error:
        # A non-zero effect with zero residual variance: perfect fit.
        return AnovaResult(
            f_value=math.inf,
            df_num=df_num,
            df_den=df_den,
            p_value=0.0,
            eta_g_sq=eta_g_sq,
            gg_epsilon=1.0,
            p_gg=0.0,
            exact_fit=True,
        )
    f_value = (ss_cond / df_num) / (ss_err / df_den)
    p_value = float(f_dist.sf(f_value, df_num, df_den))
    # ss_err > 0 implies a non-degenerate contrast covariance, because
    # SS_error equals (n - 1) * trace of that covariance.
    epsilon = gg_epsilon(matrix)
    p_gg = float(f_dist.sf(f_value, epsilon * df_num, epsilon * df_den))
    return AnovaResult(
        f_value=f_value,
        df_num=df_num,
        df_den=df_den,
        p_value=p_value,
        eta_g_sq=eta_g_sq,
        gg_epsilon=epsilon,
        p_gg=p_gg,
    )

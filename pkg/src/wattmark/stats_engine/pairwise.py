"""Bonferroni-corrected paired t-tests over all condition pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import t as t_dist

from ..errors import ContractViolation, DegeneratePairError
from .matrix import ConditionMatrix


@dataclass(frozen=True)
class PairwiseResult:
    """One paired comparison, corrected for the whole family."""

    pair: tuple[str, str]
    t_value: float
    df: int
    p_raw: float
    p_corrected: float
    reject: bool


def paired_t_bonferroni(
    matrix: ConditionMatrix, alpha: float = 0.05
) -> list[PairwiseResult]:
    """Two-sided paired t-tests for every unordered condition pair.

    p_corrected = min(1, m * p_raw) with m = k(k-1)/2 comparisons;
    reject iff p_corrected < alpha.
    """
    if not 0.0 < alpha < 1.0:
        raise ContractViolation(f"alpha must be in (0, 1), got {alpha!r}")
    n, k = matrix.n_subjects, matrix.n_conditions
    m = k * (k - 1) // 2
    df = n - 1
    results: list[PairwiseResult] = []
    for i, j in combinations(range(k), 2):
        diff = matrix.values[:, i] - matrix.values[:, j]
        sd = float(diff.std(ddof=1))
        if not sd > 0.0:
            raise DegeneratePairError(
                f"conditions {matrix.conditions[i]!r} and {matrix.conditions[j]!r} "
                f"have zero difference variance"
            )
        t_value = float(diff.mean()) / (sd / math.sqrt(n))
        p_raw = 2.0 * float(t_dist.sf(abs(t_value), df))
        p_corrected = min(1.0, m * p_raw)
        results.append(
            PairwiseResult(
                pair=(matrix.conditions[i], matrix.conditions[j]),
                t_value=t_value,
                df=df,
                p_raw=p_raw,
                p_corrected=p_corrected,
                reject=p_corrected < alpha,
            )
        )
    return results

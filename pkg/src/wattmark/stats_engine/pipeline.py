"""The full inferential pipeline over one metric matrix.

Order: per-condition normality, sphericity, repeated-measures ANOVA with
the Greenhouse-Geisser fallback when sphericity is violated, then
Bonferroni-corrected pairwise comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ContractViolation
from .anova import AnovaResult, SphericityResult, mauchly, rm_anova
from .matrix import ConditionMatrix
from .pairwise import PairwiseResult, paired_t_bonferroni
from .shapiro import NormalityResult, shapiro_wilk


@dataclass(frozen=True)
class AnalysisBundle:
    """Everything the report renders for one metric."""

    alpha: float
    normality: dict[str, NormalityResult]
    sphericity: SphericityResult
    anova: AnovaResult
    pairwise: tuple[PairwiseResult, ...]
    sphericity_violated: bool
    operative_p: float
    reject: bool


def analyze(matrix: ConditionMatrix, alpha: float = 0.05) -> AnalysisBundle:
    """Run the whole pipeline; the operative p is the GG-corrected one
    whenever Mauchly's test rejects sphericity at alpha."""
    if not 0.0 < alpha < 1.0:
        raise ContractViolation(f"alpha must be in (0, 1), got {alpha!r}")
    normality = {
        label: shapiro_wilk(matrix.column(label), alpha) for label in matrix.conditions
    }
    sphericity = mauchly(matrix)
    anova = rm_anova(matrix)
    violated = sphericity.p_value < alpha
    operative_p = anova.p_gg if violated else anova.p_value
    pairwise = tuple(paired_t_bonferroni(matrix, alpha))
    return AnalysisBundle(
        alpha=alpha,
        normality=normality,
        sphericity=sphericity,
        anova=anova,
        pairwise=pairwise,
        sphericity_violated=violated,
        operative_p=operative_p,
        reject=operative_p < alpha,
    )

"""Inferential statistics over repeated-measures metric matrices."""

from .anova import (
    AnovaResult,
    SphericityResult,
    gg_epsilon,
    mauchly,
    orthonormal_contrasts,
    rm_anova,
)
from .matrix import ConditionMatrix
from .pairwise import PairwiseResult, paired_t_bonferroni
from .pipeline import AnalysisBundle, analyze
from .shapiro import NormalityResult, shapiro_wilk

__all__ = [
    "AnalysisBundle",
    "AnovaResult",
    "ConditionMatrix",
    "NormalityResult",
    "PairwiseResult",
    "SphericityResult",
    "analyze",
    "gg_epsilon",
    "mauchly",
    "orthonormal_contrasts",
    "paired_t_bonferroni",
    "rm_anova",
    "shapiro_wilk",
]

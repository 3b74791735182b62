"""Shapiro-Wilk normality test (Royston 1995 approximation, AS R94)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from ..errors import ContractViolation, DegenerateSampleError, TooFewSamplesError

# Royston's polynomial coefficients (ascending powers of 1/sqrt(n)) for the
# two largest order-statistic weights.
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
# Coefficients of the normalizing transform for ln(1 - W).
_C3 = (0.5440, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)

_MAX_N = 5000


@dataclass(frozen=True)
class NormalityResult:
    """Shapiro-Wilk outcome for one condition's sample."""

    w_stat: float
    p_value: float
    verdict: str
    alpha: float

    @property
    def normal(self) -> bool:
        return self.verdict == "normal"


def _poly(coeffs, x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _weights(n: int) -> np.ndarray:
    """Approximate optimal linear-estimator weights for n order statistics."""
    m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    ssq_m = float(np.dot(m, m))
    a = np.empty(n)
    if n == 3:
        a[0], a[1], a[2] = -math.sqrt(0.5), 0.0, math.sqrt(0.5)
        return a
    u = 1.0 / math.sqrt(n)
    c = m / math.sqrt(ssq_m)
    a_n = c[-1] + _poly(_C1, u)
    if n > 5:
        a_n1 = c[-2] + _poly(_C2, u)
        phi = (ssq_m - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
            1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2
        )
        root = math.sqrt(phi)
        a[2:-2] = m[2:-2] / root
        a[-1], a[-2] = a_n, a_n1
        a[0], a[1] = -a_n, -a_n1
    else:
        phi = (ssq_m - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
        root = math.sqrt(phi)
        a[1:-1] = m[1:-1] / root
        a[-1] = a_n
        a[0] = -a_n
    return a


def _p_value(w: float, n: int) -> float:
    if w >= 1.0:
        return 1.0
    if n == 3:
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return min(max(p, 0.0), 1.0)
    y = math.log(1.0 - w)
    if n <= 11:
        gamma = -2.273 + 0.459 * n
        if y >= gamma:
            return 0.0
        y = -math.log(gamma - y)
        mu = _poly(_C3, float(n))
        sigma = math.exp(_poly(_C4, float(n)))
    else:
        ln_n = math.log(n)
        mu = _poly(_C5, ln_n)
        sigma = math.exp(_poly(_C6, ln_n))
    z = (y - mu) / sigma
    return float(ndtr(-z))


def shapiro_wilk(sample, alpha: float = 0.05) -> NormalityResult:
    """Test a sample for normality; verdict is 'normal' iff p >= alpha."""
    if not 0.0 < alpha < 1.0:
        raise ContractViolation(f"alpha must be in (0, 1), got {alpha!r}")
    x = np.asarray(sample, dtype=np.float64).ravel()
    if x.size < 3:
        raise TooFewSamplesError(
            f"Shapiro-Wilk needs at least 3 observations, got {x.size}"
        )
    if x.size > _MAX_N:
        raise ContractViolation(
            f"Shapiro-Wilk approximation is calibrated for n <= {_MAX_N}, "
            f"got {x.size}"
        )
    if not np.isfinite(x).all():
        raise ContractViolation("sample must be finite")
    x = np.sort(x)
    centered = x - x.mean()
    ssd = float(np.dot(centered, centered))
    if ssd <= 0.0:
        raise DegenerateSampleError(
            "sample has zero variance; normality is undefined"
        )
    a = _weights(int(x.size))
    num = float(np.dot(a, x))
    w = min(num * num / ssd, 1.0)
    p = _p_value(w, int(x.size))
    verdict = "normal" if p >= alpha else "non-normal"
    return NormalityResult(w_stat=w, p_value=p, verdict=verdict, alpha=alpha)

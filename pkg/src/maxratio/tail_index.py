"""Tail index estimation from group ratios.

With S_n the sum of the n per-group ratios kappa = M2/M1, the tail
index estimate is alpha_hat = S_n / (n - S_n): the ratio mean converges
to alpha/(alpha+1), and this inverts that relation. The limiting
variance of a single ratio is alpha / ((alpha+1)^2 * (alpha+2)), which
gives the delta-method interval
alpha_hat +/- z * (alpha_hat+1)^2 * sqrt(kappa_var / n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as _stats

from .exceptions import (
    DegenerateVarianceError,
    DivergingEstimateError,
    InputValidationError,
    InsufficientDataError,
    ZeroEstimateError,
)
from .grouping import GroupSummary, kappas


@dataclass(frozen=True)
class AlphaEstimate:
    """Tail index estimate with its ratio moments and confidence interval.

    The interval lower bound may be negative for noisy configurations
    and is reported as-is rather than clamped.
    """

    alpha_hat: float
    n: int
    s_n: float
    kappa_mean: float
    kappa_second_moment: float
    kappa_var: float
    se: float
    ci: tuple[float, float]
    level: float

    def to_json(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "n": self.n,
            "s_n": self.s_n,
            "kappa_mean": self.kappa_mean,
            "kappa_var": self.kappa_var,
            "se": self.se,
            "ci": [self.ci[0], self.ci[1]],
            "level": self.level,
        }


def _check_level(level: float) -> float:
    if not (0.0 < level < 1.0):
        raise InputValidationError(f"confidence level must lie in (0, 1), got {level!r}")
    return float(level)


def confidence_interval(
    alpha_hat: float, kappa_var: float, n: int, level: float
) -> tuple[float, float]:
    """Delta-method interval for the tail index.

    Half-width z_{(1+level)/2} * (alpha_hat+1)^2 * sqrt(kappa_var) / sqrt(n),
    with the estimate plugged into the (alpha+1)^2 factor. The lower end
    is not clamped at zero.
    """
    level = _check_level(level)
    if n < 2:
        raise InputValidationError(f"need at least 2 groups for an interval, got n = {n}")
    if kappa_var < 0:
        raise InputValidationError(f"kappa_var must be nonnegative, got {kappa_var!r}")
    if kappa_var == 0:
        raise DegenerateVarianceError("ratio variance is zero; the interval is undefined")
    z = float(_stats.norm.ppf(0.5 * (1.0 + level)))
    half = z * (alpha_hat + 1.0) ** 2 * math.sqrt(kappa_var) / math.sqrt(n)
    return (alpha_hat - half, alpha_hat + half)


def estimate_alpha(summaries: Sequence[GroupSummary], level: float = 0.95) -> AlphaEstimate:
    """Tail index estimate alpha_hat = S_n / (n - S_n) from group summaries.

    Raises DivergingEstimateError when every ratio equals one (S_n = n,
    no tail decay visible at this group size) and ZeroEstimateError when
    every ratio is zero. When the empirical ratio variance is exactly
    zero the estimate is still returned, with a zero standard error and
    a point interval; `confidence_interval` itself refuses that case.
    """
    level = _check_level(level)
    n = len(summaries)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 groups to estimate, got {n}")
    k = kappas(summaries)
    s_n = float(np.sum(k))
    if s_n >= n:
        raise DivergingEstimateError(
            f"S_n = n = {n} (every ratio equals one): alpha_hat diverges; "
            "the group size m is likely too small or the data has no tail decay"
        )
    if s_n <= 0.0:
        raise ZeroEstimateError("S_n = 0 (every ratio is zero): alpha_hat collapses to zero")
    kappa_mean = s_n / n
    second = float(np.mean(k * k))
    kappa_var = max(second - kappa_mean * kappa_mean, 0.0)
    alpha_hat = s_n / (n - s_n)
    if kappa_var > 0.0:
        ci = confidence_interval(alpha_hat, kappa_var, n, level)
        se = (alpha_hat + 1.0) ** 2 * math.sqrt(kappa_var / n)
    else:
        ci = (alpha_hat, alpha_hat)
        se = 0.0
    return AlphaEstimate(
        alpha_hat=float(alpha_hat),
        n=n,
        s_n=s_n,
        kappa_mean=float(kappa_mean),
        kappa_second_moment=second,
        kappa_var=float(kappa_var),
        se=float(se),
        ci=ci,
        level=level,
    )


def studentized_stat(summaries: Sequence[GroupSummary], alpha_true: float) -> float:
    """sqrt(n) * (kappa_mean - alpha/(alpha+1)) / sqrt(kappa_var).

    Compares the ratio mean against its known limit; approximately
    standard normal under a well-sized plan. Intended for diagnostics
    and simulation studies where the true index is known.
    """
    if not (alpha_true > 0 and math.isfinite(alpha_true)):
        raise InputValidationError(f"alpha_true must be positive and finite, got {alpha_true!r}")
    k = kappas(summaries)
    n = k.size
    kappa_mean = float(np.mean(k))
    kappa_var = float(np.mean(k * k) - kappa_mean * kappa_mean)
    if kappa_var <= 0.0:
        raise DegenerateVarianceError("ratio variance is zero; the statistic is undefined")
    target = alpha_true / (alpha_true + 1.0)
    return float(math.sqrt(n) * (kappa_mean - target) / math.sqrt(kappa_var))


def limiting_kappa_variance(alpha: float) -> float:
    """Limit of the per-ratio variance: alpha / ((alpha+1)^2 * (alpha+2)).

    Equals 1/12 at alpha = 1. Useful as a sanity reference for the
    empirical kappa_var at large group sizes.
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise InputValidationError(f"alpha must be positive and finite, got {alpha!r}")
    return alpha / ((alpha + 1.0) ** 2 * (alpha + 2.0))

"""Executable limit laws and goodness-of-fit utilities.

The estimators in this package come with closed-form limits that make
them testable against simulation: the ratio kappa of two top order
statistics converges to a law with CDF t^alpha on [0, 1]; the top two
group maxima, normalized by b_m = (c1*m)^(1/alpha), converge jointly to
(G1^(-1/alpha), G2^(-1/alpha)) where G_k are partial sums of unit
exponentials. This module implements those limits and the
Kolmogorov-Smirnov distance used to compare simulations against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special as _special
from scipy import stats as _stats

from .exceptions import InputValidationError
from .grouping import GroupingPlan, summarize
from .planner import SecondOrderParams, plan_second_order
from .synth import RadialLaw, derived_seed, sample_max_cone
from .tail_index import studentized_stat


@dataclass(frozen=True)
class LimitParams:
    """Normalization for group maxima of the product construction.

    b_m = (c1 * m)^(1/alpha) is the exact norming sequence when the
    radial survival function has leading term c1 * x^(-alpha) and the
    spectral measure is normalized to total mass one.
    """

    alpha: float
    c1: float
    b_m: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InputValidationError(f"alpha must be positive and finite, got {self.alpha!r}")
        if not (self.c1 > 0 and math.isfinite(self.c1)):
            raise InputValidationError(f"c1 must be positive and finite, got {self.c1!r}")
        if not (self.b_m > 0):
            raise InputValidationError(f"b_m must be positive, got {self.b_m!r}")

    @classmethod
    def for_group_size(cls, alpha: float, c1: float, m: int) -> "LimitParams":
        if m < 1:
            raise InputValidationError(f"group size must be >= 1, got {m}")
        return cls(alpha=float(alpha), c1=float(c1), b_m=(float(c1) * m) ** (1.0 / alpha))


def limit_kappa_cdf(alpha: float, t):
    """CDF of the limiting ratio: P(kappa <= t) = t^alpha on [0, 1].

    The limit ratio is (U)^(1/alpha) for U uniform on (0, 1), so its
    mean is alpha/(alpha+1), matching the centering of the estimator.
    Accepts scalars or arrays; values outside [0, 1] are rejected.
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise InputValidationError(f"alpha must be positive and finite, got {alpha!r}")
    arr = np.asarray(t, dtype=float)
    if arr.size and (np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr))):
        raise InputValidationError("t must lie in [0, 1]")
    out = arr**alpha
    return float(out) if np.ndim(t) == 0 else out


def limit_order_stat_cdf(alpha: float, k: int, x):
    """CDF of G_k^(-1/alpha), the limit of the k-th group maximum over b_m.

    G_k is the sum of k unit exponentials, so
    P(G_k^(-1/alpha) <= x) = P(G_k >= x^(-alpha)), the regularized upper
    incomplete gamma function at x^(-alpha). For k = 1 this is
    exp(-x^(-alpha)); for k = 2 it is (1 + x^(-alpha)) * exp(-x^(-alpha)).
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise InputValidationError(f"alpha must be positive and finite, got {alpha!r}")
    if k < 1:
        raise InputValidationError(f"order k must be >= 1, got {k}")
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    pos = arr > 0
    with np.errstate(divide="ignore", over="ignore"):
        out[pos] = _special.gammaincc(k, arr[pos] ** (-alpha))
    return float(out) if np.ndim(x) == 0 else out


def sample_gamma_limit(alpha: float, k: int, n_draws: int, seed: int) -> np.ndarray:
    """Draws of (G_1^(-1/alpha), ..., G_k^(-1/alpha)) as an (n_draws, k) array.

    G_i are partial sums of independent unit exponentials, so each row
    is strictly decreasing. Deterministic given the seed.
    """
    if not (alpha > 0 and math.isfinite(alpha)):
        raise InputValidationError(f"alpha must be positive and finite, got {alpha!r}")
    if k < 1:
        raise InputValidationError(f"k must be >= 1, got {k}")
    if n_draws < 1:
        raise InputValidationError(f"n_draws must be >= 1, got {n_draws}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    gaps = rng.standard_exponential((n_draws, k))
    gammas = np.cumsum(gaps, axis=1)
    return gammas ** (-1.0 / alpha)


def ks_distance(sample: Sequence[float], cdf: Callable) -> float:
    """Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.

    sup_x |F_hat(x) - F(x)| via the standard order-statistics formula.
    The callable must accept a sorted numpy array and return the CDF
    values; it is expected to be nondecreasing on the sample range.
    """
    arr = np.sort(np.asarray(sample, dtype=float).ravel())
    if arr.size == 0:
        raise InputValidationError("ks_distance requires a nonempty sample")
    if not np.all(np.isfinite(arr)):
        raise InputValidationError("ks_distance requires finite sample values")
    n = arr.size
    f = np.asarray(cdf(arr), dtype=float)
    if f.shape != arr.shape:
        raise InputValidationError("cdf must return one value per sample point")
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_threshold(n_points: int, level: float = 0.01) -> float:
    """Asymptotic Kolmogorov rejection threshold at the given level.

    Returns K_q / sqrt(n) with K_q the upper quantile of the Kolmogorov
    distribution (about 1.628 at the 1 percent level). The asymptotic
    quantile errs conservatively by under one percent for n >= 500.
    """
    if n_points < 1:
        raise InputValidationError(f"n_points must be >= 1, got {n_points}")
    if not (0.0 < level < 1.0):
        raise InputValidationError(f"level must lie in (0, 1), got {level!r}")
    return float(_special.kolmogi(level)) / math.sqrt(n_points)


# ---------------------------------------------------------------------------
# Named simulation diagnostics (also exposed by the CLI `diagnose` command)


def run_kappa_uniformity(
    alpha: float, m: int, n_groups: int, seed: int, level: float = 0.01
) -> dict:
    """KS check that kappa^alpha is uniform for exact Pareto radii.

    This is an exact finite-sample law (for every m >= 2), not an
    asymptotic one: the top spacing of exponential order statistics is
    itself a unit exponential.
    """
    dataset = sample_max_cone(n_groups * m, RadialLaw.pareto(alpha), seed)
    summaries, _ = summarize(dataset, GroupingPlan(n=n_groups, m=m))
    powered = np.array([s.kappa for s in summaries]) ** alpha
    statistic = ks_distance(powered, lambda t: np.clip(t, 0.0, 1.0))
    threshold = ks_threshold(n_groups, level)
    return {
        "test": "kappa_uniformity",
        "statistic": statistic,
        "threshold": threshold,
        "pass": bool(statistic < threshold),
        "n": int(n_groups),
        "seed": int(seed),
    }


def run_studentized_normality(
    alpha: float,
    n_obs: int,
    replicates: int,
    seed: int,
    level: float = 0.01,
    epsilon: float | None = None,
) -> dict:
    """KS check of the studentized ratio mean against the standard normal.

    Each replicate draws n_obs observations from the beta = 2*alpha
    two-term radial law, groups them with the second-order plan for
    that law, and studentizes the ratio mean at the true alpha.
    """
    if replicates < 10:
        raise InputValidationError(f"need at least 10 replicates, got {replicates}")
    law = RadialLaw.fristedt_toy(alpha)
    plan = plan_second_order(
        n_obs, SecondOrderParams(alpha=alpha, beta=2.0 * alpha, epsilon=epsilon)
    )
    stats = np.empty(replicates)
    for i in range(replicates):
        dataset = sample_max_cone(plan.n * plan.m, law, derived_seed(seed, i))
        summaries, _ = summarize(dataset, plan)
        stats[i] = studentized_stat(summaries, alpha)
    statistic = ks_distance(stats, _stats.norm.cdf)
    threshold = ks_threshold(replicates, level)
    return {
        "test": "studentized_normality",
        "statistic": statistic,
        "threshold": threshold,
        "pass": bool(statistic < threshold),
        "n": int(replicates),
        "seed": int(seed),
        "plan": plan.to_json(),
    }


def run_order_stat_limit(
    alpha: float,
    m: int,
    n_groups: int,
    seed: int,
    level: float = 0.01,
    _chunk_elements: int = 20_000_000,
) -> list[dict]:
    """KS checks of M1/b_m and M2/b_m against their gamma-sum limits.

    Groups are simulated in memory-bounded chunks, one derived seed per
    chunk. The chunk budget is part of the seed schedule, so results
    are reproducible for fixed (seed, m, n_groups, _chunk_elements).
    """
    law = RadialLaw.pareto(alpha)
    b_m = LimitParams.for_group_size(alpha, 1.0, m).b_m
    chunk_groups = max(1, _chunk_elements // m)
    m1_parts: list[np.ndarray] = []
    m2_parts: list[np.ndarray] = []
    done = 0
    chunk_index = 0
    while done < n_groups:
        take = min(chunk_groups, n_groups - done)
        dataset = sample_max_cone(take * m, law, derived_seed(seed, chunk_index))
        summaries, _ = summarize(dataset, GroupingPlan(n=take, m=m))
        m1_parts.append(np.array([s.m1 for s in summaries]) / b_m)
        m2_parts.append(np.array([s.m2 for s in summaries]) / b_m)
        done += take
        chunk_index += 1
    threshold = ks_threshold(n_groups, level)
    results = []
    for name, parts, k in (("order_stat_limit_m1", m1_parts, 1), ("order_stat_limit_m2", m2_parts, 2)):
        values = np.concatenate(parts)
        statistic = ks_distance(values, lambda x, _k=k: limit_order_stat_cdf(alpha, _k, x))
        results.append(
            {
                "test": name,
                "statistic": statistic,
                "threshold": threshold,
                "pass": bool(statistic < threshold),
                "n": int(n_groups),
                "seed": int(seed),
            }
        )
    return results

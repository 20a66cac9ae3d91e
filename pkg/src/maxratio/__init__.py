"""Tail index and spectral measure estimation from within-group maxima ratios.

Observations on a normed cone are split into groups; each group is
reduced to its two largest norms and the direction of its maximum. The
ratio of second-largest to largest norm concentrates, as groups grow,
on a law that pins down the tail index alpha, while the recorded
directions sample the spectral measure. This package provides the
estimators, confidence intervals, a group-sizing planner, synthetic
generators with known tail behaviour, and limit-law diagnostics, plus a
``maxratio`` command line tool.
"""

from .cone import (
    Box,
    Cap,
    Complement,
    ConeSpec,
    Dataset,
    FiniteUnion,
    WholeSphere,
    direction,
    norm,
    norms,
    sphere_contains,
    sphere_set_from_json,
)
from .diagnostics import (
    LimitParams,
    ks_distance,
    ks_threshold,
    limit_kappa_cdf,
    limit_order_stat_cdf,
    run_kappa_uniformity,
    run_order_stat_limit,
    run_studentized_normality,
    sample_gamma_limit,
)
from .estimator import TailIndexEstimator
from .exceptions import (
    DegenerateStatisticError,
    InputValidationError,
    InsufficientDataError,
    MaxratioError,
    NumericError,
)
from .grouping import (
    GroupingPlan,
    GroupSummary,
    partition,
    statistic_Sn,
    summaries_from_csv,
    summaries_to_csv,
    summarize,
    summarize_group,
)
from .planner import (
    ALPHA_ESTIMATION,
    SPECTRAL_ESTIMATION,
    SecondOrderParams,
    default_epsilon,
    plan_second_order,
    plan_simple,
)
from .spectral import (
    SpectralEstimate,
    SpectralQueryResult,
    estimate_spectral,
    measure_of,
    partition_histogram,
    query,
    spectral_ci,
)
from .synth import DirectionLaw, RadialLaw, derived_seed, sample, sample_max_cone
from .tail_index import (
    AlphaEstimate,
    confidence_interval,
    estimate_alpha,
    limiting_kappa_variance,
    studentized_stat,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaEstimate",
    "ALPHA_ESTIMATION",
    "Box",
    "Cap",
    "Complement",
    "ConeSpec",
    "Dataset",
    "DegenerateStatisticError",
    "DirectionLaw",
    "FiniteUnion",
    "GroupingPlan",
    "GroupSummary",
    "InputValidationError",
    "InsufficientDataError",
    "LimitParams",
    "MaxratioError",
    "NumericError",
    "RadialLaw",
    "SecondOrderParams",
    "SPECTRAL_ESTIMATION",
    "SpectralEstimate",
    "SpectralQueryResult",
    "TailIndexEstimator",
    "WholeSphere",
    "confidence_interval",
    "default_epsilon",
    "derived_seed",
    "direction",
    "estimate_alpha",
    "estimate_spectral",
    "ks_distance",
    "ks_threshold",
    "limit_kappa_cdf",
    "limit_order_stat_cdf",
    "limiting_kappa_variance",
    "measure_of",
    "norm",
    "norms",
    "partition",
    "partition_histogram",
    "plan_second_order",
    "plan_simple",
    "query",
    "run_kappa_uniformity",
    "run_order_stat_limit",
    "run_studentized_normality",
    "sample",
    "sample_gamma_limit",
    "sample_max_cone",
    "sphere_contains",
    "sphere_set_from_json",
    "spectral_ci",
    "statistic_Sn",
    "studentized_stat",
    "summaries_from_csv",
    "summaries_to_csv",
    "summarize",
    "summarize_group",
    "__version__",
]

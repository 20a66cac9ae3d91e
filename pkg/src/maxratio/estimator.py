"""Scikit-learn style front end over the functional estimation modules.

`TailIndexEstimator` wires validation, planning, grouping, tail index
estimation, and the spectral measure into the familiar fit/attributes
pattern so it composes with scikit-learn tooling (get_params,
set_params, clone). All statistical work is delegated to the
module-level functions, which remain the primary API.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import spectral as _spectral
from . import tail_index as _tail
from .cone import EUCLIDEAN_RD, ConeSpec, Dataset, SphereSet
from .exceptions import InputValidationError
from .grouping import GroupingPlan, summarize
from .planner import ALPHA_ESTIMATION, SecondOrderParams, plan_second_order, plan_simple

#: Exponent used when no plan parameter is given: the second-order
#: optimum for laws whose correction term decays twice as fast as the
#: leading term (zeta = 1), without slack.
_DEFAULT_R = 2.0 / 3.0


class TailIndexEstimator(BaseEstimator):
    """Estimate the tail index and spectral measure of heavy-tailed data.

    The sample is split into n groups of m observations; within each
    group the ratio of the two largest norms and the direction of the
    maximum are extracted. The ratio mean determines alpha_hat and the
    directions form the spectral estimate.

    Parameters
    ----------
    cone : ConeSpec, optional
        Cone the data lives on. Defaults to R^d with the Euclidean norm
        and d inferred from the data.
    n_groups, group_size : int, optional
        Explicit plan. If only n_groups is given, group_size defaults to
        N // n_groups (and vice versa).
    r : float, optional
        Simple plan n = floor(N^r).
    zeta : float, optional
        Second-order plan rate ratio (overrides beta/alpha_pilot).
    beta, alpha_pilot : float, optional
        Second-order plan via zeta = (beta - alpha_pilot)/alpha_pilot.
    epsilon : float, optional
        Exponent slack for the second-order plan; defaults to
        log(log N)/log N.
    target : str
        "alpha_estimation" or "spectral_estimation" (caps zeta at 1).
    level : float
        Confidence level for intervals, default 0.95.
    shuffle : bool
        Randomly permute the observations before grouping (guards
        against serially correlated inputs).
    random_state : int, optional
        Seed for the optional shuffle.

    Attributes
    ----------
    cone_ : ConeSpec
        Cone actually used.
    plan_ : GroupingPlan
        The (n, m) grouping applied.
    n_discarded_ : int
        Trailing observations dropped by the grouping.
    summaries_ : list of GroupSummary
        Per-group order statistics.
    alpha_ : float
        Tail index estimate.
    alpha_estimate_ : AlphaEstimate
        Estimate with moments, standard error, and interval.
    spectral_ : SpectralEstimate
        Empirical spectral measure of the group-maximum directions.
    n_features_in_ : int
        Number of data columns seen during fit.

    Examples
    --------
    >>> from maxratio import synth
    >>> data = synth.sample_max_cone(10000, synth.RadialLaw.pareto(1.0), seed=7)
    >>> est = TailIndexEstimator(r=0.5).fit(data.coords)
    >>> 0.5 < est.alpha_ < 2.0
    True
    """

    def __init__(
        self,
        cone: Optional[ConeSpec] = None,
        n_groups: Optional[int] = None,
        group_size: Optional[int] = None,
        r: Optional[float] = None,
        zeta: Optional[float] = None,
        beta: Optional[float] = None,
        alpha_pilot: Optional[float] = None,
        epsilon: Optional[float] = None,
        target: str = ALPHA_ESTIMATION,
        level: float = 0.95,
        shuffle: bool = False,
        random_state: Optional[int] = None,
    ):
        self.cone = cone
        self.n_groups = n_groups
        self.group_size = group_size
        self.r = r
        self.zeta = zeta
        self.beta = beta
        self.alpha_pilot = alpha_pilot
        self.epsilon = epsilon
        self.target = target
        self.level = level
        self.shuffle = shuffle
        self.random_state = random_state

    def fit(self, X, y=None):
        """Group the observations and estimate the tail index and spectral measure.

        Parameters
        ----------
        X : array-like of shape (n_obs, d) or (n_obs,)
            Observations as rows; a flat array is treated as one column.
        y : ignored
            Present for scikit-learn API compatibility.
        """
        X = check_array(X, dtype=np.float64, ensure_2d=False)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        cone = self.cone if self.cone is not None else ConeSpec(EUCLIDEAN_RD, X.shape[1])
        if self.shuffle:
            rng = np.random.default_rng(self.random_state)
            X = X[rng.permutation(X.shape[0])]
        dataset = Dataset(cone, X)
        plan = self._resolve_plan(len(dataset))
        summaries, discarded = summarize(dataset, plan)
        estimate = _tail.estimate_alpha(summaries, level=self.level)
        self.cone_ = cone
        self.plan_ = plan
        self.n_discarded_ = discarded
        self.summaries_ = summaries
        self.alpha_estimate_ = estimate
        self.alpha_ = estimate.alpha_hat
        self.spectral_ = _spectral.estimate_spectral(summaries, cone)
        self.n_features_in_ = X.shape[1]
        return self

    def _resolve_plan(self, n_obs: int) -> GroupingPlan:
        chosen = [
            name
            for name, value in (
                ("n_groups/group_size", self.n_groups or self.group_size),
                ("r", self.r),
                ("zeta or beta", self.zeta if self.zeta is not None else self.beta),
            )
            if value is not None
        ]
        if len(chosen) > 1:
            raise InputValidationError(
                f"conflicting plan parameters: give only one of {chosen}"
            )
        if self.n_groups is not None or self.group_size is not None:
            n = self.n_groups if self.n_groups is not None else n_obs // int(self.group_size)
            m = self.group_size if self.group_size is not None else n_obs // int(self.n_groups)
            return GroupingPlan(n=int(n), m=int(m))
        if self.r is not None:
            return plan_simple(n_obs, self.r)
        if self.zeta is not None or self.beta is not None:
            pilot = self.alpha_pilot if self.alpha_pilot is not None else 1.0
            params = SecondOrderParams(
                alpha=pilot,
                beta=self.beta if self.beta is not None else np.inf,
                zeta=self.zeta,
                epsilon=self.epsilon,
                target=self.target,
            )
            return plan_second_order(n_obs, params)
        return plan_simple(n_obs, _DEFAULT_R)

    def spectral_mass(self, sset: SphereSet, with_ci: bool = True):
        """Mass of a sphere set under the fitted spectral measure.

        With with_ci=True the result carries the normal-approximation
        interval at the estimator's confidence level; degenerate masses
        (0 or 1) then raise, as the interval is undefined there.
        """
        check_is_fitted(self, "spectral_")
        if with_ci:
            return _spectral.query(self.spectral_, sset, level=self.level)
        return _spectral.measure_of(self.spectral_, sset)

    def confidence_interval(self) -> tuple[float, float]:
        """The fitted delta-method interval for the tail index."""
        check_is_fitted(self, "alpha_estimate_")
        return self.alpha_estimate_.ci

    def _more_tags(self):
        return {"requires_y": False}

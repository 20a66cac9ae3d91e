"""Empirical spectral measure from the directions of group maxima.

The estimate places mass 1/n on the direction of each group's maximal
element. Evaluating it on a sphere set B counts the atoms inside B; the
count is binomial, which yields the normal-approximation confidence
interval with variance p_hat * (1 - p_hat) / n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats as _stats

from . import cone as _cone
from .cone import ConeSpec, SphereSet
from .exceptions import (
    DegenerateVarianceError,
    InputValidationError,
    OverlappingPartitionError,
)
from .grouping import GroupSummary, thetas


@dataclass(frozen=True)
class SpectralEstimate:
    """Atomic probability measure on the unit sphere: n atoms, weight 1/n."""

    atoms: np.ndarray
    cone: ConeSpec

    def __post_init__(self) -> None:
        atoms = np.array(self.atoms, dtype=float, copy=True, ndmin=2)
        if atoms.ndim != 2 or atoms.shape[0] < 1:
            raise InputValidationError(f"atoms must form a (n, d) array, got shape {atoms.shape}")
        r = _cone.norms(self.cone, atoms)
        off = np.abs(r - 1.0) > _cone.UNIT_NORM_INPUT_TOL
        if np.any(off):
            raise InputValidationError(
                f"spectral atoms must be unit vectors; atom(s) "
                f"{np.flatnonzero(off)[:10].tolist()} have norms {r[off][:10].tolist()}"
            )
        atoms.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)

    @property
    def n(self) -> int:
        return int(self.atoms.shape[0])

    @property
    def weight(self) -> float:
        return 1.0 / self.n


@dataclass(frozen=True)
class SpectralQueryResult:
    """Mass of a sphere set under the empirical spectral measure.

    The interval, when present, is the unclamped normal approximation;
    it is None for plain measure evaluations without an interval.
    """

    set: SphereSet
    p_hat: float
    count: int
    ci: Optional[tuple[float, float]] = None
    level: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "set": self.set.to_json(),
            "p_hat": self.p_hat,
            "ci": None if self.ci is None else [self.ci[0], self.ci[1]],
            "level": self.level,
        }


def estimate_spectral(summaries: Sequence[GroupSummary], spec: ConeSpec) -> SpectralEstimate:
    """Spectral measure whose atoms are the group-maximum directions, in group order."""
    if len(summaries) == 0:
        raise InputValidationError("cannot estimate a spectral measure from zero summaries")
    return SpectralEstimate(atoms=thetas(summaries), cone=spec)


def measure_of(estimate: SpectralEstimate, sset: SphereSet) -> SpectralQueryResult:
    """Evaluate the measure on a sphere set (no confidence interval)."""
    _cone.validate_sphere_set(estimate.cone, sset)
    inside = _cone.contains_many(estimate.cone, sset, estimate.atoms)
    count = int(np.count_nonzero(inside))
    return SpectralQueryResult(set=sset, p_hat=count / estimate.n, count=count)


def spectral_ci(p_hat: float, n: int, level: float) -> tuple[float, float]:
    """Normal-approximation interval p_hat +/- z * sqrt(p_hat*(1-p_hat)/n).

    Degenerate masses p_hat in {0, 1} have an undefined studentized
    statistic and raise instead of producing a zero-width interval;
    hitting this usually means the query set was chosen badly.
    The interval is not clamped to [0, 1].
    """
    if not (0.0 < level < 1.0):
        raise InputValidationError(f"confidence level must lie in (0, 1), got {level!r}")
    if n < 2:
        raise InputValidationError(f"need at least 2 atoms for an interval, got n = {n}")
    if not (0.0 <= p_hat <= 1.0):
        raise InputValidationError(f"p_hat must lie in [0, 1], got {p_hat!r}")
    if p_hat == 0.0 or p_hat == 1.0:
        raise DegenerateVarianceError(
            f"p_hat = {p_hat}: the normalized statistic is undefined at degenerate masses"
        )
    z = float(_stats.norm.ppf(0.5 * (1.0 + level)))
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / n)
    return (p_hat - half, p_hat + half)


def query(estimate: SpectralEstimate, sset: SphereSet, level: float = 0.95) -> SpectralQueryResult:
    """Measure of a set together with its confidence interval."""
    base = measure_of(estimate, sset)
    ci = spectral_ci(base.p_hat, estimate.n, level)
    return SpectralQueryResult(
        set=base.set, p_hat=base.p_hat, count=base.count, ci=ci, level=float(level)
    )


def partition_histogram(
    estimate: SpectralEstimate, sets: Sequence[SphereSet]
) -> list[tuple[SphereSet, float]]:
    """Per-cell masses over pairwise disjoint sphere sets.

    Disjointness is checked empirically: an atom falling in two cells
    raises OverlappingPartitionError. Cell masses sum to at most 1, with
    equality exactly when the cells cover all atoms.
    """
    if len(sets) == 0:
        raise InputValidationError("partition_histogram requires at least one set")
    membership = np.zeros(estimate.n, dtype=int)
    masses: list[tuple[SphereSet, float]] = []
    for sset in sets:
        _cone.validate_sphere_set(estimate.cone, sset)
        inside = _cone.contains_many(estimate.cone, sset, estimate.atoms)
        membership += inside.astype(int)
        masses.append((sset, float(np.count_nonzero(inside)) / estimate.n))
    if np.any(membership > 1):
        bad = int(np.flatnonzero(membership > 1)[0])
        raise OverlappingPartitionError(
            f"atom {bad} lies in more than one cell; the sets are not disjoint"
        )
    return masses


def atoms_to_csv(estimate: SpectralEstimate, path) -> None:
    """Write the atoms as CSV, one row per atom, no header."""
    np.savetxt(path, estimate.atoms, fmt="%.17g", delimiter=",")

"""Partition a dataset into groups and extract per-group order statistics.

Each group of m observations yields the largest norm M1, the second
largest M2, the ratio kappa = M2/M1, and the direction theta of the
group maximum. The sum S_n of the ratios feeds the tail index estimate
and the directions feed the spectral measure estimate.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import cone as _cone
from .cone import ConeSpec, Dataset
from .exceptions import (
    DegenerateGroupError,
    InputValidationError,
    InsufficientDataError,
)


@dataclass(frozen=True)
class SimpleProvenance:
    """Plan came from n = floor(N^r)."""

    r: float


@dataclass(frozen=True)
class SecondOrderProvenance:
    """Plan came from the second-order exponent 2*zeta/(1+2*zeta) - epsilon."""

    zeta: float
    epsilon: float


@dataclass(frozen=True)
class ExplicitProvenance:
    """Plan was supplied directly as (n, m)."""


Provenance = Union[SimpleProvenance, SecondOrderProvenance, ExplicitProvenance]


@dataclass(frozen=True)
class GroupingPlan:
    """Number of groups n and group size m, plus how they were chosen."""

    n: int
    m: int
    provenance: Provenance = ExplicitProvenance()

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputValidationError(f"number of groups must be a positive integer, got {self.n!r}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise InputValidationError(
                f"group size must be an integer >= 2 (two order statistics are needed), got {self.m!r}"
            )
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    def to_json(self) -> dict:
        prov: dict
        if isinstance(self.provenance, SimpleProvenance):
            prov = {"kind": "simple", "r": self.provenance.r}
        elif isinstance(self.provenance, SecondOrderProvenance):
            prov = {
                "kind": "second_order",
                "zeta": self.provenance.zeta,
                "epsilon": self.provenance.epsilon,
            }
        else:
            prov = {"kind": "explicit"}
        return {"n": self.n, "m": self.m, "provenance": prov}

    @staticmethod
    def from_json(obj: dict) -> "GroupingPlan":
        try:
            prov_obj = obj.get("provenance", {"kind": "explicit"})
            kind = prov_obj["kind"]
            if kind == "simple":
                prov: Provenance = SimpleProvenance(float(prov_obj["r"]))
            elif kind == "second_order":
                prov = SecondOrderProvenance(
                    float(prov_obj["zeta"]), float(prov_obj["epsilon"])
                )
            elif kind == "explicit":
                prov = ExplicitProvenance()
            else:
                raise InputValidationError(f"unknown plan provenance kind {kind!r}")
            return GroupingPlan(obj["n"], obj["m"], prov)
        except KeyError as exc:
            raise InputValidationError(f"plan JSON missing field {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class GroupSummary:
    """Order statistics of one group.

    argmax_offset is the within-group index of the maximizer (smallest
    index on ties). It is None for summaries read back from CSV, which
    does not carry the offset.
    """

    group_index: int
    m1: float
    m2: float
    kappa: float
    theta: np.ndarray
    argmax_offset: int | None = None


@dataclass(frozen=True)
class PartitionResult:
    """Contiguous groups as an (n, m, d) array plus the discarded count."""

    groups: np.ndarray
    discarded: int


def partition(dataset: Dataset, plan: GroupingPlan) -> PartitionResult:
    """Split the dataset into n contiguous groups of m observations.

    Group i consists of observations [i*m, (i+1)*m) in original order;
    the trailing N - n*m observations are discarded and their count is
    reported. Raises InsufficientDataError when N < n*m.
    """
    N = len(dataset)
    need = plan.n * plan.m
    if N < need:
        raise InsufficientDataError(
            f"dataset has {N} observations but the plan needs n*m = {plan.n}*{plan.m} = {need}"
        )
    d = dataset.dimension
    groups = dataset.coords[:need].reshape(plan.n, plan.m, d)
    return PartitionResult(groups=groups, discarded=N - need)


def summarize_group(spec: ConeSpec, group, group_index: int = 0) -> GroupSummary:
    """Order statistics of a single group of m >= 2 cone elements."""
    arr = np.asarray(group, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise InputValidationError(
            f"a group must contain at least 2 elements, got shape {arr.shape}"
        )
    summaries = _summarize_array(spec, arr[None, :, :], first_index=group_index)
    return summaries[0]


def summarize(dataset: Dataset, plan: GroupingPlan) -> tuple[list[GroupSummary], int]:
    """Partition and summarize in one pass.

    Returns the list of n group summaries (in group order) and the
    number of discarded trailing observations.
    """
    part = partition(dataset, plan)
    n, m, d = part.groups.shape
    radii = dataset.norms[: n * m].reshape(n, m)
    summaries = _summarize_array(dataset.cone, part.groups, radii=radii)
    return summaries, part.discarded


def _summarize_array(
    spec: ConeSpec,
    groups: np.ndarray,
    radii: np.ndarray | None = None,
    first_index: int = 0,
) -> list[GroupSummary]:
    """Vectorized summaries for an (n, m, d) array of groups."""
    n, m, d = groups.shape
    if radii is None:
        flat = groups.reshape(n * m, d)
        radii = _cone.norms(spec, flat).reshape(n, m)
    offsets = np.argmax(radii, axis=1)  # first occurrence on ties
    rows = np.arange(n)
    m1 = radii[rows, offsets]
    if np.any(m1 == 0.0):
        bad = int(np.flatnonzero(m1 == 0.0)[0]) + first_index
        raise DegenerateGroupError(
            f"group {bad} has all norms zero; the ratio kappa is undefined"
        )
    part = np.partition(radii, m - 2, axis=1)
    m2 = part[:, m - 2]
    kappa = m2 / m1
    theta = groups[rows, offsets, :] / m1[:, None]
    return [
        GroupSummary(
            group_index=first_index + i,
            m1=float(m1[i]),
            m2=float(m2[i]),
            kappa=float(kappa[i]),
            theta=theta[i],
            argmax_offset=int(offsets[i]),
        )
        for i in range(n)
    ]


def statistic_Sn(summaries: Sequence[GroupSummary]) -> float:
    """Sum of the per-group ratios, S_n = sum_i kappa_i."""
    if len(summaries) == 0:
        raise InputValidationError("statistic_Sn requires a nonempty list of summaries")
    return float(np.sum([s.kappa for s in summaries]))


def kappas(summaries: Sequence[GroupSummary]) -> np.ndarray:
    """Ratios of all summaries as a float array."""
    if len(summaries) == 0:
        raise InputValidationError("expected a nonempty list of summaries")
    return np.fromiter((s.kappa for s in summaries), dtype=float, count=len(summaries))


def thetas(summaries: Sequence[GroupSummary]) -> np.ndarray:
    """Directions of all summaries stacked into an (n, d) array."""
    if len(summaries) == 0:
        raise InputValidationError("expected a nonempty list of summaries")
    return np.stack([np.asarray(s.theta, dtype=float) for s in summaries])


# ---------------------------------------------------------------------------
# CSV serialization


def summaries_to_csv(summaries: Sequence[GroupSummary], path_or_file) -> None:
    """Write summaries as CSV with header group_index,m1,m2,kappa,theta_0..theta_{d-1}."""
    if len(summaries) == 0:
        raise InputValidationError("cannot serialize an empty summary list")
    d = np.asarray(summaries[0].theta).size
    header = ["group_index", "m1", "m2", "kappa"] + [f"theta_{j}" for j in range(d)]

    def _write(fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for s in summaries:
            theta = np.asarray(s.theta, dtype=float)
            writer.writerow(
                [s.group_index, repr(s.m1), repr(s.m2), repr(s.kappa)]
                + [repr(float(v)) for v in theta]
            )

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)
    else:
        _write(path_or_file)


def summaries_from_csv(path_or_file) -> list[GroupSummary]:
    """Read summaries written by `summaries_to_csv`.

    The within-group argmax offset is not part of the CSV format and is
    None on the returned summaries.
    """

    def _read(fh) -> list[GroupSummary]:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputValidationError("summary CSV is empty") from None
        expected_prefix = ["group_index", "m1", "m2", "kappa"]
        if header[:4] != expected_prefix or len(header) < 5:
            raise InputValidationError(
                f"summary CSV header must start with {expected_prefix} followed by theta columns, "
                f"got {header}"
            )
        d = len(header) - 4
        out: list[GroupSummary] = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != 4 + d:
                raise InputValidationError(
                    f"summary CSV line {line_no}: expected {4 + d} fields, got {len(row)}"
                )
            try:
                theta = np.array([float(v) for v in row[4:]], dtype=float)
                out.append(
                    GroupSummary(
                        group_index=int(row[0]),
                        m1=float(row[1]),
                        m2=float(row[2]),
                        kappa=float(row[3]),
                        theta=theta,
                        argmax_offset=None,
                    )
                )
            except ValueError as exc:
                raise InputValidationError(f"summary CSV line {line_no}: {exc}") from exc
        if not out:
            raise InputValidationError("summary CSV contains no data rows")
        return out

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "r", newline="") as fh:
            return _read(fh)
    return _read(path_or_file)

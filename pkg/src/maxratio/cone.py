"""Normed cones: elements, norms, polar decomposition, and sphere subsets.

Supported cones are R^d with the Euclidean, l_p, or sup norm, and the
scalar max-cone (R_+, max) whose unit sphere is the single point {1}.
Every observation x with positive finite norm decomposes as
x = norm(x) * direction(x) with direction(x) on the unit sphere.

Measurable subsets of the unit sphere are described by a small algebra
of set shapes (caps, coordinate boxes, finite unions, complements, and
the whole sphere) used to evaluate the empirical spectral measure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .exceptions import (
    DegenerateElementError,
    DimensionMismatchError,
    InputValidationError,
)

EUCLIDEAN_RD = "euclidean_rd"
LP_RD = "lp_rd"
SUP_RD = "sup_rd"
MAX_CONE_RPLUS = "max_cone_rplus"

CONE_KINDS = (EUCLIDEAN_RD, LP_RD, SUP_RD, MAX_CONE_RPLUS)

#: Tolerance for unit-norm checks on user-supplied sphere points.
UNIT_NORM_INPUT_TOL = 1e-9

#: Tolerance for unit-norm checks on directions produced by this module.
UNIT_NORM_OUTPUT_TOL = 1e-12


@dataclass(frozen=True)
class ConeSpec:
    """Identifies one of the supported normed cones.

    Parameters
    ----------
    kind : str
        One of ``euclidean_rd``, ``lp_rd``, ``sup_rd``, ``max_cone_rplus``.
    dimension : int
        Ambient dimension d (must be 1 for the max-cone).
    p : float, optional
        Exponent for ``lp_rd`` (p >= 1); must be omitted otherwise.
    """

    kind: str
    dimension: int
    p: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in CONE_KINDS:
            raise InputValidationError(
                f"unknown cone kind {self.kind!r}; expected one of {CONE_KINDS}"
            )
        if not isinstance(self.dimension, (int, np.integer)) or self.dimension < 1:
            raise InputValidationError(
                f"dimension must be a positive integer, got {self.dimension!r}"
            )
        object.__setattr__(self, "dimension", int(self.dimension))
        if self.kind == MAX_CONE_RPLUS and self.dimension != 1:
            raise InputValidationError("max_cone_rplus requires dimension = 1")
        if self.kind == LP_RD:
            if self.p is None or not math.isfinite(self.p) or self.p < 1:
                raise InputValidationError(
                    f"lp_rd requires a finite exponent p >= 1, got {self.p!r}"
                )
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise InputValidationError(f"p is only meaningful for lp_rd, got kind {self.kind!r}")

    def to_json(self) -> dict:
        obj: dict = {"kind": self.kind, "dimension": self.dimension}
        if self.p is not None:
            obj["p"] = self.p
        return obj

    @staticmethod
    def from_json(obj: dict) -> "ConeSpec":
        if not isinstance(obj, dict):
            raise InputValidationError(f"cone spec must be a JSON object, got {type(obj).__name__}")
        unknown = set(obj) - {"kind", "dimension", "p"}
        if unknown:
            raise InputValidationError(f"unknown cone spec fields: {sorted(unknown)}")
        try:
            return ConeSpec(obj["kind"], obj["dimension"], obj.get("p"))
        except KeyError as exc:
            raise InputValidationError(f"cone spec missing field {exc.args[0]!r}") from exc


def _as_element(spec: ConeSpec, x) -> np.ndarray:
    """Coerce x to a float vector of the cone's dimension."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape != (spec.dimension,):
        raise DimensionMismatchError(
            f"element has shape {arr.shape}, expected ({spec.dimension},) for {spec.kind}"
        )
    return arr


def norm(spec: ConeSpec, x) -> float:
    """Norm of a single cone element.

    Euclidean/l_p/sup norm on R^d; the scalar value itself on the
    max-cone. Raises for non-finite coordinates, and for negative
    values on the max-cone.
    """
    arr = _as_element(spec, x)
    if not np.all(np.isfinite(arr)):
        raise InputValidationError(f"element has non-finite coordinates: {arr!r}")
    if spec.kind == MAX_CONE_RPLUS and arr[0] < 0:
        raise InputValidationError(f"max-cone elements must be nonnegative, got {arr[0]}")
    return float(_norms_unchecked(spec, arr[None, :])[0])


def norms(spec: ConeSpec, X) -> np.ndarray:
    """Vectorized norms of a (k, d) array of elements.

    Coordinates are assumed finite; `Dataset` validates them once at
    ingestion so this hot path does not re-scan.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != spec.dimension:
        raise DimensionMismatchError(
            f"expected array of shape (k, {spec.dimension}), got {arr.shape}"
        )
    return _norms_unchecked(spec, arr)


def _norms_unchecked(spec: ConeSpec, arr: np.ndarray) -> np.ndarray:
    if spec.kind == EUCLIDEAN_RD:
        return np.sqrt(np.einsum("ij,ij->i", arr, arr))
    if spec.kind == SUP_RD:
        return np.max(np.abs(arr), axis=1)
    if spec.kind == LP_RD:
        return np.power(np.sum(np.power(np.abs(arr), spec.p), axis=1), 1.0 / spec.p)
    # max_cone_rplus: the norm of a scalar is the scalar.
    return arr[:, 0].copy()


def direction(spec: ConeSpec, x) -> np.ndarray:
    """Polar direction x / norm(x) on the unit sphere.

    Raises DegenerateElementError for the origin, which has no direction.
    """
    r = norm(spec, x)
    if r == 0.0:
        raise DegenerateElementError("the origin has no direction")
    return _as_element(spec, x) / r


# ---------------------------------------------------------------------------
# Sphere subsets


@dataclass(frozen=True)
class WholeSphere:
    """The entire unit sphere."""

    def to_json(self) -> dict:
        return {"variant": "whole_sphere"}


@dataclass(frozen=True)
class Cap:
    """Angular cap: points within `angular_radius` (radians) of `center`.

    The angle is the Euclidean angle for every R^d cone; caps are query
    geometry, not part of the estimator, so this keeps membership exact
    and cheap even under non-Euclidean norms. The center must be a unit
    vector of the cone's norm; that is checked when the cap is evaluated
    against a concrete cone.
    """

    center: tuple
    angular_radius: float

    def __post_init__(self) -> None:
        c = np.asarray(self.center, dtype=float)
        if c.ndim != 1 or c.size < 1 or not np.all(np.isfinite(c)):
            raise InputValidationError("cap center must be a finite vector")
        object.__setattr__(self, "center", tuple(float(v) for v in c))
        r = float(self.angular_radius)
        if not (0.0 < r <= math.pi):
            raise InputValidationError(
                f"angular_radius must lie in (0, pi], got {self.angular_radius!r}"
            )
        object.__setattr__(self, "angular_radius", r)

    def to_json(self) -> dict:
        return {
            "variant": "cap",
            "center": list(self.center),
            "angular_radius": self.angular_radius,
        }


@dataclass(frozen=True)
class Box:
    """Per-coordinate direction bounds: lo_j <= u_j <= hi_j for every j."""

    bounds: tuple

    def __post_init__(self) -> None:
        b = np.asarray(self.bounds, dtype=float)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < 1:
            raise InputValidationError("box bounds must be a sequence of (lo, hi) pairs")
        if not np.all(np.isfinite(b)):
            raise InputValidationError("box bounds must be finite")
        if np.any(b[:, 0] > b[:, 1]):
            raise InputValidationError("box bounds must satisfy lo <= hi")
        object.__setattr__(
            self, "bounds", tuple((float(lo), float(hi)) for lo, hi in b)
        )

    def to_json(self) -> dict:
        return {"variant": "box", "bounds": [list(pair) for pair in self.bounds]}


@dataclass(frozen=True)
class FiniteUnion:
    """Union of finitely many sphere sets."""

    members: tuple

    def __post_init__(self) -> None:
        members = tuple(self.members)
        if not members:
            raise InputValidationError("finite_union requires at least one member")
        for s in members:
            if not isinstance(s, SPHERE_SET_TYPES):
                raise InputValidationError(f"finite_union member is not a sphere set: {s!r}")
        object.__setattr__(self, "members", members)

    def to_json(self) -> dict:
        return {"variant": "finite_union", "members": [s.to_json() for s in self.members]}


@dataclass(frozen=True)
class Complement:
    """Complement of a sphere set within the unit sphere."""

    inner: "SphereSet"

    def __post_init__(self) -> None:
        if not isinstance(self.inner, SPHERE_SET_TYPES):
            raise InputValidationError(f"complement inner is not a sphere set: {self.inner!r}")

    def to_json(self) -> dict:
        return {"variant": "complement", "inner": self.inner.to_json()}


SphereSet = Union[WholeSphere, Cap, Box, FiniteUnion, Complement]
SPHERE_SET_TYPES = (WholeSphere, Cap, Box, FiniteUnion, Complement)


def sphere_set_from_json(obj: dict) -> SphereSet:
    """Parse the tagged-union JSON encoding of a sphere set."""
    if not isinstance(obj, dict) or "variant" not in obj:
        raise InputValidationError("sphere set JSON must be an object with a 'variant' field")
    variant = obj["variant"]
    try:
        if variant == "whole_sphere":
            return WholeSphere()
        if variant == "cap":
            return Cap(tuple(obj["center"]), obj["angular_radius"])
        if variant == "box":
            return Box(tuple(tuple(pair) for pair in obj["bounds"]))
        if variant == "finite_union":
            return FiniteUnion(tuple(sphere_set_from_json(s) for s in obj["members"]))
        if variant == "complement":
            return Complement(sphere_set_from_json(obj["inner"]))
    except KeyError as exc:
        raise InputValidationError(
            f"sphere set variant {variant!r} missing field {exc.args[0]!r}"
        ) from exc
    raise InputValidationError(f"unknown sphere set variant {variant!r}")


def sphere_set_to_json(sset: SphereSet) -> dict:
    return sset.to_json()


def validate_sphere_set(spec: ConeSpec, sset: SphereSet) -> None:
    """Check that a sphere set is well-formed for the cone's dimension.

    Cap centers must be unit vectors of the cone's norm; box bounds must
    have exactly one (lo, hi) pair per coordinate.
    """
    if isinstance(sset, Cap):
        center = np.asarray(sset.center, dtype=float)
        if center.shape != (spec.dimension,):
            raise DimensionMismatchError(
                f"cap center has dimension {center.size}, cone has {spec.dimension}"
            )
        r = float(_norms_unchecked(spec, center[None, :])[0])
        if abs(r - 1.0) > UNIT_NORM_INPUT_TOL:
            raise InputValidationError(
                f"cap center must have unit norm under the cone's norm (got {r!r})"
            )
    elif isinstance(sset, Box):
        if len(sset.bounds) != spec.dimension:
            raise DimensionMismatchError(
                f"box has {len(sset.bounds)} bounds, cone has dimension {spec.dimension}"
            )
    elif isinstance(sset, FiniteUnion):
        for member in sset.members:
            validate_sphere_set(spec, member)
    elif isinstance(sset, Complement):
        validate_sphere_set(spec, sset.inner)
    elif isinstance(sset, WholeSphere):
        pass
    else:
        raise InputValidationError(f"not a sphere set: {sset!r}")


def contains_many(spec: ConeSpec, sset: SphereSet, U) -> np.ndarray:
    """Vectorized membership of unit-sphere points U (shape (k, d)).

    Points are assumed to be unit vectors already (as produced by the
    grouping stage); use `sphere_contains` for validated scalar queries.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[1] != spec.dimension:
        raise DimensionMismatchError(
            f"expected points of shape (k, {spec.dimension}), got {U.shape}"
        )
    if isinstance(sset, WholeSphere):
        return np.ones(U.shape[0], dtype=bool)
    if isinstance(sset, Cap):
        validate_sphere_set(spec, sset)
        return cap_angles(sset, U) <= sset.angular_radius
    if isinstance(sset, Box):
        validate_sphere_set(spec, sset)
        b = np.asarray(sset.bounds, dtype=float)
        return np.all((U >= b[:, 0]) & (U <= b[:, 1]), axis=1)
    if isinstance(sset, FiniteUnion):
        out = np.zeros(U.shape[0], dtype=bool)
        for member in sset.members:
            out |= contains_many(spec, member, U)
        return out
    if isinstance(sset, Complement):
        return ~contains_many(spec, sset.inner, U)
    raise InputValidationError(f"not a sphere set: {sset!r}")


def cap_angles(cap: Cap, U: np.ndarray) -> np.ndarray:
    """Euclidean angles between each row of U and the cap center."""
    c = np.asarray(cap.center, dtype=float)
    c_len = float(np.sqrt(c @ c))
    u_len = np.sqrt(np.einsum("ij,ij->i", U, U))
    cosine = (U @ c) / (u_len * c_len)
    return np.arccos(np.clip(cosine, -1.0, 1.0))


def sphere_contains(spec: ConeSpec, sset: SphereSet, u) -> bool:
    """Whether the unit-sphere point u belongs to the set.

    The input must have unit norm within 1e-9 under the cone's norm.
    """
    arr = _as_element(spec, u)
    if not np.all(np.isfinite(arr)):
        raise InputValidationError(f"sphere point has non-finite coordinates: {arr!r}")
    r = float(_norms_unchecked(spec, arr[None, :])[0])
    if abs(r - 1.0) > UNIT_NORM_INPUT_TOL:
        raise InputValidationError(
            f"sphere point must have unit norm within {UNIT_NORM_INPUT_TOL} (got {r!r})"
        )
    return bool(contains_many(spec, sset, arr[None, :])[0])


# ---------------------------------------------------------------------------
# Datasets


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of cone elements with the cone they live on.

    Coordinates are validated once at construction: non-finite values and
    zero elements (the origin, which has no direction) are rejected with
    row numbers. Norms are computed here and cached because every
    downstream stage needs them.
    """

    cone: ConeSpec
    coords: np.ndarray
    norms: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        arr = np.array(self.coords, dtype=float, copy=True, ndmin=2)
        if arr.ndim != 2:
            raise InputValidationError(f"dataset coordinates must be 2-dimensional, got {arr.ndim}")
        if arr.shape[1] != self.cone.dimension:
            raise DimensionMismatchError(
                f"dataset has {arr.shape[1]} columns, cone has dimension {self.cone.dimension}"
            )
        if arr.shape[0] < 1:
            raise InputValidationError("dataset must contain at least one observation")
        bad = ~np.all(np.isfinite(arr), axis=1)
        if np.any(bad):
            rows = np.flatnonzero(bad)[:10]
            raise InputValidationError(
                f"non-finite coordinate (NaN or infinity) at data row(s) {rows.tolist()}"
            )
        if self.cone.kind == MAX_CONE_RPLUS and np.any(arr[:, 0] < 0):
            rows = np.flatnonzero(arr[:, 0] < 0)[:10]
            raise InputValidationError(
                f"max-cone elements must be nonnegative; negative value at row(s) {rows.tolist()}"
            )
        r = _norms_unchecked(self.cone, arr)
        zero = r == 0.0
        if np.any(zero):
            rows = np.flatnonzero(zero)[:10]
            raise InputValidationError(
                f"zero element (the origin) at data row(s) {rows.tolist()}; "
                "the origin has no direction and cannot enter the estimator"
            )
        arr.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "coords", arr)
        object.__setattr__(self, "norms", r)

    def __len__(self) -> int:
        return int(self.coords.shape[0])

    @property
    def dimension(self) -> int:
        return self.cone.dimension

    def scaled(self, c: float) -> "Dataset":
        """Dataset with every observation multiplied by c > 0."""
        if not (c > 0 and math.isfinite(c)):
            raise InputValidationError(f"scale factor must be positive and finite, got {c!r}")
        return Dataset(self.cone, self.coords * c)


def cone_spec_to_json_str(spec: ConeSpec) -> str:
    return json.dumps(spec.to_json())

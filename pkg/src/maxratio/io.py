"""File formats: numeric CSV datasets, JSON specs, and content digests.

Datasets are plain CSV with one observation per row and d numeric
columns, '.' decimal separator, and no header by default. Readers
reject NaN and infinite coordinates with row-numbered errors, because a
silent NaN would corrupt the order statistics downstream.
"""

from __future__ import annotations

import hashlib
import json
from typing import Optional

import numpy as np

from .cone import ConeSpec, Dataset, SphereSet, sphere_set_from_json
from .exceptions import DimensionMismatchError, InputValidationError, LawValidationError
from .synth import DirectionLaw, RadialLaw, validate_direction_law

#: Version stamp carried by every JSON document this package emits.
SCHEMA_VERSION = 1


def write_dataset_csv(path, dataset: Dataset, header: bool = False) -> None:
    """Write one observation per row with full float64 round-trip precision."""
    head = ""
    if header:
        head = ",".join(f"x_{j}" for j in range(dataset.dimension))
    np.savetxt(path, dataset.coords, fmt="%.17g", delimiter=",", header=head, comments="")


def read_dataset_csv(path, spec: ConeSpec) -> Dataset:
    """Read a numeric CSV into a dataset on the given cone.

    A single leading non-numeric row is treated as a header and
    skipped. Any other non-numeric token, any NaN or infinity, and any
    zero row is rejected with the offending row number (1-based, as in
    the file).
    """
    with open(path, "r", newline="") as fh:
        first = fh.readline()
        if first == "":
            raise InputValidationError(f"{path}: file is empty")
        skip = 0
        try:
            _parse_csv_row(first)
        except ValueError:
            skip = 1
        fh.seek(0)
        try:
            data = np.loadtxt(fh, delimiter=",", skiprows=skip, ndmin=2, dtype=float)
        except ValueError as exc:
            raise InputValidationError(f"{path}: {exc}") from exc
    if data.size == 0:
        raise InputValidationError(f"{path}: no data rows")
    if data.shape[1] != spec.dimension:
        raise DimensionMismatchError(
            f"{path}: {data.shape[1]} columns but the cone has dimension {spec.dimension}"
        )
    offset = 1 + skip  # first data row's 1-based line number
    bad = ~np.all(np.isfinite(data), axis=1)
    if np.any(bad):
        rows = (np.flatnonzero(bad) + offset)[:10]
        raise InputValidationError(
            f"{path}: non-finite coordinate (NaN or infinity) at row(s) {rows.tolist()}"
        )
    try:
        return Dataset(spec, data)
    except InputValidationError as exc:
        raise InputValidationError(f"{path}: {exc}") from exc


def _parse_csv_row(line: str) -> list[float]:
    return [float(tok) for tok in line.strip().split(",")]


def file_digest(path) -> str:
    """sha256 content digest of a file, prefixed with the algorithm name."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return f"sha256:{h.hexdigest()}"


def load_json(path) -> dict:
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputValidationError(f"{path}: invalid JSON ({exc})") from exc


def read_model_spec(path) -> tuple[ConeSpec, RadialLaw, Optional[DirectionLaw]]:
    """Read a sampling model: cone, radial law, and optional direction law.

    The direction law may be omitted only for the scalar max-cone,
    whose unit sphere is a single point.
    """
    obj = load_json(path)
    if not isinstance(obj, dict):
        raise InputValidationError(f"{path}: model spec must be a JSON object")
    try:
        spec = ConeSpec.from_json(obj["cone"])
        radial = RadialLaw.from_json(obj["radial"])
    except KeyError as exc:
        raise InputValidationError(f"{path}: model spec missing field {exc.args[0]!r}") from exc
    direction = None
    if "direction" in obj and obj["direction"] is not None:
        direction = DirectionLaw.from_json(obj["direction"])
        validate_direction_law(direction, spec)
    if direction is None and spec.kind != "max_cone_rplus":
        raise LawValidationError(
            f"{path}: a direction law is required for cone kind {spec.kind!r}"
        )
    return spec, radial, direction


def read_query_sets(path) -> list[SphereSet]:
    """Read sphere sets from JSON: either one set object or {"sets": [...]}."""
    obj = load_json(path)
    if isinstance(obj, dict) and "sets" in obj:
        raw = obj["sets"]
        if not isinstance(raw, list) or not raw:
            raise InputValidationError(f"{path}: 'sets' must be a nonempty list")
        return [sphere_set_from_json(s) for s in raw]
    if isinstance(obj, dict) and "variant" in obj:
        return [sphere_set_from_json(obj)]
    raise InputValidationError(
        f"{path}: expected a sphere set object or an object with a 'sets' list"
    )

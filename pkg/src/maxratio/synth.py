"""Seeded generators for heavy-tailed laws with known tail index and
spectral measure.

Observations are built as X = R * Theta with the radius R and the unit
direction Theta sampled independently (product measure). This realizes
any prescribed pair (alpha, sigma) exactly: the norm survival function
is exactly the radial law's G, and the direction of the group maximum
is an exact draw from sigma. Radial laws are either exact Pareto
(survival x^(-alpha)) or two-term laws G(x) = c1*x^(-alpha) + c2*x^(-beta)
whose second term produces a known finite-group bias; the special case
beta = 2*alpha (the behaviour of stable-like data) has a closed-form
inverse CDF.

All sampling is driven by the counter-based Philox generator seeded
through numpy's SeedSequence, so every dataset is a pure function of
its integer seed, and per-replicate child seeds derived with
`derived_seed(seed, index)` give independent streams that do not depend
on scheduling or thread count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from . import cone as _cone
from .cone import MAX_CONE_RPLUS, ConeSpec, Dataset
from .exceptions import (
    DimensionMismatchError,
    InputValidationError,
    LawValidationError,
    NumericError,
)

PARETO = "pareto"
SECOND_ORDER = "second_order"
FRISTEDT_TOY = "fristedt_toy"

_WEIGHT_TOL = 1e-12


def _rng_from_seed(seed: int) -> np.random.Generator:
    """Philox generator for a 64-bit (or larger) integer seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def derived_seed(seed: int, index: int) -> int:
    """Deterministic 128-bit child seed for replicate `index`.

    Children for distinct indices are statistically independent streams;
    the derivation uses SeedSequence spawn keys, so it is stable across
    platforms and numpy versions.
    """
    if index < 0:
        raise InputValidationError(f"replicate index must be >= 0, got {index}")
    state = np.random.SeedSequence(entropy=seed, spawn_key=(index,)).generate_state(4, np.uint32)
    out = 0
    for word in state:
        out = (out << 32) | int(word)
    return out


@dataclass(frozen=True)
class RadialLaw:
    """Survival function of the radius, supported on [1, infinity).

    Variants
    --------
    pareto(alpha):
        G(x) = x^(-alpha), exact; the second-order term is zero.
    second_order(alpha, c1, c2, beta):
        G(x) = c1*x^(-alpha) + c2*x^(-beta) with c1 > 0, beta > alpha,
        c1 + c2 = 1 (so G(1) = 1) and alpha*c1 + beta*c2 > 0 (so G is
        strictly decreasing on [1, infinity)).
    fristedt_toy(alpha):
        The second-order law with beta = 2*alpha and c1 = c2 = 1/2.
    """

    variant: str
    alpha: float
    c1: float = 1.0
    c2: float = 0.0
    beta: float = math.inf
    support_min: float = 1.0

    def __post_init__(self) -> None:
        if self.variant not in (PARETO, SECOND_ORDER, FRISTEDT_TOY):
            raise LawValidationError(f"unknown radial law variant {self.variant!r}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise LawValidationError(f"alpha must be positive and finite, got {self.alpha!r}")
        if self.support_min != 1.0:
            raise LawValidationError(
                "the radial parameterization fixes support_min = 1 (G(1) = 1); "
                f"got {self.support_min!r}"
            )
        if self.variant == PARETO:
            if self.c1 != 1.0 or self.c2 != 0.0 or not math.isinf(self.beta):
                raise LawValidationError("pareto laws fix c1 = 1, c2 = 0, beta = inf")
            return
        if not math.isfinite(self.beta) or not self.beta > self.alpha:
            raise LawValidationError(
                f"beta must be finite and exceed alpha, got beta = {self.beta!r}, "
                f"alpha = {self.alpha!r}"
            )
        if not (self.c1 > 0 and math.isfinite(self.c1)) or not math.isfinite(self.c2):
            raise LawValidationError(f"invalid coefficients c1 = {self.c1!r}, c2 = {self.c2!r}")
        if abs(self.c1 + self.c2 - 1.0) > _WEIGHT_TOL:
            raise LawValidationError(
                f"c1 + c2 must equal 1 so that G(1) = 1, got {self.c1 + self.c2!r}"
            )
        if not self.alpha * self.c1 + self.beta * self.c2 > 0:
            raise LawValidationError(
                "alpha*c1 + beta*c2 must be positive for G to be decreasing, got "
                f"{self.alpha * self.c1 + self.beta * self.c2!r}"
            )
        if self.variant == FRISTEDT_TOY and self.beta != 2.0 * self.alpha:
            raise LawValidationError("fristedt_toy fixes beta = 2*alpha")

    @classmethod
    def pareto(cls, alpha: float) -> "RadialLaw":
        return cls(variant=PARETO, alpha=float(alpha))

    @classmethod
    def second_order(cls, alpha: float, c1: float, c2: float, beta: float) -> "RadialLaw":
        return cls(
            variant=SECOND_ORDER,
            alpha=float(alpha),
            c1=float(c1),
            c2=float(c2),
            beta=float(beta),
        )

    @classmethod
    def fristedt_toy(cls, alpha: float) -> "RadialLaw":
        alpha = float(alpha)
        return cls(variant=FRISTEDT_TOY, alpha=alpha, c1=0.5, c2=0.5, beta=2.0 * alpha)

    def to_json(self) -> dict:
        if self.variant == PARETO:
            return {"variant": PARETO, "alpha": self.alpha}
        if self.variant == FRISTEDT_TOY:
            return {"variant": FRISTEDT_TOY, "alpha": self.alpha}
        return {
            "variant": SECOND_ORDER,
            "c1": self.c1,
            "alpha": self.alpha,
            "c2": self.c2,
            "beta": self.beta,
        }

    @staticmethod
    def from_json(obj: dict) -> "RadialLaw":
        if not isinstance(obj, dict) or "variant" not in obj:
            raise LawValidationError("radial law JSON must be an object with a 'variant' field")
        variant = obj["variant"]
        try:
            if variant == PARETO:
                return RadialLaw.pareto(obj["alpha"])
            if variant == FRISTEDT_TOY:
                return RadialLaw.fristedt_toy(obj["alpha"])
            if variant == SECOND_ORDER:
                return RadialLaw.second_order(obj["alpha"], obj["c1"], obj["c2"], obj["beta"])
        except KeyError as exc:
            raise LawValidationError(
                f"radial law variant {variant!r} missing field {exc.args[0]!r}"
            ) from exc
        raise LawValidationError(f"unknown radial law variant {variant!r}")


def survival(law: RadialLaw, x) -> np.ndarray | float:
    """G(x) = P(R > x); equal to 1 below the support minimum."""
    arr = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        g = law.c1 * arr ** (-law.alpha)
        if law.c2 != 0.0:
            g = g + law.c2 * arr ** (-law.beta)
    out = np.where(arr < law.support_min, 1.0, g)
    if np.ndim(x) == 0:
        return float(out)
    return out


def radial_inverse_cdf(law: RadialLaw, u) -> np.ndarray | float:
    """Quantile of the radius: the x >= 1 with G(x) = u, for u in (0, 1).

    Pareto and beta = 2*alpha laws are inverted in closed form; other
    two-term laws fall back to bracketed scalar root-finding (one solve
    per element, absolute x-tolerance 1e-12, at most 200 iterations).
    """
    arr = np.asarray(u, dtype=float)
    if arr.size and (np.any(arr <= 0.0) | np.any(arr >= 1.0) | ~np.all(np.isfinite(arr))):
        raise InputValidationError("quantile levels must lie strictly inside (0, 1)")
    if law.variant == PARETO:
        out = arr ** (-1.0 / law.alpha)
    elif law.beta == 2.0 * law.alpha:
        # G(x) = c1*y + c2*y^2 with y = x^(-alpha): a quadratic in y.
        # The root continuous in c2 (and stable for either sign) is
        # y = 2u / (c1 + sqrt(c1^2 + 4*c2*u)).
        disc = law.c1 * law.c1 + 4.0 * law.c2 * arr
        y = 2.0 * arr / (law.c1 + np.sqrt(disc))
        out = y ** (-1.0 / law.alpha)
    else:
        out = _invert_by_bracketing(law, arr)
    if np.ndim(u) == 0:
        return float(out)
    return out


def _invert_by_bracketing(law: RadialLaw, u: np.ndarray) -> np.ndarray:
    flat = np.atleast_1d(u).ravel()
    # G(x) <= max(c1, 1) * x^(-alpha) on [1, inf), so this upper end is
    # guaranteed to bracket the root.
    hi = 2.0 * (max(law.c1, 1.0) / flat) ** (1.0 / law.alpha)
    out = np.empty_like(flat)
    for i, (ui, hi_i) in enumerate(zip(flat, hi)):
        try:
            root, res = optimize.brentq(
                lambda x: survival(law, x) - ui,
                1.0,
                hi_i,
                xtol=1e-12,
                rtol=4 * np.finfo(float).eps,
                maxiter=200,
                full_output=True,
            )
        except (ValueError, RuntimeError) as exc:
            raise NumericError(f"bracketed inversion failed at u = {ui}: {exc}") from exc
        if not res.converged:
            raise NumericError(f"bracketed inversion did not converge at u = {ui}")
        out[i] = root
    return out.reshape(np.shape(u))


# ---------------------------------------------------------------------------
# Direction laws


@dataclass(frozen=True, eq=False)
class DirectionLaw:
    """Distribution of the unit direction Theta (the spectral measure).

    Variants: discrete atoms with weights, the uniform law on the unit
    sphere, or a finite mixture of direction laws. For non-Euclidean
    cones "uniform" means a standard Gaussian vector normalized by the
    cone's norm (exactly uniform only for the Euclidean cone).
    """

    variant: str
    atoms: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    dim: Optional[int] = None
    components: Optional[tuple] = None

    def __eq__(self, other: object) -> bool:
        # array fields defeat the generated dataclass comparison
        if not isinstance(other, DirectionLaw):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(json.dumps(self.to_json(), sort_keys=True))

    def __post_init__(self) -> None:
        if self.variant == "discrete":
            atoms = np.array(self.atoms, dtype=float, copy=True, ndmin=2)
            weights = np.array(self.weights, dtype=float, copy=True).ravel()
            if atoms.ndim != 2 or atoms.shape[0] < 1:
                raise LawValidationError("discrete law needs a (k, d) array of atoms")
            if weights.shape != (atoms.shape[0],):
                raise LawValidationError(
                    f"got {atoms.shape[0]} atoms but {weights.size} weights"
                )
            if not np.all(np.isfinite(atoms)):
                raise LawValidationError("atoms must be finite")
            _check_weights(weights)
            atoms.setflags(write=False)
            weights.setflags(write=False)
            object.__setattr__(self, "atoms", atoms)
            object.__setattr__(self, "weights", weights)
        elif self.variant == "uniform_sphere":
            if self.dim is None or int(self.dim) < 1:
                raise LawValidationError("uniform_sphere needs a positive dimension")
            object.__setattr__(self, "dim", int(self.dim))
        elif self.variant == "mixture":
            comps = tuple(self.components or ())
            weights = np.array(self.weights, dtype=float, copy=True).ravel()
            if len(comps) < 1:
                raise LawValidationError("mixture needs at least one component")
            if weights.shape != (len(comps),):
                raise LawValidationError(
                    f"got {len(comps)} components but {weights.size} weights"
                )
            for c in comps:
                if not isinstance(c, DirectionLaw):
                    raise LawValidationError(f"mixture component is not a DirectionLaw: {c!r}")
            dims = {c.dimension for c in comps}
            if len(dims) != 1:
                raise LawValidationError(f"mixture components disagree on dimension: {dims}")
            _check_weights(weights)
            weights.setflags(write=False)
            object.__setattr__(self, "components", comps)
            object.__setattr__(self, "weights", weights)
        else:
            raise LawValidationError(f"unknown direction law variant {self.variant!r}")

    @classmethod
    def discrete(cls, atoms, weights) -> "DirectionLaw":
        return cls(variant="discrete", atoms=atoms, weights=weights)

    @classmethod
    def uniform_sphere(cls, dim: int) -> "DirectionLaw":
        return cls(variant="uniform_sphere", dim=dim)

    @classmethod
    def mixture(cls, components: Sequence["DirectionLaw"], weights) -> "DirectionLaw":
        return cls(variant="mixture", components=tuple(components), weights=weights)

    @property
    def dimension(self) -> int:
        if self.variant == "discrete":
            return int(self.atoms.shape[1])
        if self.variant == "uniform_sphere":
            return int(self.dim)
        return self.components[0].dimension

    def to_json(self) -> dict:
        if self.variant == "discrete":
            return {
                "variant": "discrete",
                "atoms": self.atoms.tolist(),
                "weights": self.weights.tolist(),
            }
        if self.variant == "uniform_sphere":
            return {"variant": "uniform_sphere", "dimension": self.dimension}
        return {
            "variant": "mixture",
            "components": [c.to_json() for c in self.components],
            "weights": self.weights.tolist(),
        }

    @staticmethod
    def from_json(obj: dict) -> "DirectionLaw":
        if not isinstance(obj, dict) or "variant" not in obj:
            raise LawValidationError("direction law JSON must be an object with a 'variant' field")
        variant = obj["variant"]
        try:
            if variant == "discrete":
                return DirectionLaw.discrete(obj["atoms"], obj["weights"])
            if variant == "uniform_sphere":
                return DirectionLaw.uniform_sphere(obj["dimension"])
            if variant == "mixture":
                return DirectionLaw.mixture(
                    [DirectionLaw.from_json(c) for c in obj["components"]], obj["weights"]
                )
        except KeyError as exc:
            raise LawValidationError(
                f"direction law variant {variant!r} missing field {exc.args[0]!r}"
            ) from exc
        raise LawValidationError(f"unknown direction law variant {variant!r}")


def _check_weights(weights: np.ndarray) -> None:
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise LawValidationError(f"weights must be finite and nonnegative, got {weights!r}")
    total = float(np.sum(weights))
    if abs(total - 1.0) > _WEIGHT_TOL:
        raise LawValidationError(f"weights must sum to 1 within {_WEIGHT_TOL}, got {total!r}")


def validate_direction_law(law: DirectionLaw, spec: ConeSpec) -> None:
    """Check the law against a concrete cone (dimension and unit atoms)."""
    if law.dimension != spec.dimension:
        raise DimensionMismatchError(
            f"direction law has dimension {law.dimension}, cone has {spec.dimension}"
        )
    if law.variant == "discrete":
        r = _cone.norms(spec, law.atoms)
        off = np.abs(r - 1.0) > _cone.UNIT_NORM_INPUT_TOL
        if np.any(off):
            raise LawValidationError(
                f"direction atoms must have unit norm under the cone's norm; "
                f"atom(s) {np.flatnonzero(off).tolist()} have norms {r[off].tolist()}"
            )
    elif law.variant == "mixture":
        for c in law.components:
            validate_direction_law(c, spec)


def sample_directions(
    law: DirectionLaw, n_obs: int, rng: np.random.Generator, spec: ConeSpec
) -> np.ndarray:
    """Draw n_obs unit directions; deterministic given the generator state."""
    if law.variant == "discrete":
        idx = rng.choice(law.atoms.shape[0], size=n_obs, p=law.weights)
        return law.atoms[idx]
    if law.variant == "uniform_sphere":
        g = rng.standard_normal((n_obs, law.dimension))
        r = _cone.norms(spec, g)
        # A numerically zero Gaussian vector has probability ~0; resample
        # any such row from fresh draws to keep directions well-defined.
        while np.any(r == 0.0):
            bad = r == 0.0
            g[bad] = rng.standard_normal((int(np.count_nonzero(bad)), law.dimension))
            r = _cone.norms(spec, g)
        return g / r[:, None]
    # mixture
    idx = rng.choice(len(law.components), size=n_obs, p=law.weights)
    out = np.empty((n_obs, law.dimension), dtype=float)
    for j, comp in enumerate(law.components):
        mask = idx == j
        count = int(np.count_nonzero(mask))
        if count:
            out[mask] = sample_directions(comp, count, rng, spec)
    return out


# ---------------------------------------------------------------------------
# Samplers


def _uniform_open(rng: np.random.Generator, n_obs: int) -> np.ndarray:
    """Uniform draws pushed into the open interval (0, 1)."""
    u = rng.random(n_obs)
    return np.maximum(u, 2.0**-53)


def sample(
    n_obs: int,
    radial: RadialLaw,
    direction: DirectionLaw,
    spec: ConeSpec,
    seed: int,
) -> Dataset:
    """Sample n_obs observations X_i = R_i * Theta_i on the given cone.

    The radius stream is consumed before the direction stream, so the
    output is bit-reproducible for a fixed seed. The sampled law has
    tail index radial.alpha and spectral measure equal to the direction
    law, with norming sequence b_m = (c1 * m)^(1/alpha).
    """
    if n_obs < 1:
        raise InputValidationError(f"n_obs must be >= 1, got {n_obs}")
    if spec.kind == MAX_CONE_RPLUS:
        raise InputValidationError("use sample_max_cone for the scalar max-cone")
    validate_direction_law(direction, spec)
    rng = _rng_from_seed(seed)
    radii = radial_inverse_cdf(radial, _uniform_open(rng, n_obs))
    theta = sample_directions(direction, n_obs, rng, spec)
    return Dataset(spec, radii[:, None] * theta)


def sample_max_cone(n_obs: int, radial: RadialLaw, seed: int) -> Dataset:
    """Sample scalar observations on the max-cone (R_+, max).

    The unit sphere of the max-cone is the single point {1}, so every
    direction is 1 and the observation equals its radius.
    """
    if n_obs < 1:
        raise InputValidationError(f"n_obs must be >= 1, got {n_obs}")
    rng = _rng_from_seed(seed)
    radii = radial_inverse_cdf(radial, _uniform_open(rng, n_obs))
    spec = ConeSpec(MAX_CONE_RPLUS, 1)
    return Dataset(spec, radii[:, None])

"""Command line interface.

Subcommands: simulate | plan | estimate | spectral | mc-study | diagnose.
Every successful invocation prints exactly one JSON document to stdout;
logs and error documents go to stderr. Exit codes: 0 success, 2
validation failure, 3 insufficient data, 4 degenerate statistics, 5 I/O
failure, and 1 for partially failed Monte Carlo studies.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import math
import sys
from typing import Optional

import numpy as np

from . import io as _io
from . import spectral as _spectral
from . import synth as _synth
from .cone import MAX_CONE_RPLUS, Cap, ConeSpec, Complement, FiniteUnion, SphereSet, cap_angles
from .diagnostics import run_kappa_uniformity, run_order_stat_limit, run_studentized_normality
from .exceptions import (
    DegenerateStatisticError,
    DegenerateVarianceError,
    InputValidationError,
    InsufficientDataError,
    MaxratioError,
)
from .grouping import GroupingPlan, summarize
from .planner import (
    ALPHA_ESTIMATION,
    SPECTRAL_ESTIMATION,
    SecondOrderParams,
    plan_second_order,
    plan_simple,
)
from .synth import DirectionLaw, RadialLaw, derived_seed
from .tail_index import estimate_alpha

log = logging.getLogger("maxratio")

#: Distance (radians) at which an atom counts as sitting on a cap boundary.
_BOUNDARY_TOL = 1e-9


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for studies")
    parser.add_argument("--level", type=float, default=0.95, help="confidence level (default 0.95)")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def _plan_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("grouping plan (give one of the three forms)")
    group.add_argument("--n", type=int, default=None, help="explicit number of groups")
    group.add_argument("--m", type=int, default=None, help="explicit group size")
    group.add_argument("--r", type=float, default=None, help="simple plan: n = floor(N^r)")
    group.add_argument("--zeta", type=float, default=None, help="second-order rate ratio")
    group.add_argument("--beta", type=float, default=None, help="second-order decay exponent")
    group.add_argument(
        "--alpha-pilot", type=float, default=None, help="pilot tail index for deriving zeta"
    )
    group.add_argument(
        "--epsilon", type=float, default=None, help="exponent slack (default log(log N)/log N)"
    )
    group.add_argument(
        "--target",
        choices=[ALPHA_ESTIMATION, SPECTRAL_ESTIMATION],
        default=ALPHA_ESTIMATION,
        help="what the plan optimizes for",
    )


def _resolve_plan(args: argparse.Namespace, n_obs: int) -> GroupingPlan:
    forms = [
        args.n is not None or args.m is not None,
        args.r is not None,
        args.zeta is not None or args.beta is not None,
    ]
    if sum(forms) > 1:
        raise InputValidationError(
            "conflicting plan flags: give only one of --n/--m, --r, or --zeta/--beta"
        )
    if args.n is not None or args.m is not None:
        n = args.n if args.n is not None else n_obs // args.m
        m = args.m if args.m is not None else n_obs // args.n
        return GroupingPlan(n=int(n), m=int(m))
    if args.r is not None:
        return plan_simple(n_obs, args.r)
    if args.zeta is not None or args.beta is not None:
        pilot = args.alpha_pilot if args.alpha_pilot is not None else 1.0
        params = SecondOrderParams(
            alpha=pilot,
            beta=args.beta if args.beta is not None else math.inf,
            zeta=args.zeta,
            epsilon=args.epsilon,
            target=args.target,
        )
        return plan_second_order(n_obs, params)
    log.info("no plan flags given; defaulting to --r %.6f", 2.0 / 3.0)
    return plan_simple(n_obs, 2.0 / 3.0)


def _emit(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _collect_caps(sset: SphereSet) -> list[Cap]:
    if isinstance(sset, Cap):
        return [sset]
    if isinstance(sset, FiniteUnion):
        return [c for member in sset.members for c in _collect_caps(member)]
    if isinstance(sset, Complement):
        return _collect_caps(sset.inner)
    return []


def _boundary_warnings(sets, estimate: _spectral.SpectralEstimate) -> list[str]:
    warnings = []
    for sset in sets:
        for cap in _collect_caps(sset):
            angles = cap_angles(cap, estimate.atoms)
            near = int(np.count_nonzero(np.abs(angles - cap.angular_radius) <= _BOUNDARY_TOL))
            if near:
                warnings.append(
                    f"{near} atom(s) lie within {_BOUNDARY_TOL} of a cap boundary; the mass of "
                    "that set is unstable (choose caps whose boundaries avoid the atoms)"
                )
    return warnings


def _run_queries(
    estimate: _spectral.SpectralEstimate, sets, level: float
) -> tuple[list[dict], list[str]]:
    results = []
    warnings = _boundary_warnings(sets, estimate)
    for sset in sets:
        base = _spectral.measure_of(estimate, sset)
        try:
            ci = _spectral.spectral_ci(base.p_hat, estimate.n, level)
            doc = _spectral.SpectralQueryResult(
                set=sset, p_hat=base.p_hat, count=base.count, ci=ci, level=level
            ).to_json()
        except DegenerateVarianceError:
            doc = _spectral.SpectralQueryResult(
                set=sset, p_hat=base.p_hat, count=base.count, ci=None, level=level
            ).to_json()
            doc["degenerate"] = True
            warnings.append(
                f"query set has degenerate mass p_hat = {base.p_hat}: confidence interval undefined"
            )
        results.append(doc)
    return results, warnings


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec, radial, direction = _io.read_model_spec(args.law)
    if spec.kind == MAX_CONE_RPLUS:
        dataset = _synth.sample_max_cone(args.n_obs, radial, args.seed)
    else:
        dataset = _synth.sample(args.n_obs, radial, direction, spec, args.seed)
    _io.write_dataset_csv(args.out, dataset, header=args.header)
    log.info("wrote %d observations to %s", len(dataset), args.out)
    _emit(
        {
            "schema_version": _io.SCHEMA_VERSION,
            "command": "simulate",
            "n_obs": int(args.n_obs),
            "seed": int(args.seed),
            "out": args.out,
            "digest": _io.file_digest(args.out),
            "cone": spec.to_json(),
            "radial": radial.to_json(),
            "direction": None if direction is None else direction.to_json(),
        }
    )
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    plan = _resolve_plan(args, args.n_obs)
    _emit(
        {
            "schema_version": _io.SCHEMA_VERSION,
            "command": "plan",
            "n_obs": int(args.n_obs),
            "plan": plan.to_json(),
        }
    )
    return 0


def _load_and_group(args: argparse.Namespace):
    spec = ConeSpec.from_json(_io.load_json(args.cone))
    dataset = _io.read_dataset_csv(args.input, spec)
    if args.shuffle:
        rng = np.random.default_rng(args.seed)
        from .cone import Dataset as _Dataset

        dataset = _Dataset(spec, dataset.coords[rng.permutation(len(dataset))])
    plan = _resolve_plan(args, len(dataset))
    summaries, discarded = summarize(dataset, plan)
    return spec, dataset, plan, summaries, discarded


def _cmd_estimate(args: argparse.Namespace) -> int:
    spec, dataset, plan, summaries, discarded = _load_and_group(args)
    estimate = estimate_alpha(summaries, level=args.level)
    warnings: list[str] = []
    if estimate.ci[0] < 0:
        warnings.append("confidence interval lower bound is below zero (reported unclamped)")
    report = {
        "schema_version": _io.SCHEMA_VERSION,
        "command": "estimate",
        "input": args.input,
        "input_digest": _io.file_digest(args.input),
        "n_obs": len(dataset),
        "plan": plan.to_json(),
        "discarded": discarded,
        "seed": int(args.seed) if args.shuffle else None,
        "alpha": estimate.to_json(),
    }
    if args.query_set:
        sets = _io.read_query_sets(args.query_set)
        spectral_estimate = _spectral.estimate_spectral(summaries, spec)
        queries, query_warnings = _run_queries(spectral_estimate, sets, args.level)
        report["spectral_queries"] = queries
        warnings.extend(query_warnings)
    report["warnings"] = warnings
    for w in warnings:
        log.warning("%s", w)
    _emit(report)
    return 0


def _cmd_spectral(args: argparse.Namespace) -> int:
    spec, dataset, plan, summaries, discarded = _load_and_group(args)
    spectral_estimate = _spectral.estimate_spectral(summaries, spec)
    sets = _io.read_query_sets(args.query_set)
    queries, warnings = _run_queries(spectral_estimate, sets, args.level)
    report = {
        "schema_version": _io.SCHEMA_VERSION,
        "command": "spectral",
        "input": args.input,
        "input_digest": _io.file_digest(args.input),
        "n_obs": len(dataset),
        "plan": plan.to_json(),
        "discarded": discarded,
        "seed": int(args.seed) if args.shuffle else None,
        "n_atoms": spectral_estimate.n,
        "spectral_queries": queries,
        "warnings": warnings,
    }
    if args.atoms_out:
        _spectral.atoms_to_csv(spectral_estimate, args.atoms_out)
        report["atoms_out"] = args.atoms_out
    for w in warnings:
        log.warning("%s", w)
    _emit(report)
    return 0


# ---------------------------------------------------------------------------
# Monte Carlo studies


def _study_replicate(payload: dict) -> dict:
    """One replicate of a study; returns metrics or an error record.

    Top-level so process pools can pickle it. Everything needed is in
    the JSON-serializable payload, keeping replicas order-independent.
    """
    try:
        spec = ConeSpec.from_json(payload["cone"])
        radial = RadialLaw.from_json(payload["radial"])
        plan = GroupingPlan(payload["n"], payload["m"])
        if spec.kind == MAX_CONE_RPLUS:
            dataset = _synth.sample_max_cone(payload["n_obs"], radial, payload["seed"])
        else:
            direction = DirectionLaw.from_json(payload["direction"])
            dataset = _synth.sample(payload["n_obs"], radial, direction, spec, payload["seed"])
        summaries, _ = summarize(dataset, plan)
        estimate = estimate_alpha(summaries, level=payload["level"])
        out: dict = {"alpha_hat": estimate.alpha_hat}
        if payload.get("alpha_true") is not None:
            lo, hi = estimate.ci
            out["alpha_covered"] = bool(lo <= payload["alpha_true"] <= hi)
        if payload.get("query_set") is not None:
            from .cone import sphere_set_from_json

            sset = sphere_set_from_json(payload["query_set"])
            spectral_estimate = _spectral.estimate_spectral(summaries, spec)
            base = _spectral.measure_of(spectral_estimate, sset)
            out["sigma_hat"] = base.p_hat
            if payload.get("sigma_true") is not None:
                try:
                    lo, hi = _spectral.spectral_ci(
                        base.p_hat, spectral_estimate.n, payload["level"]
                    )
                    out["sigma_covered"] = bool(lo <= payload["sigma_true"] <= hi)
                except DegenerateVarianceError:
                    out["sigma_covered"] = False
                    out["sigma_degenerate"] = True
        return out
    except MaxratioError as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


def _study_plan(plan_obj: dict, n_obs: int, alpha_true: Optional[float]) -> GroupingPlan:
    if "n" in plan_obj and "m" in plan_obj:
        return GroupingPlan(n=int(plan_obj["n"]), m=int(plan_obj["m"]))
    if "r" in plan_obj:
        return plan_simple(n_obs, float(plan_obj["r"]))
    pilot = plan_obj.get("alpha_pilot", alpha_true if alpha_true is not None else 1.0)
    params = SecondOrderParams(
        alpha=float(pilot),
        beta=float(plan_obj["beta"]) if "beta" in plan_obj else math.inf,
        zeta=plan_obj.get("zeta"),
        epsilon=plan_obj.get("epsilon"),
        target=plan_obj.get("target", ALPHA_ESTIMATION),
    )
    return plan_second_order(n_obs, params)


def _summary_stats(values: list[float], truth: Optional[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    out = {"mean": float(np.mean(arr)), "sd": float(np.std(arr))}
    if truth is not None:
        out["bias"] = float(np.mean(arr) - truth)
        out["rmse"] = float(np.sqrt(np.mean((arr - truth) ** 2)))
    return out


def run_mc_study(study: dict, seed: int, level: float, jobs: int = 1) -> dict:
    """Run a replicated sampling study over a list of sample sizes.

    Per-replicate seeds are derived from the master seed by global
    replicate index, so the output is identical for any worker count.
    """
    if not isinstance(study, dict):
        raise InputValidationError("study spec must be a JSON object")
    for field in ("cone", "radial", "n_obs", "replicates", "plan"):
        if field not in study:
            raise InputValidationError(f"study spec missing field {field!r}")
    replicates = int(study["replicates"])
    if replicates < 2:
        raise InputValidationError(f"replicates must be >= 2, got {replicates}")
    n_obs_list = [int(v) for v in study["n_obs"]]
    if not n_obs_list:
        raise InputValidationError("study spec needs a nonempty n_obs list")
    spec = ConeSpec.from_json(study["cone"])
    RadialLaw.from_json(study["radial"])  # validate early
    if spec.kind != MAX_CONE_RPLUS:
        if "direction" not in study or study["direction"] is None:
            raise InputValidationError(
                f"study spec needs a direction law for cone kind {spec.kind!r}"
            )
        DirectionLaw.from_json(study["direction"])
    level = float(study.get("level", level))
    alpha_true = study.get("alpha_true")
    sigma_true = study.get("sigma_true")
    rows = []
    total_failures = 0
    for block, n_obs in enumerate(n_obs_list):
        plan = _study_plan(study["plan"], n_obs, alpha_true)
        payloads = [
            {
                "cone": study["cone"],
                "radial": study["radial"],
                "direction": study.get("direction"),
                "n_obs": n_obs,
                "n": plan.n,
                "m": plan.m,
                "level": level,
                "alpha_true": alpha_true,
                "query_set": study.get("query_set"),
                "sigma_true": sigma_true,
                "seed": derived_seed(seed, block * replicates + i),
            }
            for i in range(replicates)
        ]
        if jobs > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_study_replicate, payloads))
        else:
            results = [_study_replicate(p) for p in payloads]
        errors = [r["error"] for r in results if "error" in r]
        ok = [r for r in results if "error" not in r]
        row: dict = {
            "n_obs": n_obs,
            "n": plan.n,
            "m": plan.m,
            "replicates": replicates,
            "failures": len(errors),
        }
        if errors:
            row["errors"] = errors[:5]
        if ok:
            row["alpha"] = _summary_stats([r["alpha_hat"] for r in ok], alpha_true)
            if alpha_true is not None:
                covered = [r["alpha_covered"] for r in ok]
                row["alpha"]["coverage"] = float(np.mean(covered))
            if study.get("query_set") is not None:
                row["spectral"] = _summary_stats([r["sigma_hat"] for r in ok], sigma_true)
                if sigma_true is not None:
                    covered = [r["sigma_covered"] for r in ok]
                    row["spectral"]["coverage"] = float(np.mean(covered))
        total_failures += len(errors)
        log.info("study block n_obs=%d done (%d failures)", n_obs, len(errors))
        rows.append(row)
    return {
        "schema_version": _io.SCHEMA_VERSION,
        "command": "mc_study",
        "seed": int(seed),
        "level": level,
        "replicates": replicates,
        "rows": rows,
        "failures": total_failures,
    }


def _cmd_mc_study(args: argparse.Namespace) -> int:
    study = _io.load_json(args.study)
    seed = args.seed if args.seed_given else int(study.get("seed", args.seed))
    report = run_mc_study(study, seed=seed, level=args.level, jobs=args.jobs)
    _emit(report)
    return 1 if report["failures"] else 0


def _cmd_diagnose(args: argparse.Namespace) -> int:
    if args.check == "kappa-uniformity":
        tests = [
            run_kappa_uniformity(args.alpha, args.m, args.groups, args.seed, args.ks_level)
        ]
    elif args.check == "studentized-normality":
        tests = [
            run_studentized_normality(
                args.alpha, args.n_obs, args.replicates, args.seed, args.ks_level
            )
        ]
    else:  # order-stat-limit
        tests = run_order_stat_limit(args.alpha, args.m, args.groups, args.seed, args.ks_level)
    _emit(
        {
            "schema_version": _io.SCHEMA_VERSION,
            "command": "diagnose",
            "tests": tests,
        }
    )
    return 0


# ---------------------------------------------------------------------------
# Parser and entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxratio",
        description=(
            "Tail index and spectral measure estimation from within-group maxima ratios."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sample a synthetic dataset to CSV")
    _common_flags(p)
    p.add_argument("--law", required=True, help="JSON model spec (cone, radial, direction)")
    p.add_argument("--n-obs", type=int, required=True, help="number of observations")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--header", action="store_true", help="write coordinate names as a header")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("plan", help="compute a grouping plan (n, m)")
    _common_flags(p)
    _plan_flags(p)
    p.add_argument("--n-obs", type=int, required=True, help="sample size N")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("estimate", help="estimate the tail index from a CSV dataset")
    _common_flags(p)
    _plan_flags(p)
    p.add_argument("--in", dest="input", required=True, help="input CSV dataset")
    p.add_argument("--cone", required=True, help="JSON cone spec")
    p.add_argument("--query-set", default=None, help="JSON sphere set(s) to evaluate")
    p.add_argument("--shuffle", action="store_true", help="seeded shuffle before grouping")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("spectral", help="evaluate the spectral measure on sphere sets")
    _common_flags(p)
    _plan_flags(p)
    p.add_argument("--in", dest="input", required=True, help="input CSV dataset")
    p.add_argument("--cone", required=True, help="JSON cone spec")
    p.add_argument("--query-set", required=True, help="JSON sphere set(s) to evaluate")
    p.add_argument("--atoms-out", default=None, help="write the atoms to this CSV path")
    p.add_argument("--shuffle", action="store_true", help="seeded shuffle before grouping")
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("mc-study", help="replicated bias/RMSE/coverage study")
    _common_flags(p)
    p.add_argument("--study", required=True, help="JSON study spec")
    p.set_defaults(func=_cmd_mc_study)

    p = sub.add_parser("diagnose", help="run a named limit-law diagnostic")
    _common_flags(p)
    p.add_argument(
        "--check",
        required=True,
        choices=["kappa-uniformity", "studentized-normality", "order-stat-limit"],
    )
    p.add_argument("--alpha", type=float, default=1.0, help="true tail index")
    p.add_argument("--m", type=int, default=100, help="group size")
    p.add_argument("--groups", type=int, default=2000, help="number of groups")
    p.add_argument("--replicates", type=int, default=100, help="replicates (studentized check)")
    p.add_argument("--n-obs", type=int, default=20000, help="sample size (studentized check)")
    p.add_argument("--ks-level", type=float, default=0.01, help="KS rejection level")
    p.set_defaults(func=_cmd_diagnose)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    # rebind the handler on every call so the stream is the current
    # sys.stderr (test harnesses swap it between invocations)
    log.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False
    try:
        return args.func(args)
    except Exception as exc:  # mapped to documented exit codes below
        code = _exit_code(exc)
        if code == 1:
            raise
        json.dump(
            {
                "schema_version": _io.SCHEMA_VERSION,
                "error": type(exc).__name__,
                "message": str(exc),
                "exit_code": code,
            },
            sys.stderr,
            indent=2,
        )
        sys.stderr.write("\n")
        return code


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, InsufficientDataError):
        return 3
    if isinstance(exc, DegenerateStatisticError):
        return 4
    if isinstance(exc, (InputValidationError, MaxratioError)):
        return 2
    if isinstance(exc, json.JSONDecodeError):
        return 2
    if isinstance(exc, OSError):
        return 5
    return 1


if __name__ == "__main__":
    sys.exit(main())

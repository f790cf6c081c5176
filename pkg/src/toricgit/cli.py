"""Batch front door: one command per invocation, JSON in, report out.

Exit codes: 0 success, 1 malformed input, 2 mathematical infeasibility
(non-generic setups, unbalanced volume targets, solver failure, ...).
Reports embed the sha256 of the canonical input JSON and echo the input, so
a report can be re-run bit-for-bit.  Rationals travel as "p/q" strings;
floats appear only in solver output, printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import minkowski, serialize, stability
from .build import BundleSpec, alpha_surface_formula, projectivized_bundle
from .errors import InfeasibleError, InputError, ToricGitError
from .git import GitSetup, UnstableIndexVector, descends, pullback_functor, pushforward
from .klyachko import FiltrationSheaf
from .polytope import HPolytope

COMMANDS = (
    "quotient", "classify", "slope", "stability", "descend", "pullback",
    "pushforward", "minkowski-check", "solve-minkowski", "alpha",
    "slope-identity", "compatible-subgroups", "bundle", "falsify-converse",
)


def max_threads() -> int:
    """Parallelism cap from TORICGIT_THREADS (>= 1); evaluation order stays
    deterministic regardless of the cap."""
    raw = os.environ.get("TORICGIT_THREADS", "1")
    try:
        v = int(raw)
    except ValueError:
        raise InputError(f"TORICGIT_THREADS must be an integer, got {raw!r}")
    if v < 1:
        raise InputError("TORICGIT_THREADS must be >= 1")
    return v


def _need(payload: dict, key: str):
    if key not in payload:
        raise InputError(f'missing input key "{key}"')
    return payload[key]


def _setup(payload) -> GitSetup:
    return GitSetup.from_json_dict(_need(payload, "setup"))


def _sheaf(payload, key="sheaf") -> FiltrationSheaf:
    return FiltrationSheaf.from_json_dict(_need(payload, key))


def _indices(payload, setup: GitSetup) -> UnstableIndexVector:
    raw = payload.get("indices")
    if raw is None:
        return UnstableIndexVector.zero(setup)
    if not isinstance(raw, dict):
        raise InputError("indices must be an object facet -> integer")
    return UnstableIndexVector.from_dict(
        {int(k): serialize.int_from_obj(v) for k, v in raw.items()})


def run_command(command: str, payload: dict, options: dict) -> dict:
    """Dispatch a single job; returns the result dictionary."""
    if command == "quotient":
        setup = _setup(payload)
        py, fmap, b = setup.quotient_polytope()
        return {
            "quotient_polytope": py.to_json_dict(),
            "facet_map": {str(k): v for k, v in fmap.items()},
            "b": {str(k): v for k, v in b.items()},
            "dim_quotient": setup.dim_quotient(),
        }
    if command == "classify":
        setup = _setup(payload)
        return {
            "faces": setup.classification_report(),
            "generic": setup.is_generic(),
            "stable_facets": list(setup.stable_facets),
            "unstable_facets": list(setup.unstable_facets),
        }
    if command == "slope":
        poly = HPolytope.from_json_dict(_need(payload, "polytope"))
        sheaf = _sheaf(payload)
        return {"slope": serialize.frac_to_str(stability.slope(sheaf, poly))}
    if command == "stability":
        poly = HPolytope.from_json_dict(_need(payload, "polytope"))
        sheaf = _sheaf(payload)
        verdict = stability.check_stability(
            sheaf, poly,
            cap=options.get("cap", stability.DEFAULT_CAP),
            random_trials=options.get("random_trials", stability.DEFAULT_RANDOM_TRIALS),
            seed=options.get("seed", stability.DEFAULT_SEED),
        )
        return {"verdict": verdict.to_json_dict()}
    if command == "descend":
        setup = _setup(payload)
        sheaf = _sheaf(payload)
        ok = descends(setup, sheaf)
        b = setup.b_values()
        violations = []
        for f in setup.stable_facets:
            for j, _ in sheaf.filtrations[f]:
                if j % b[f] != 0:
                    violations.append({"facet": f, "jump": j, "b": b[f]})
        return {"descends": ok, "b": {str(k): v for k, v in b.items()},
                "violations": violations}
    if command == "pullback":
        setup = _setup(payload)
        sheaf = _sheaf(payload)
        ivec = _indices(payload, setup)
        lifted = pullback_functor(setup, ivec, sheaf)
        return {"sheaf": lifted.to_json_dict(),
                "indices": {str(k): v for k, v in ivec.entries}}
    if command == "pushforward":
        setup = _setup(payload)
        sheaf = _sheaf(payload)
        return {"sheaf": pushforward(setup, sheaf).to_json_dict()}
    if command == "minkowski-check":
        setup = _setup(payload)
        return minkowski.minkowski_condition(setup).to_json_dict()
    if command == "solve-minkowski":
        normals = [serialize.int_vector(u) for u in _need(payload, "normals")]
        volumes = [serialize.frac_from_obj(v) if not isinstance(v, float) else v
                   for v in _need(payload, "volumes")]
        sol = minkowski.solve_minkowski(
            normals, volumes,
            tol=options.get("tol", minkowski.SOLVER_TOL),
            max_iter=options.get("max_iter", minkowski.SOLVER_MAX_ITER),
            seed=options.get("seed"),
        )
        return {
            "normals": [list(u) for u in sol.normals],
            "supports": [f"{a:.12g}" for a in sol.supports],
            "residual": f"{sol.residual:.12g}",
            "iterations": sol.iterations,
        }
    if command == "alpha":
        setup = _setup(payload)
        alpha = minkowski.ample_class_alpha(
            setup,
            tol=options.get("tol", minkowski.SOLVER_TOL),
            max_iter=options.get("max_iter", minkowski.SOLVER_MAX_ITER),
            seed=options.get("seed"),
        )
        return {"alpha": alpha.to_json_dict()}
    if command == "slope-identity":
        setup = _setup(payload)
        sheaf = _sheaf(payload)
        ivec = _indices(payload, setup)
        alpha = minkowski.ample_class_alpha(
            setup,
            tol=options.get("tol", minkowski.SOLVER_TOL),
            max_iter=options.get("max_iter", minkowski.SOLVER_MAX_ITER),
            seed=options.get("seed"),
        )
        report = minkowski.verify_slope_identity(setup, sheaf, ivec, alpha)
        return {"identity": report.to_json_dict(), "alpha": alpha.to_json_dict()}
    if command == "compatible-subgroups":
        poly = HPolytope.from_json_dict(_need(payload, "polytope"))
        res = minkowski.compatible_subgroups(poly, k_max=options.get("k_max", 6))
        return res.to_json_dict()
    if command == "bundle":
        spec = BundleSpec.from_json_dict(payload)
        setup = projectivized_bundle(spec)
        out = {"setup": setup.to_json_dict(),
               "stable_facets": list(setup.stable_facets),
               "unstable_facets": list(setup.unstable_facets)}
        if spec.base.n == 2 and spec.fiber_rank == 2:
            out["alpha_formula"] = alpha_surface_formula(spec).to_json_dict()
        return out
    if command == "falsify-converse":
        setup = _setup(payload)
        cx = minkowski.converse_falsifier(setup)
        return {"counterexample": None if cx is None else cx.to_json_dict()}
    raise InputError(f"unknown command {command!r}")


def _render_text(command: str, result: dict) -> str:
    lines = [f"command: {command}"]

    def walk(obj, indent="  "):
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, (dict, list)):
                    lines.append(f"{indent}{k}:")
                    walk(v, indent + "  ")
                else:
                    lines.append(f"{indent}{k}: {v}")
        elif isinstance(obj, list):
            for v in obj:
                if isinstance(v, (dict, list)):
                    walk(v, indent + "  ")
                    lines.append(indent + "-")
                else:
                    lines.append(f"{indent}- {v}")

    walk(result)
    return "\n".join(lines)


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="toricgit",
        description="Exact toric GIT quotients, filtration sheaves, slope "
                    "stability, and quotient-class reconstruction.")
    parser.add_argument("--input", required=True, help="JSON job file")
    parser.add_argument("--command", choices=COMMANDS,
                        help="command (overrides the job file)")
    parser.add_argument("--tol", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--max-iter", type=int, dest="max_iter")
    parser.add_argument("--cap", type=int)
    parser.add_argument("--k-max", type=int, dest="k_max")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    args = parser.parse_args(argv)

    try:
        max_threads()
        with open(args.input, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if not isinstance(raw, dict):
            raise InputError("job file must contain a JSON object")
        command = args.command or raw.get("command")
        if command not in COMMANDS:
            raise InputError(f"no valid command given (got {command!r})")
        payload = raw.get("inputs", raw)
        if not isinstance(payload, dict):
            raise InputError('"inputs" must be a JSON object')
        options = dict(raw.get("options", {})) if isinstance(raw.get("options"), dict) else {}
        for key in ("tol", "seed", "max_iter", "cap", "k_max"):
            val = getattr(args, key, None)
            if val is not None:
                options[key] = val
        result = run_command(command, payload, options)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"infeasible: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ToricGitError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    report = {
        "command": command,
        "input_sha256": serialize.sha256_of(payload),
        "input": payload,
        "options": {k: options[k] for k in sorted(options)},
        "result": result,
    }
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True)
    else:
        text = _render_text(command, result)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

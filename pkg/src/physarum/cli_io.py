"""Problem file parsing and the command-line front end.

A problem file is a JSON object with integer matrices: {"A": [[...]], "b":
[...], "c": [...]} plus an optional "name" and an optional strictly
positive "start" vector. Commands print a deterministic JSON summary to
stdout and optionally dump a CSV trace; diagnostics go to stderr (set
PHYSARUM_LOG=debug for solver chatter).

Exit codes: 0 success, 1 usage, 2 unreadable or malformed input,
3 validation failure, 4 numerical failure or size limit, 5 a
verification check did not hold.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import continuous_flow, discrete_solver, entropy_path
from . import oracle as oracle_mod
from .dynamics import check_bounds, evaluate, gradient_identity_residual
from .errors import (
    LimitError,
    MalformedProblemError,
    NumericalError,
    PhysarumError,
    ProblemFileError,
    ProblemIOError,
    ValidationError,
    ValidationFailedError,
)
from .linalg import kernel_basis
from .model import LinearProgram, ValidatedLP, compute_params, default_params, validate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_VERIFY = 5


@dataclass(frozen=True)
class ProblemFile:
    lp: LinearProgram
    name: str
    start: np.ndarray | None


def parse_problem(path) -> ProblemFile:
    """Read a problem JSON file without validating the mathematics."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemIOError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedProblemError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedProblemError(f"{path}: top level must be an object")
    for key in ("A", "b", "c"):
        if key not in doc:
            raise MalformedProblemError(f"{path}: missing required key {key!r}")
        if not isinstance(doc[key], list):
            raise MalformedProblemError(f"{path}: {key!r} must be a list")
    name = doc.get("name", path.stem)
    if not isinstance(name, str):
        raise MalformedProblemError(f"{path}: 'name' must be a string")
    try:
        lp = LinearProgram.from_lists(doc["A"], doc["b"], doc["c"], name=name)
    except (ValueError, TypeError) as exc:
        raise MalformedProblemError(f"{path}: ragged or non-numeric arrays: {exc}") from exc
    start = None
    if "start" in doc:
        if not isinstance(doc["start"], list):
            raise MalformedProblemError(f"{path}: 'start' must be a list")
        try:
            start = np.asarray(doc["start"], dtype=float)
        except (ValueError, TypeError) as exc:
            raise MalformedProblemError(f"{path}: bad 'start' vector: {exc}") from exc
    return ProblemFile(lp=lp, name=name, start=start)


def load_validated(path) -> tuple[ValidatedLP, ProblemFile]:
    pf = parse_problem(path)
    try:
        vlp = validate(pf.lp)
    except ValidationError as exc:
        raise ValidationFailedError(f"{path}: {exc}") from exc
    return vlp, pf


def _json_ready(obj):
    if isinstance(obj, np.ndarray):
        return [_json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def _emit(doc: dict) -> None:
    json.dump(_json_ready(doc), sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_trace_csv(path, header: list[str], rows) -> None:
    path = Path(path)
    try:
        with path.open("w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise ProblemIOError(f"cannot write {path}: {exc}") from exc


def _resolve_start(lp: ValidatedLP, pf: ProblemFile, override: str | None):
    if override is not None:
        return np.asarray([float(v) for v in override.split(",")], dtype=float)
    if pf.start is not None:
        return pf.start
    return None


def _start_or_interior(lp: ValidatedLP, start):
    if start is not None:
        return np.asarray(start, dtype=float)
    result = oracle_mod.enumerate_polyhedron(lp)
    return oracle_mod.interior_point(result)


def cmd_solve(args) -> int:
    lp, pf = load_validated(args.problem)
    start = _resolve_start(lp, pf, args.start)
    config = discrete_solver.DiscreteConfig(
        eps=args.eps, h=args.h, start=start,
        max_iters=args.max_iters, trace_every=args.trace_every,
    )
    sol, trace = discrete_solver.solve(lp, config)
    if args.trace:
        n = lp.n
        header = ["k"] + [f"x_{i}" for i in range(n)] + ["cost", "energy", "feas_residual", "edge_potential_inf"]
        rows = (
            [e.k, *e.x, e.cost, e.energy,
             float(np.abs(lp.A @ e.x - lp.b).max()), e.edge_potential_inf]
            for e in trace.entries
        )
        _write_trace_csv(args.trace, header, rows)
    _emit({
        "command": "solve", "name": pf.name, "m": lp.m, "n": lp.n,
        "eps": sol.eps, "h": sol.h, "x": sol.x, "cost": sol.cost,
        "iterations": sol.iterations, "stop_reason": sol.stop_reason,
        "residual_inf": sol.residual_inf,
        "fixed_point_residual": sol.fixed_point_residual,
        "dev_max": sol.dev_max,
        "trace_entries": len(trace.entries),
        "trace_file": args.trace,
    })
    return EXIT_OK


def cmd_flow(args) -> int:
    lp, pf = load_validated(args.problem)
    start = _start_or_interior(lp, _resolve_start(lp, pf, args.start))
    config = continuous_flow.FlowConfig(
        x0=start, t_end=args.t_end, rel_tol=args.rel_tol, sample_dt=args.sample_dt,
    )
    trace = continuous_flow.integrate(lp, config)
    if args.trace:
        header = ["t"] + [f"x_{i}" for i in range(lp.n)] + ["cost", "energy", "feas_residual", "edge_potential_inf"]
        rows = (
            [e.t, *e.x, e.cost, e.energy, e.feas_residual, e.edge_potential_inf]
            for e in trace.entries
        )
        _write_trace_csv(args.trace, header, rows)
    final = trace.final
    _emit({
        "command": "flow", "name": pf.name, "m": lp.m, "n": lp.n,
        "t_end": args.t_end, "samples": len(trace.entries),
        "x_final": final.x, "cost_final": final.cost,
        "direction_inf_final": final.direction_inf,
        "feas_residual_max": max(e.feas_residual for e in trace.entries),
        "x_bound_ok": all(e.x_bound_ok for e in trace.entries),
        "trace_file": args.trace,
    })
    return EXIT_OK


def cmd_path(args) -> int:
    lp, pf = load_validated(args.problem)
    anchor = _start_or_interior(lp, _resolve_start(lp, pf, args.start))
    mus = np.linspace(0.0, args.mu_max, args.points)
    points = entropy_path.follow_path(lp, anchor, mus)
    if args.trace:
        header = ["mu"] + [f"x_{i}" for i in range(lp.n)] + ["cost", "energy", "feas_residual", "edge_potential_inf"]
        rows = (
            [p.mu, *p.x, float(lp.c @ p.x), "",
             float(np.abs(lp.A @ p.x - lp.b).max()),
             float(np.abs(lp.At @ p.y).max())]
            for p in points
        )
        _write_trace_csv(args.trace, header, rows)
    last = points[-1]
    _emit({
        "command": "path", "name": pf.name, "m": lp.m, "n": lp.n,
        "mu_max": args.mu_max, "points": len(points),
        "x_final": last.x, "cost_final": float(lp.c @ last.x),
        "dual_value_final": last.dual_value,
        "newton_iters_total": sum(p.newton_iters for p in points),
        "trace_file": args.trace,
    })
    return EXIT_OK


def cmd_oracle(args) -> int:
    lp, pf = load_validated(args.problem)
    result = oracle_mod.enumerate_polyhedron(lp, cap=args.cap)
    doc = {
        "command": "oracle", "name": pf.name, "m": lp.m, "n": lp.n,
        "status": result.status, "exact": result.exact,
        "vertices": result.vertices, "rays": result.rays,
    }
    if result.status == "optimal":
        doc.update({
            "opt": result.opt,
            "optimal_indices": list(result.optimal_indices),
            "support_limit": sorted(result.J),
            "vanishing": sorted(result.N),
        })
    _emit(doc)
    return EXIT_OK


def cmd_params(args) -> int:
    lp, pf = load_validated(args.problem)
    params = compute_params(lp, mode=args.mode)
    _emit({
        "command": "params", "name": pf.name, "m": lp.m, "n": lp.n,
        "cost_sum": params.cost_sum,
        "subdet_max": params.subdet_max,
        "subdet_exact": params.subdet_exact,
        "potential_ratio_bound": params.potential_ratio_bound,
        "flux_bound": params.flux_bound,
        "positivity_step_cap": 0.5 / params.potential_ratio_bound,
        "certified_step": discrete_solver.default_step(params, args.eps),
        "eps": args.eps,
    })
    return EXIT_OK


def run_verification(lp: ValidatedLP, eps: float, h: float | None,
                     samples: int, seed: int, max_iters: int = 1_000_000) -> dict:
    """Solve, certify the trace, and spot-check the dynamics algebra.

    Returns a report dict whose "ok" field is the overall verdict. The
    spot checks draw random feasible points and verify the energy
    identity, the flux and potential bounds, and the first-variation
    identity against random constraint-kernel directions.
    """
    if not np.any(lp.b_int):
        return {"ok": True, "note": "zero demand vector; x = 0 is optimal", "certificate": None}

    params = default_params(lp)
    result = oracle_mod.enumerate_polyhedron(lp)
    opt = result.opt
    x_star = result.optimal_vertices[0]

    config = discrete_solver.DiscreteConfig(eps=eps, h=h, trace_every=1, max_iters=max_iters)
    sol, trace = discrete_solver.solve(
        lp, config, params=params, oracle_result=result, verify_with=(opt, x_star),
    )
    cert = discrete_solver.certify_trace(lp, trace, opt, eps, sol.h, x_star)

    rng = np.random.default_rng(seed)
    kernel = kernel_basis(lp.A)
    pts = oracle_mod.sample_feasible(result, rng, samples)
    checked = skipped = 0
    energy_bad = bound_bad = identity_bad = 0
    worst_energy = worst_identity = 0.0
    for x in pts:
        if np.any(x <= 0.0):
            skipped += 1
            continue
        checked += 1
        ev = evaluate(lp, x, verify=True)
        scale = abs(ev.energy) + 1.0
        e_res = abs(ev.energy_flux - ev.energy) / scale
        worst_energy = max(worst_energy, e_res)
        if e_res > 1e-8:
            energy_bad += 1
        rep = check_bounds(lp, ev, params, feasible=True)
        if not (rep.flux_ok and rep.edge_potential_ok):
            bound_bad += 1
        if kernel.shape[1]:
            coeffs = rng.standard_normal(kernel.shape[1])
            hvec = kernel @ coeffs
            res = gradient_identity_residual(lp, ev, hvec)
            rel = res / (float(np.abs(lp.c @ np.abs(hvec))) + 1.0)
            worst_identity = max(worst_identity, rel)
            if rel > 1e-7:
                identity_bad += 1

    gap_ok = sol.cost <= (1.0 + eps) * opt + 1e-9 * opt
    ok = (cert.violations == 0 and energy_bad == 0 and bound_bad == 0
          and identity_bad == 0 and gap_ok)
    return {
        "ok": ok,
        "eps": eps,
        "h": sol.h,
        "iterations": sol.iterations,
        "stop_reason": sol.stop_reason,
        "cost": sol.cost,
        "opt": opt,
        "gap_ok": gap_ok,
        "certificate": {
            "steps_checked": cert.steps_checked,
            "violations": cert.violations,
            "first_violation": cert.first_violation,
            "big_gap_steps": cert.big_gap_steps,
            "small_gap_steps": cert.small_gap_steps,
            "worst_margin": cert.worst_margin,
            "drop_threshold": cert.drop_threshold,
        },
        "samples": {
            "requested": samples,
            "checked": checked,
            "skipped": skipped,
            "energy_identity_failures": energy_bad,
            "bound_failures": bound_bad,
            "first_variation_failures": identity_bad,
            "worst_energy_residual": worst_energy,
            "worst_first_variation_residual": worst_identity,
        },
    }


def cmd_verify(args) -> int:
    lp, pf = load_validated(args.problem)
    report = run_verification(lp, eps=args.eps, h=args.h,
                              samples=args.samples, seed=args.seed,
                              max_iters=args.max_iters)
    report.update({"command": "verify", "name": pf.name})
    _emit(report)
    return EXIT_OK if report["ok"] else EXIT_VERIFY


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="physarum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("problem", help="path to a problem JSON file")
        p.add_argument("--start", default=None,
                       help="comma-separated start vector, overriding the file")

    p = sub.add_parser("solve", help="run the damped discrete iteration")
    common(p)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--h", type=float, default=None,
                   help="step size (default: the certified step)")
    p.add_argument("--max-iters", type=int, default=1_000_000)
    p.add_argument("--trace", default=None, help="write a CSV trace here")
    p.add_argument("--trace-every", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("flow", help="integrate the continuous dynamics")
    common(p)
    p.add_argument("--t-end", type=float, default=40.0)
    p.add_argument("--sample-dt", type=float, default=0.25)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--trace", default=None, help="write a CSV trace here")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("path", help="follow the entropy-regularized path")
    common(p)
    p.add_argument("--mu-max", type=float, default=20.0)
    p.add_argument("--points", type=int, default=41)
    p.add_argument("--trace", default=None, help="write a CSV trace here")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("oracle", help="enumerate vertices and rays exactly")
    common(p)
    p.add_argument("--cap", type=int, default=oracle_mod.ENUMERATION_CAP)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("params", help="print certified instance constants")
    common(p)
    p.add_argument("--mode", choices=("exact", "bound"), default="exact")
    p.add_argument("--eps", type=float, default=0.1)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("verify", help="solve and check every invariant")
    common(p)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=20240801)
    p.add_argument("--max-iters", type=int, default=1_000_000)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("PHYSARUM_LOG")
    if level:
        logging.basicConfig(
            stream=sys.stderr,
            level=getattr(logging, level.upper(), logging.INFO),
            format="%(levelname)s %(name)s: %(message)s",
        )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationFailedError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ProblemFileError as exc:
        print(f"problem file error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, LimitError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PhysarumError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

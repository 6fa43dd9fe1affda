"""Damped discrete iteration with a convergence certificate.

From a feasible positive start the update

    x(k+1) = (1 - h) x(k) + h q(k)

keeps A x = b exactly and, for a small enough step, comes with a proof of
progress: whenever the cost V(k) = c . x(k) still exceeds (1 + eps) times
the optimum, the combined potential

    phi(k) = 4 ln V(k) - (eps h / opt) B(k),      B(k) = sum_i c_i x*_i ln x_i(k)

drops by at least h^2 eps^2 / 6 per step. The guaranteed step size is
eps / (6 P^2) where P bounds |a_i . p / c_i - 1| over the feasible region;
larger steps up to 1/(2P) keep the iterates positive but void the a-priori
certificate (an a-posteriori check is still available via certify_trace).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle as oracle_mod
from .errors import (
    BadEpsError,
    BadStepError,
    DimensionMismatchError,
    FeasibilityLostError,
    MissingVerifyDataError,
    NoFeasibleInteriorStartError,
    NotPositiveDefiniteError,
    NumericalError,
    PositivityLostError,
)
from .dynamics import evaluate
from .model import Params, ValidatedLP, default_params

logger = logging.getLogger(__name__)

ITERATION_HARD_CAP = 10**18


@dataclass(frozen=True)
class DiscreteConfig:
    """Solver knobs. ``h=None`` selects the certified step automatically."""

    eps: float = 0.1
    h: float | None = None
    start: np.ndarray | None = None
    fixed_point_tol: float = 1e-9
    max_iters: int = 1_000_000
    trace_every: int = 1
    allow_infeasible: bool = False

    def __post_init__(self):
        if not (0.0 < self.eps < 0.5):
            raise BadEpsError(f"eps must lie in (0, 1/2), got {self.eps}")
        if self.h is not None and not (0.0 < self.h < 1.0):
            raise BadStepError(f"h must lie in (0, 1), got {self.h}")
        if self.fixed_point_tol <= 0.0:
            raise ValueError("fixed_point_tol must be positive")
        if self.max_iters < 0 or self.trace_every < 0:
            raise ValueError("max_iters and trace_every must be nonnegative")


@dataclass(frozen=True)
class DiscreteTraceEntry:
    k: int
    x: np.ndarray
    cost: float
    energy: float
    edge_potential_inf: float
    barrier: float | None = None
    potential: float | None = None


@dataclass(frozen=True)
class Trace:
    entries: list[DiscreteTraceEntry]
    h: float
    eps: float
    trace_every: int


@dataclass(frozen=True)
class Solution:
    x: np.ndarray
    cost: float
    iterations: int
    stop_reason: str
    h: float
    eps: float
    residual_inf: float
    fixed_point_residual: float
    dev_max: float


def default_step(params: Params, eps: float) -> float:
    """The certified step size eps / (6 P^2)."""
    if not (0.0 < eps < 0.5):
        raise BadEpsError(f"eps must lie in (0, 1/2), got {eps}")
    return eps / (6.0 * params.potential_ratio_bound**2)


def iteration_bound(cost_ratio: float, spread: float, eps: float, h: float) -> int:
    """Worst-case step count until the cost is within (1 + eps) of optimal.

    ``cost_ratio`` bounds V(0) / opt and ``spread`` bounds both every start
    coordinate and its reciprocal. The potential starts at most
    4 ln cost_ratio + eps h ln spread above its floor and loses
    h^2 eps^2 / 6 per step, which gives

        ceil( 6 (4 ln cost_ratio + 2 eps h ln spread) / (h^2 eps^2) ).
    """
    if not (0.0 < eps < 0.5):
        raise BadEpsError(f"eps must lie in (0, 1/2), got {eps}")
    if not (0.0 < h < 1.0):
        raise BadStepError(f"h must lie in (0, 1), got {h}")
    if cost_ratio < 1.0 or spread < 1.0:
        raise ValueError("cost_ratio and spread must be at least 1")
    num = 6.0 * (4.0 * math.log(cost_ratio) + 2.0 * eps * h * math.log(spread))
    return int(math.ceil(min(num / (h * h * eps * eps), float(ITERATION_HARD_CAP))))


def step(lp: ValidatedLP, x, h: float) -> np.ndarray:
    """One damped update (1 - h) x + h q. Raises if positivity is lost."""
    if not (0.0 <= h < 1.0):
        raise BadStepError(f"h must lie in [0, 1), got {h}")
    ev = evaluate(lp, x)
    nxt = ev.x + h * ev.direction
    if np.any(nxt <= 0.0):
        raise PositivityLostError(f"step {h} drove a coordinate nonpositive")
    return nxt


def _resolve_start(lp: ValidatedLP, config: DiscreteConfig, oracle_result) -> np.ndarray:
    if config.start is not None:
        x0 = np.asarray(config.start, dtype=float)
        if x0.shape != (lp.n,):
            raise DimensionMismatchError(f"start has shape {x0.shape}, expected ({lp.n},)")
    else:
        if oracle_result is None:
            try:
                oracle_result = oracle_mod.enumerate_polyhedron(lp)
            except Exception as exc:
                raise NoFeasibleInteriorStartError(f"could not derive a start: {exc}") from exc
        try:
            x0 = oracle_mod.interior_point(oracle_result)
        except Exception as exc:
            raise NoFeasibleInteriorStartError(str(exc)) from exc
    if np.any(x0 <= 0.0) or not np.all(np.isfinite(x0)):
        raise NoFeasibleInteriorStartError("start must be strictly positive and finite")
    resid = float(np.abs(lp.A @ x0 - lp.b).max())
    if not config.allow_infeasible and resid > 1e-8 * (float(np.abs(lp.b).max()) + 1.0):
        raise NoFeasibleInteriorStartError(f"start violates A x = b (residual {resid:.3e})")
    return x0


def solve(
    lp: ValidatedLP,
    config: DiscreteConfig,
    params: Params | None = None,
    oracle_result=None,
    verify_with: tuple[float, np.ndarray] | None = None,
) -> tuple[Solution, Trace]:
    """Run the damped iteration to a numerical fixed point.

    Stops at FixedPoint when |q - x| is below fixed_point_tol * (1 + |x|),
    at IterationBound when the certified worst-case count is exhausted, or
    at UserCap when max_iters is hit first. ``verify_with=(opt, x_star)``
    additionally records the barrier and the combined potential per entry.

    A zero demand vector is a special case: x = 0 is optimal and the
    dynamics are never entered.
    """
    if params is None:
        params = default_params(lp)

    if not np.any(lp.b_int):
        x = np.zeros(lp.n)
        sol = Solution(
            x=x, cost=0.0, iterations=0, stop_reason="FixedPoint", h=config.h or 0.0,
            eps=config.eps, residual_inf=0.0, fixed_point_residual=0.0, dev_max=0.0,
        )
        return sol, Trace(entries=[], h=config.h or 0.0, eps=config.eps, trace_every=config.trace_every)

    x = _resolve_start(lp, config, oracle_result)

    certified = default_step(params, config.eps)
    if config.h is None:
        h = certified
    else:
        h = config.h
        pos_cap = 0.5 / params.potential_ratio_bound
        if h > pos_cap:
            raise BadStepError(
                f"h={h:.3e} exceeds the positivity-safe cap 1/(2 P) = {pos_cap:.3e}"
            )
        if h > certified:
            logger.warning(
                "step %.3e exceeds the certified %.3e; the a-priori progress bound no longer applies",
                h, certified,
            )

    v0 = float(lp.c @ x)
    opt_floor = float(lp.c_int.min()) / params.subdet_max
    cost_ratio = max(v0 / opt_floor, 1.0)
    spread = max(float(x.max()), float(1.0 / x.min()), 1.0)
    certified_cap = iteration_bound(cost_ratio, spread, config.eps, h)
    cap = min(config.max_iters, certified_cap)

    opt_v = x_star = supp = logs_star = None
    if verify_with is not None:
        opt_v, x_star = float(verify_with[0]), np.asarray(verify_with[1], dtype=float)
        supp = x_star > 0.0
        logs_star = lp.c[supp] * x_star[supp]

    A, At, b, c = lp.A, lp.At, lp.b, lp.c
    inv_c = 1.0 / c
    m = lp.m
    entries: list[DiscreteTraceEntry] = []
    dev_max = 0.0
    k = 0
    stop = None
    fp_res = math.inf

    while True:
        w = x * inv_c
        lap = (A * w) @ At
        try:
            p = np.linalg.solve(lap, b)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(f"laplacian solve failed at iteration {k}: {exc}") from exc
        edge = At @ p
        q = w * edge
        diff = q - x
        fp_res = float(np.abs(diff).max())
        dev = float(np.abs(diff / x).max())
        if dev > dev_max:
            dev_max = dev

        if config.trace_every and k % config.trace_every == 0:
            barrier = potential = None
            if verify_with is not None:
                barrier = float(logs_star @ np.log(x[supp]))
                potential = 4.0 * math.log(c @ x) - (config.eps * h / opt_v) * barrier
            entries.append(
                DiscreteTraceEntry(
                    k=k, x=x.copy(), cost=float(c @ x), energy=float(b @ p),
                    edge_potential_inf=float(np.abs(edge).max()),
                    barrier=barrier, potential=potential,
                )
            )

        if fp_res <= config.fixed_point_tol * (1.0 + float(np.abs(x).max())):
            stop = "FixedPoint"
            break
        if k >= cap:
            stop = "UserCap" if cap == config.max_iters and config.max_iters < certified_cap else "IterationBound"
            break

        x = x + h * diff
        if np.any(x <= 0.0):
            raise PositivityLostError(f"coordinate became nonpositive at iteration {k + 1}")
        k += 1

    resid = float(np.abs(A @ x - b).max())
    if not config.allow_infeasible and resid > 1e-6 * (float(np.abs(b).max()) + 1.0):
        raise FeasibilityLostError(f"feasibility drifted to {resid:.3e}")

    sol = Solution(
        x=x, cost=float(c @ x), iterations=k, stop_reason=stop, h=h, eps=config.eps,
        residual_inf=resid, fixed_point_residual=fp_res, dev_max=dev_max,
    )
    return sol, Trace(entries=entries, h=h, eps=config.eps, trace_every=config.trace_every)


@dataclass(frozen=True)
class CertReport:
    """Outcome of the a-posteriori progress check on a trace."""

    steps_checked: int
    violations: int
    first_violation: int | None
    big_gap_steps: int
    small_gap_steps: int
    worst_margin: float
    drop_threshold: float


def certify_trace(lp: ValidatedLP, trace: Trace, opt: float, eps: float, h: float, x_star) -> CertReport:
    """Check the per-step potential drop against the guaranteed amount.

    For every consecutive pair with V(k) > (1 + eps) opt the drop in
    phi must be at least h^2 eps^2 / 6 (minus a 1e-10 float allowance).
    Also labels which sufficient condition held at the earlier point: a
    large energy/cost gap (E/V < 1 - eps/3) or energy still well above
    optimal (E > (1 + eps/3) opt); one of the two always must.
    Requires a trace recorded at every step.
    """
    if trace.trace_every != 1:
        raise MissingVerifyDataError("certification needs a trace recorded at every step")
    if opt <= 0.0:
        raise ValueError("the optimal value must be positive to form the potential")
    x_star = np.asarray(x_star, dtype=float)
    if x_star.shape != (lp.n,):
        raise DimensionMismatchError(f"x_star has shape {x_star.shape}, expected ({lp.n},)")
    supp = x_star > 0.0
    w_supp = lp.c[supp] * x_star[supp]

    threshold = -(h * h * eps * eps) / 6.0
    allowance = 1e-10
    checked = violations = big = small = 0
    first_violation = None
    worst = -math.inf

    def phi(entry: DiscreteTraceEntry) -> float:
        barrier = float(w_supp @ np.log(entry.x[supp]))
        return 4.0 * math.log(entry.cost) - (eps * h / opt) * barrier

    for prev, nxt in zip(trace.entries, trace.entries[1:]):
        if nxt.k != prev.k + 1:
            raise MissingVerifyDataError("trace entries are not consecutive")
        if prev.cost <= (1.0 + eps) * opt:
            continue
        checked += 1
        if prev.energy / prev.cost < 1.0 - eps / 3.0:
            big += 1
        elif prev.energy > (1.0 + eps / 3.0) * opt:
            small += 1
        drop = phi(nxt) - phi(prev)
        margin = drop - threshold
        if margin > worst:
            worst = margin
        if drop > threshold + allowance:
            violations += 1
            if first_violation is None:
                first_violation = prev.k

    return CertReport(
        steps_checked=checked,
        violations=violations,
        first_violation=first_violation,
        big_gap_steps=big,
        small_gap_steps=small,
        worst_margin=worst if checked else 0.0,
        drop_threshold=threshold,
    )


def certified_step_search(
    lp: ValidatedLP,
    eps: float,
    params: Params | None = None,
    oracle_result=None,
    start: np.ndarray | None = None,
    safety: float = 1.3,
    t_pilot: float = 40.0,
) -> tuple[float, float]:
    """Pick a step the a-posteriori certificate is expected to accept.

    The guaranteed step divides eps by six times the square of a worst-case
    potential bound, which is wildly pessimistic on most instances: the
    progress argument only needs the deviation |q_i/x_i - 1| actually seen
    along the trajectory. A cheap ODE integration of the same dynamics
    measures that deviation; the returned step inflates it by ``safety``
    and never exceeds the positivity cap. certify_trace stays the arbiter.

    Returns the step together with the measured deviation.
    """
    from . import continuous_flow

    if params is None:
        params = default_params(lp)
    pos_cap = 0.5 / params.potential_ratio_bound
    h_auto = default_step(params, eps)
    if start is None:
        if oracle_result is None:
            oracle_result = oracle_mod.enumerate_polyhedron(lp)
        start = oracle_mod.interior_point(oracle_result)
    try:
        trace = continuous_flow.integrate(
            lp, continuous_flow.FlowConfig(x0=start, t_end=t_pilot), params=params,
        )
        dev = 1e-12
        for entry in trace.entries:
            ev = evaluate(lp, entry.x)
            dev = max(dev, float(np.abs(ev.flux / ev.x - 1.0).max()))
    except (NumericalError, np.linalg.LinAlgError) as exc:
        logger.warning("pilot integration failed (%s); falling back to the worst-case step", exc)
        return h_auto, math.inf
    h = min(0.999 * pos_cap, max(h_auto, eps / (6.0 * (safety * dev) ** 2)))
    return h, dev

"""Core slime-mold network dynamics for a standard-form LP.

State is a positive vector x. Each coordinate behaves like a tube whose
conductance is w_i = x_i / c_i. Node potentials p solve the weighted
Laplacian system

    (A W A^T) p = b,       W = diag(x / c),

and the flux induced by those potentials is q = W A^T p. The dynamics move
the state toward its own flux:

    dx/dt = q - x.

This module evaluates all derived quantities at a point, splits the motion
into a feasibility part and an optimizing part, and checks the worst-case
bounds that the derived parameters promise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError, NonPositiveStateError, NotInKernelError
from .linalg import spd_factor
from .model import Params, ValidatedLP

BOUND_RTOL = 1e-8


@dataclass(frozen=True)
class DynamicsEval:
    """Everything the dynamics know at one state.

    x           state (positive)
    weights     w = x / c
    potentials  p, solution of (A W A^T) p = b
    edge_potentials  A^T p, one entry per coordinate
    flux        q = W A^T p; satisfies A q = b identically
    direction   q - x, the instantaneous motion
    feas_direction  part of the motion that restores A x = b
    opt_direction   part that descends the cost inside the feasible set
    energy      b . p, also equal to the quadratic form q . (q / w)
    cost        c . x
    energy_flux quadratic-form recomputation of the energy (verify mode only)
    """

    x: np.ndarray
    weights: np.ndarray
    potentials: np.ndarray
    edge_potentials: np.ndarray
    flux: np.ndarray
    direction: np.ndarray
    feas_direction: np.ndarray
    opt_direction: np.ndarray
    energy: float
    cost: float
    energy_flux: float | None = None

    @cached_property
    def edge_potential_inf(self) -> float:
        return float(np.abs(self.edge_potentials).max())


def _check_state(lp: ValidatedLP, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (lp.n,):
        raise DimensionMismatchError(f"state has shape {x.shape}, expected ({lp.n},)")
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise NonPositiveStateError("state must be strictly positive and finite")
    return x


def evaluate(lp: ValidatedLP, x, verify: bool = False) -> DynamicsEval:
    """Evaluate the dynamics at a positive state (feasibility not required)."""
    x = _check_state(lp, x)
    w = x / lp.c
    lap = (lp.A * w) @ lp.At
    fac = spd_factor(lap)
    p = fac.solve(lp.b)
    edge = lp.At @ p
    q = w * edge
    r = fac.solve(lp.A @ x)
    opt_dir = w * (lp.At @ r - lp.c)
    feas_dir = w * (lp.At @ (p - r))
    energy_flux = float(q @ (q / w)) if verify else None
    return DynamicsEval(
        x=x,
        weights=w,
        potentials=p,
        edge_potentials=edge,
        flux=q,
        direction=q - x,
        feas_direction=feas_dir,
        opt_direction=opt_dir,
        energy=float(lp.b @ p),
        cost=float(lp.c @ x),
        energy_flux=energy_flux,
    )


def gradient_identity_residual(lp: ValidatedLP, ev: DynamicsEval, h) -> float:
    """Residual of the metric-gradient identity along a kernel direction.

    In the metric H(x) = diag(c / x) the gradient of the cost restricted to
    the affine space {A x = b} is x - q, so for any h with A h = 0

        c . h  =  h . H(x) (x - q)

    holds exactly. Returns the absolute difference between the two sides.
    Raises NotInKernelError when h is not (numerically) in the kernel of A.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (lp.n,):
        raise DimensionMismatchError(f"direction has shape {h.shape}, expected ({lp.n},)")
    a_norm = float(np.abs(lp.A).sum(axis=1).max())
    h_norm = float(np.abs(h).max())
    if float(np.abs(lp.A @ h).max()) > 1e-10 * a_norm * h_norm:
        raise NotInKernelError("direction is not in the kernel of A")
    metric_grad = (lp.c / ev.x) * (ev.x - ev.flux)
    return float(abs(lp.c @ h - h @ metric_grad))


def column_potential_bounds(lp: ValidatedLP, w) -> np.ndarray:
    """Return ||A^T L^{-1} a_i||_inf for every column i, with L = A diag(w) A^T.

    Each of these norms is at most D / w_i for any positive weights, where D
    is the largest absolute subdeterminant of A; this is the kernel fact
    behind every potential bound in the package.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (lp.n,):
        raise DimensionMismatchError(f"weights have shape {w.shape}, expected ({lp.n},)")
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise NonPositiveStateError("weights must be strictly positive and finite")
    fac = spd_factor((lp.A * w) @ lp.At)
    sols = fac.solve(lp.A)
    return np.abs(lp.At @ sols).max(axis=0)


def embed(x, c) -> np.ndarray:
    """Isometric embedding y_i = 2 sqrt(c_i x_i); the metric becomes Euclidean."""
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    if np.any(x <= 0.0):
        raise NonPositiveStateError("embedding requires a strictly positive state")
    return 2.0 * np.sqrt(c * x)


@dataclass(frozen=True)
class BoundReport:
    """Measured values versus the worst-case bounds from the parameters."""

    flux_inf: float
    flux_bound: float
    flux_ok: bool
    edge_potential_inf: float
    edge_potential_bound: float
    edge_potential_ok: bool | None


def check_bounds(lp: ValidatedLP, ev: DynamicsEval, params: Params, feasible: bool) -> BoundReport:
    """Check the flux bound, and the potential bound when the state is feasible.

    The caller asserts feasibility via the flag; it is verified against the
    actual residual before the potential bound is reported.
    """
    if feasible:
        resid = float(np.abs(lp.A @ ev.x - lp.b).max())
        if resid > 1e-8 * (float(np.abs(lp.b).max()) + 1.0):
            raise ValueError(f"state declared feasible but |Ax - b| = {resid:.3e}")
    flux_inf = float(np.abs(ev.flux).max())
    pot_bound = params.subdet_max * params.cost_sum
    return BoundReport(
        flux_inf=flux_inf,
        flux_bound=params.flux_bound,
        flux_ok=flux_inf <= params.flux_bound * (1.0 + BOUND_RTOL),
        edge_potential_inf=ev.edge_potential_inf,
        edge_potential_bound=pot_bound,
        edge_potential_ok=(ev.edge_potential_inf <= pot_bound * (1.0 + BOUND_RTOL)) if feasible else None,
    )

"""Problem representation, validation, and derived worst-case parameters.

A problem is the standard form

    minimize    c . x
    subject to  A x = b,  x >= 0

with integer data, strictly positive costs, and A of full row rank. The
derived parameters collected in :class:`Params` bound how hard the dynamics
can kick: the subdeterminant maximum controls potentials and fluxes, and
from it come the safe step size and the a-priori bound on any flux vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _exact
from .errors import (
    DimensionMismatchError,
    ExactTooLargeError,
    NonPositiveCostError,
    RankDeficientError,
)

# Exact subdeterminant enumeration is exponential; beyond this column count
# callers must settle for the closed-form bound.
EXACT_SUBDET_CAP = 14

# Rational paths elsewhere assume entries fit comfortably in machine words.
ENTRY_MAGNITUDE_CAP = 2**15


@dataclass(frozen=True)
class LinearProgram:
    """Raw instance data, as parsed: integer A (m x n), b (m), c (n)."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    name: str = ""

    @classmethod
    def from_lists(cls, A, b, c, name: str = "") -> "LinearProgram":
        return cls(np.asarray(A), np.asarray(b), np.asarray(c), name)


@dataclass(frozen=True)
class ValidatedLP:
    """An instance that passed :func:`validate`. Downstream code expects this.

    Integer arrays are canonical; float views are cached for numerics.
    """

    A_int: np.ndarray
    b_int: np.ndarray
    c_int: np.ndarray
    name: str = ""

    @property
    def m(self) -> int:
        return self.A_int.shape[0]

    @property
    def n(self) -> int:
        return self.A_int.shape[1]

    @cached_property
    def A(self) -> np.ndarray:
        return np.ascontiguousarray(self.A_int, dtype=float)

    @cached_property
    def At(self) -> np.ndarray:
        return np.ascontiguousarray(self.A.T)

    @cached_property
    def b(self) -> np.ndarray:
        return self.b_int.astype(float)

    @cached_property
    def c(self) -> np.ndarray:
        return self.c_int.astype(float)


@dataclass(frozen=True)
class Params:
    """Worst-case parameters derived from the instance data.

    cost_sum
        Sum of all cost coefficients.
    subdet_max
        Maximum absolute determinant over square submatrices of A; exact
        integer when ``subdet_exact`` is True, otherwise an upper bound.
    potential_ratio_bound
        Bound on |a_i.p / c_i - 1| over the feasible region,
        ``cost_sum * subdet_max + 1``.
    flux_bound
        Bound on any flux vector's max-norm, ``subdet_max**2 * n * |b|_1``.
    """

    cost_sum: int
    subdet_max: float
    subdet_exact: bool
    potential_ratio_bound: float
    flux_bound: float
    m: int
    n: int


def validate(lp: LinearProgram) -> ValidatedLP:
    """Check shapes, integrality, positivity of costs, and full row rank."""
    A = np.asarray(lp.A)
    b = np.asarray(lp.b)
    c = np.asarray(lp.c)
    if A.ndim != 2:
        raise DimensionMismatchError(f"A must be a 2-d array, got ndim={A.ndim}")
    m, n = A.shape
    if m == 0 or n == 0:
        raise DimensionMismatchError("A must have at least one row and one column")
    if b.shape != (m,):
        raise DimensionMismatchError(f"b has shape {b.shape}, expected ({m},)")
    if c.shape != (n,):
        raise DimensionMismatchError(f"c has shape {c.shape}, expected ({n},)")
    if m > n:
        raise RankDeficientError(f"more rows than columns ({m} > {n}); rows cannot be independent")
    for name, arr in (("A", A), ("b", b), ("c", c)):
        if not np.issubdtype(arr.dtype, np.integer):
            if not (np.issubdtype(arr.dtype, np.floating) and np.all(arr == np.floor(arr)) and np.all(np.isfinite(arr))):
                raise DimensionMismatchError(f"{name} must contain integers")
    A_int = A.astype(np.int64)
    b_int = b.astype(np.int64)
    c_int = c.astype(np.int64)
    if np.any(c_int < 1):
        raise NonPositiveCostError(f"all costs must be >= 1, got min {c_int.min()}")
    if _exact.rank_int(A_int.tolist()) != m:
        raise RankDeficientError("A does not have full row rank")
    return ValidatedLP(A_int=A_int, b_int=b_int, c_int=c_int, name=lp.name)


def subdet_upper_bound(A_int: np.ndarray) -> float:
    """Closed-form bound on the subdeterminant maximum.

    For a k x k submatrix every row has 2-norm at most sqrt(k) * max|A_ij|,
    so the determinant is at most (sqrt(k) * max|A_ij|)**k; take the max
    over k. Always at least the exact value and cheap at any size.
    """
    m, n = A_int.shape
    a = int(np.abs(A_int).max())
    if a == 0:
        return 0.0
    return max((np.sqrt(k) * a) ** k for k in range(1, min(m, n) + 1))


def compute_params(lp: ValidatedLP, mode: str = "exact") -> Params:
    """Derive the worst-case parameters, with exact or bounded subdeterminants.

    ``mode="exact"`` enumerates all square submatrices (only permitted for
    n <= EXACT_SUBDET_CAP); ``mode="bound"`` uses the closed form.
    """
    if mode not in ("exact", "bound"):
        raise ValueError(f"mode must be 'exact' or 'bound', got {mode!r}")
    cost_sum = int(lp.c_int.sum())
    if mode == "exact":
        if lp.n > EXACT_SUBDET_CAP:
            raise ExactTooLargeError(
                f"exact subdeterminant enumeration capped at n <= {EXACT_SUBDET_CAP}, got n={lp.n}"
            )
        from .oracle import max_subdeterminant

        d = float(max_subdeterminant(lp.A_int, mode="exact"))
        exact = True
    else:
        d = float(subdet_upper_bound(lp.A_int))
        exact = False
    return Params(
        cost_sum=cost_sum,
        subdet_max=d,
        subdet_exact=exact,
        potential_ratio_bound=cost_sum * d + 1.0,
        flux_bound=d * d * lp.n * float(np.abs(lp.b_int).sum()),
        m=lp.m,
        n=lp.n,
    )


def default_params(lp: ValidatedLP) -> Params:
    """Exact parameters when the instance is small enough, else the bound."""
    mode = "exact" if lp.n <= EXACT_SUBDET_CAP else "bound"
    return compute_params(lp, mode)

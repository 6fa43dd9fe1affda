"""Dense linear-algebra kernels: SPD solves and kernel bases.

Sizes here are tiny (m is the constraint count), so the Cholesky
factorization is written out directly. That keeps the positive-pivot
tolerance under our control instead of whatever a library default does.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotPositiveDefiniteError, RankDeficientError

# A pivot this small relative to the mean diagonal means the matrix has
# effectively collapsed onto a boundary face.
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class SpdFactorization:
    """Lower-triangular Cholesky factor of a symmetric positive definite matrix."""

    lower: np.ndarray

    @property
    def size(self) -> int:
        return self.lower.shape[0]

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        y = scipy.linalg.solve_triangular(self.lower, rhs, lower=True, check_finite=False)
        return scipy.linalg.solve_triangular(self.lower.T, y, lower=False, check_finite=False)

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.lower.T


def spd_factor(mat: np.ndarray, pivot_rtol: float = PIVOT_RTOL) -> SpdFactorization:
    """Factor a symmetric positive definite matrix.

    Raises NotPositiveDefiniteError when a pivot falls at or below
    ``pivot_rtol * trace / m``.
    """
    M = np.asarray(mat, dtype=float)
    m = M.shape[0]
    if M.shape != (m, m):
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    tol = pivot_rtol * float(np.trace(M)) / m
    low = np.zeros_like(M)
    for j in range(m):
        d = M[j, j] - low[j, :j] @ low[j, :j]
        if not d > tol:
            raise NotPositiveDefiniteError(f"pivot {d:.3e} at index {j} (tolerance {tol:.3e})")
        low[j, j] = np.sqrt(d)
        if j + 1 < m:
            low[j + 1 :, j] = (M[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
    return SpdFactorization(lower=low)


def spd_solve(mat: np.ndarray, rhs: np.ndarray, pivot_rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Solve ``mat @ x = rhs`` for symmetric positive definite ``mat``."""
    return spd_factor(mat, pivot_rtol).solve(np.asarray(rhs, dtype=float))


def kernel_basis(A: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the null space of A, as columns.

    Uses a column-pivoted orthogonal triangularization of A transpose; the
    trailing n - m columns of the orthogonal factor span the kernel. Raises
    RankDeficientError when A does not have full row rank.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    q, r, _ = scipy.linalg.qr(A.T, pivoting=True)
    diag = np.abs(np.diag(r)[:m]) if m else np.array([])
    scale = max(n, m) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    if m and (diag.size < m or np.any(diag <= max(scale, 0.0))):
        raise RankDeficientError("A does not have full row rank")
    return q[:, m:]

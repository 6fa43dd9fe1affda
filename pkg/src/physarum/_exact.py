"""Exact integer/rational helpers for small systems.

Everything here works on plain Python ints and Fractions so that the
brute-force oracle and the structural checks can be carried out without
rounding. Sizes are desk scale (a handful of rows, at most a few dozen
columns), so simple elimination is plenty.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def det_int(rows: list[list[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free elimination)."""
    n = len(rows)
    if n == 0:
        return 1
    m = [[int(v) for v in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def max_abs_subdeterminant(A: list[list[int]]) -> int:
    """Largest absolute determinant over all square submatrices of A.

    Exhaustive over every row subset and column subset of equal size.
    Exponential in the smaller dimension; callers cap the instance size.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    best = 0
    for k in range(1, min(m, n) + 1):
        for rows in combinations(range(m), k):
            sub = [A[r] for r in rows]
            for cols in combinations(range(n), k):
                d = det_int([[row[c] for c in cols] for row in sub])
                if abs(d) > best:
                    best = abs(d)
    return best


def rank_int(rows: list[list[int]]) -> int:
    """Exact rank of an integer matrix via rational elimination."""
    m = [[Fraction(v) for v in r] for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    rank = 0
    row = 0
    for col in range(n_cols):
        piv = next((r for r in range(row, n_rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        for r in range(n_rows):
            if r != row and m[r][col] != 0:
                f = m[r][col] / pv
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == n_rows:
            break
    return rank


def solve_unique(mat, rhs) -> list[Fraction] | None:
    """Solve ``mat @ z = rhs`` exactly, requiring a unique solution.

    ``mat`` is r x k (r >= k) with integer or Fraction entries. Returns the
    solution as Fractions, or None when the columns are dependent (solution
    not unique) or the system is inconsistent.
    """
    n_rows = len(mat)
    n_cols = len(mat[0]) if n_rows else 0
    aug = [[Fraction(mat[i][j]) for j in range(n_cols)] + [Fraction(rhs[i])] for i in range(n_rows)]
    row = 0
    for col in range(n_cols):
        piv = next((r for r in range(row, n_rows) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][col]
        aug[row] = [a / pv for a in aug[row]]
        for r in range(n_rows):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        row += 1
    for r in range(row, n_rows):
        if aug[r][n_cols] != 0:
            return None
    return [aug[i][n_cols] for i in range(n_cols)]

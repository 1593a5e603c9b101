"""Small dense linear algebra: pivoted LU, solves, row-submatrix inverses.

Matrices are plain 2-D float64 numpy arrays. Every matrix handled here is at
most (m_r + 1) square with m_r <= 24, so the routines favour clarity and a
well-defined singularity test over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrix

#: relative pivot threshold, measured against the largest initial entry of the pivot column
PIVOT_RTOL = 1e-13


def as_matrix(A) -> np.ndarray:
    A = np.array(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


@dataclass(frozen=True)
class LUFactor:
    """Packed factorization P A = L U (unit lower L stored below the diagonal)."""

    lu: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    def solve(self, B) -> np.ndarray:
        B = np.asarray(B, dtype=float)
        vector = B.ndim == 1
        X = (B[:, None] if vector else B)[self.perm].copy()
        if X.shape[0] != self.n:
            raise ValueError(f"right-hand side has {X.shape[0]} rows, expected {self.n}")
        lu = self.lu
        for i in range(1, self.n):
            X[i] -= lu[i, :i] @ X[:i]
        for i in range(self.n - 1, -1, -1):
            X[i] = (X[i] - lu[i, i + 1:] @ X[i + 1:]) / lu[i, i]
        return X[:, 0] if vector else X


def lu_factor(A) -> LUFactor:
    """LU factorization with partial (row) pivoting.

    Raises SingularMatrix when the best available pivot in column k is
    smaller than PIVOT_RTOL times the largest magnitude of column k of A.
    """
    A = as_matrix(A)
    n, ncols = A.shape
    if n != ncols:
        raise ValueError(f"matrix must be square, got {A.shape}")
    lu = A.copy()
    perm = np.arange(n)
    colmax = np.abs(A).max(axis=0) if n else np.zeros(0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = abs(lu[p, k])
        if colmax[k] == 0.0 or pivot < PIVOT_RTOL * colmax[k]:
            raise SingularMatrix(f"pivot {pivot:.3e} in column {k} below threshold")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return LUFactor(lu, perm)


def lu_solve(A, B) -> np.ndarray:
    """Solve A X = B. ``A`` may be a matrix or an existing LUFactor."""
    factor = A if isinstance(A, LUFactor) else lu_factor(A)
    B = np.asarray(B, dtype=float)
    if B.shape[0] != factor.n:
        raise ValueError(f"B has {B.shape[0]} rows, A has {factor.n}")
    return factor.solve(B)


def inverse(A) -> np.ndarray:
    A = as_matrix(A)
    return lu_solve(A, np.eye(A.shape[0]))


def inverse_of_rows(A, rows) -> np.ndarray:
    """Inverse of the square submatrix A[rows, :]."""
    return inverse(as_matrix(A)[np.asarray(rows, dtype=int), :])


def inf_norm(A) -> float:
    """Maximum absolute row sum."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.size == 0:
        return 0.0
    return float(np.abs(A).sum(axis=1).max())

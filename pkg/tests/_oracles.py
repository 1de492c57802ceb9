"""Independent oracles used to freeze expected values.

These deliberately avoid the library's solve path: the power series
sum_k A^k y converges to the Leontief solution for any productive A, so it
checks the LU-based solver against nothing but matrix multiplication.
"""

from __future__ import annotations

import math

import numpy as np


def power_series_solve(A: np.ndarray, y: np.ndarray, col_bound: float = 0.7,
                       tol: float = 1e-9) -> np.ndarray:
    """Truncated Neumann series sum_{k<=K} A^k y with K chosen so
    col_bound**K < tol (column sums bound the spectral radius)."""
    K = math.ceil(math.log(tol) / math.log(col_bound))
    total = y.astype(float).copy()
    term = y.astype(float).copy()
    for _ in range(K):
        term = A @ term
        total += term
    return total


def random_productive_matrix(rng: np.random.Generator, n: int,
                             max_col_sum: float = 0.6) -> np.ndarray:
    """Nonnegative matrix with column sums scaled to at most max_col_sum."""
    A = rng.uniform(0.0, 1.0, size=(n, n))
    targets = rng.uniform(0.1, max_col_sum, size=n)
    return A * (targets / A.sum(axis=0))


def relative_error(actual: np.ndarray, expected: np.ndarray) -> float:
    scale = float(np.max(np.abs(expected)))
    if scale == 0.0:
        return float(np.max(np.abs(actual)))
    return float(np.max(np.abs(actual - expected))) / scale

"""Numerical kernels for demand-driven input-output analysis.

The quantity model used throughout the package:

    A = Z @ diag(x)^-1        input shares per unit of output
    (I - A) @ q = y           gross output q required for final demand y
    s = e / x                 impact intensity per unit of output
    footprint = s @ q         total impact embodied in y

All kernels are pure functions of immutable inputs and may be called
concurrently. Solves default to a reusable LU factorization of (I - A);
the explicit inverse is an opt-in mode for large batches of demand vectors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import DimensionMismatch, NegativeEntry, UnproductiveEconomy

# Output below this level (in output units) marks a sector as inactive; its
# coefficient column and intensities are zeroed instead of dividing by ~0.
ZERO_OUTPUT_EPS = 1e-9

# Residual tolerance for accepting a Leontief solve: ||q - A q - y||_inf
# relative to max(1, ||y||_inf).
SOLVE_RESIDUAL_RTOL = 1e-10

# Per-entry tolerance on (I - A) @ L == I when building the explicit inverse.
INVERSE_IDENTITY_ATOL = 1e-9

# An economy is flagged productive when the spectral radius estimate is
# below 1 - PRODUCTIVITY_MARGIN.
PRODUCTIVITY_MARGIN = 1e-6

MODE_FACTORIZED = "factorized-solve"
MODE_EXPLICIT = "explicit-inverse"


def _as_square(matrix: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def _as_vector(values: np.ndarray, dim: int, name: str) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.shape[0] != dim:
        raise DimensionMismatch(f"{name} must be a vector of length {dim}, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class TechnicalCoefficients:
    """Unitless input shares A with A[i, j] = Z[i, j] / x[j].

    Columns of inactive sectors (output <= eps) are all-zero.
    ``column_sum_violations`` reports columns whose sum is >= 1, a necessary
    (Hawkins-Simon) signal that the economy may be unproductive; it is a
    report, not an error, because the solver guards itself.
    """

    entries: np.ndarray
    dim: int
    column_sum_violations: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=float))
        if self.entries.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"coefficient matrix shape {self.entries.shape} != ({self.dim}, {self.dim})"
            )


@dataclass(frozen=True)
class IntensityVector:
    """Per-sector impact per unit of output (extension unit / monetary unit)."""

    values: np.ndarray
    extension_name: str = ""
    unit: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


def technical_coefficients(Z: np.ndarray, x: np.ndarray,
                           zero_output_eps: float = ZERO_OUTPUT_EPS) -> TechnicalCoefficients:
    """Build A = Z @ diag(x)^-1, zeroing columns of inactive sectors."""
    Zm = _as_square(Z, "Z")
    n = Zm.shape[0]
    xv = _as_vector(x, n, "x")
    if np.any(Zm < 0):
        i, j = np.argwhere(Zm < 0)[0]
        raise NegativeEntry(f"Z[{i}][{j}] = {Zm[i, j]} is negative")
    if np.any(xv < 0):
        i = int(np.argmin(xv))
        raise NegativeEntry(f"x[{i}] = {xv[i]} is negative")

    active = xv > zero_output_eps
    scale = np.zeros(n)
    scale[active] = 1.0 / xv[active]
    A = Zm * scale[np.newaxis, :]
    col_sums = A.sum(axis=0)
    violations = tuple(int(j) for j in np.nonzero(col_sums >= 1.0)[0])
    return TechnicalCoefficients(entries=A, dim=n, column_sum_violations=violations)


@dataclass(frozen=True)
class ProductivityEstimate:
    """Power-iteration estimate of the spectral radius of A."""

    spectral_radius: float
    converged: bool
    iterations: int
    margin: float = PRODUCTIVITY_MARGIN

    @property
    def productive(self) -> bool | None:
        """True/False once converged; None (indeterminate) otherwise."""
        if not self.converged:
            return None
        return self.spectral_radius < 1.0 - self.margin


def productivity_check(A: TechnicalCoefficients | np.ndarray, tol: float = 1e-4,
                       margin: float = PRODUCTIVITY_MARGIN,
                       max_iterations: int = 5000) -> ProductivityEstimate:
    """Estimate the spectral radius of a nonnegative matrix by power iteration.

    Non-convergence within ``max_iterations`` is reported (converged=False,
    best estimate retained) rather than raised, so callers can treat the
    result as indeterminate.
    """
    matrix = A.entries if isinstance(A, TechnicalCoefficients) else _as_square(A, "A")
    n = matrix.shape[0]
    v = np.full(n, 1.0 / max(n, 1))
    estimate = 0.0
    for k in range(1, max_iterations + 1):
        w = matrix @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            # v landed in the kernel; for nonnegative A with a positive start
            # vector this means rho(A) = 0.
            return ProductivityEstimate(0.0, converged=True, iterations=k, margin=margin)
        previous, estimate = estimate, norm / float(np.linalg.norm(v))
        v = w / norm
        if k > 1 and abs(estimate - previous) <= tol * max(estimate, 1.0):
            return ProductivityEstimate(estimate, converged=True, iterations=k, margin=margin)
    return ProductivityEstimate(estimate, converged=False, iterations=max_iterations, margin=margin)


class LeontiefOperator:
    """Reusable representation of (I - A)^-1.

    ``factorized-solve`` mode stores an LU factorization and solves per
    demand vector; ``explicit-inverse`` mode stores L itself. Both modes
    expose ``apply`` and verify their results against the defining system.
    Instances are immutable after construction and safe to share.
    """

    def __init__(self, coefficients: TechnicalCoefficients, mode: str,
                 lu: tuple | None = None, inverse: np.ndarray | None = None):
        self._A = coefficients.entries
        self.dim = coefficients.dim
        self.mode = mode
        self._lu = lu
        self._inverse = inverse

    @property
    def matrix(self) -> np.ndarray:
        """The explicit Leontief inverse (explicit-inverse mode only)."""
        if self._inverse is None:
            raise ValueError("operator was built in factorized-solve mode; no explicit matrix")
        return self._inverse

    def apply(self, y: np.ndarray) -> np.ndarray:
        """Solve (I - A) q = y and return q, with a residual check."""
        yv = _as_vector(y, self.dim, "y")
        with np.errstate(all="ignore"):
            if self.mode == MODE_FACTORIZED:
                q = lu_solve(self._lu, yv)
            else:
                q = self._inverse @ yv
        _check_solution(self._A, q, yv)
        return q


def _check_solution(A: np.ndarray, q: np.ndarray, y: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(y))) if y.size else 1.0)
    with np.errstate(all="ignore"):
        residual = q - A @ q - y
    worst = float(np.max(np.abs(residual))) if residual.size else 0.0
    if not np.isfinite(worst) or worst > SOLVE_RESIDUAL_RTOL * scale:
        raise UnproductiveEconomy(
            f"Leontief solve failed the residual check (|r| = {worst:.3e}); "
            "the coefficient matrix is singular or has spectral radius >= 1"
        )
    # Gross output must cover final demand; a shortfall on nonnegative demand
    # is the signature of an unproductive economy even when the system solves.
    if y.size and np.min(y) >= 0.0 and np.min(q - y) < -SOLVE_RESIDUAL_RTOL * scale:
        raise UnproductiveEconomy(
            "gross output falls below final demand; spectral radius >= 1"
        )


def _quiet_lu_factor(system: np.ndarray):
    # Singular systems surface as UnproductiveEconomy via the residual
    # checks; scipy's warning would just be noise before that.
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", LinAlgWarning)
        return lu_factor(system, check_finite=False)


def factorize(A: TechnicalCoefficients) -> LeontiefOperator:
    """LU-factorize (I - A) for repeated solves (the default solve strategy)."""
    return LeontiefOperator(A, MODE_FACTORIZED, lu=_quiet_lu_factor(np.eye(A.dim) - A.entries))


def leontief_inverse(A: TechnicalCoefficients) -> LeontiefOperator:
    """Materialize L = (I - A)^-1 (opt-in mode for many-demand batch runs)."""
    system = np.eye(A.dim) - A.entries
    lu = _quiet_lu_factor(system)
    with np.errstate(all="ignore"):
        L = lu_solve(lu, np.eye(A.dim))
        identity_gap = np.max(np.abs(system @ L - np.eye(A.dim))) if A.dim else 0.0
    if not np.isfinite(identity_gap) or identity_gap > INVERSE_IDENTITY_ATOL:
        raise UnproductiveEconomy(
            f"(I - A) L deviates from I by {identity_gap:.3e}; "
            "the coefficient matrix is singular or has spectral radius >= 1"
        )
    return LeontiefOperator(A, MODE_EXPLICIT, lu=lu, inverse=L)


def leontief_solve(A: TechnicalCoefficients, y: np.ndarray) -> np.ndarray:
    """One-shot solve of (I - A) q = y.

    Callers with several demand vectors should hold on to ``factorize(A)``
    and call ``apply`` instead of re-factorizing per solve.
    """
    return factorize(A).apply(y)


def intensity(e: np.ndarray, x: np.ndarray, extension_name: str = "", unit: str = "",
              zero_output_eps: float = ZERO_OUTPUT_EPS) -> IntensityVector:
    """Per-unit-of-output impact s = e / x, zero where output is zero."""
    ev = np.asarray(e, dtype=float)
    xv = np.asarray(x, dtype=float)
    if ev.shape != xv.shape or ev.ndim != 1:
        raise DimensionMismatch(
            f"extension row shape {ev.shape} does not match output shape {xv.shape}"
        )
    active = xv > zero_output_eps
    values = np.zeros_like(ev)
    values[active] = ev[active] / xv[active]
    return IntensityVector(values=values, extension_name=extension_name, unit=unit)


def footprint_total(s: IntensityVector | np.ndarray, q: np.ndarray) -> float:
    """Total impact s . q embodied in the output vector q."""
    sv = s.values if isinstance(s, IntensityVector) else np.asarray(s, dtype=float)
    qv = np.asarray(q, dtype=float)
    if sv.shape != qv.shape:
        raise DimensionMismatch(f"intensity shape {sv.shape} != output shape {qv.shape}")
    return float(sv @ qv)


def footprint_by_source(s: IntensityVector | np.ndarray, q: np.ndarray) -> np.ndarray:
    """Per producing region-sector contributions s[j] * q[j]."""
    sv = s.values if isinstance(s, IntensityVector) else np.asarray(s, dtype=float)
    qv = np.asarray(q, dtype=float)
    if sv.shape != qv.shape:
        raise DimensionMismatch(f"intensity shape {sv.shape} != output shape {qv.shape}")
    return sv * qv

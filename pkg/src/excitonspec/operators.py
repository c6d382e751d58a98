"""Dense complex operator algebra on small Hilbert spaces.

Operators are plain complex numpy matrices; dimensions of interest are
tiny (<= 16), so everything is dense and copies are cheap.  Density
matrices get a dedicated wrapper that enforces Hermiticity, unit trace
and positivity within a tolerance.  Perturbative intermediates (nested
commutator terms) are *not* valid states; they are passed around as bare
arrays, the ``LiouvilleVector`` alias below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Default validation tolerance; generous double-precision headroom for dim <= 16.
DEFAULT_TOL = 1e-10

#: Perturbative intermediate in Liouville space: any finite complex matrix.
LiouvilleVector = np.ndarray


class StateValidationError(ValueError):
    """A matrix failed one of the density-matrix requirements."""


class NotHermitianError(StateValidationError):
    def __init__(self, deviation: float):
        self.deviation = float(deviation)
        super().__init__(
            f"matrix is not Hermitian: max |rho - adjoint(rho)| = {self.deviation:.3e}"
        )


class TraceNotOneError(StateValidationError):
    def __init__(self, deviation: float):
        self.deviation = float(deviation)
        super().__init__(f"trace differs from one by {self.deviation:.3e}")


class NotPositiveError(StateValidationError):
    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(f"smallest eigenvalue is {self.min_eigenvalue:.3e} < 0")


def as_operator(a: np.ndarray) -> np.ndarray:
    """Coerce to a square, finite complex matrix (a fresh copy)."""
    arr = np.array(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("operator entries must be finite")
    return arr


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``a @ b - b @ a``."""
    a = as_operator(a)
    b = as_operator(b)
    _check_same_dim(a, b)
    return a @ b - b @ a


def expectation(obs: np.ndarray, rho: np.ndarray) -> complex:
    """Return ``trace(obs @ rho)``; ``rho`` may be a DensityMatrix or array."""
    obs = as_operator(obs)
    rho = state_matrix(rho)
    _check_same_dim(obs, rho)
    return complex(np.trace(obs @ rho))


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose, as a new array."""
    return as_operator(a).conj().T.copy()


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state.

    Construction checks, in order: Hermiticity, unit trace, positivity,
    each within ``tol``.  The wrapped array is copied and frozen, so
    instances are safe to share across threads.
    """

    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.tol < 0:
            raise ValueError("tolerance must be non-negative")
        arr = as_operator(self.matrix)
        herm_dev = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
        if herm_dev > self.tol:
            raise NotHermitianError(herm_dev)
        trace_dev = abs(complex(np.trace(arr)) - 1.0)
        if trace_dev > self.tol:
            raise TraceNotOneError(trace_dev)
        # Hermitian eigendecomposition instead of Cholesky: an informative
        # magnitude is reported for the failure, not just yes/no.
        evals = np.linalg.eigvalsh(0.5 * (arr + arr.conj().T))
        if evals.size and evals[0] < -self.tol:
            raise NotPositiveError(float(evals[0]))
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def validate_density(rho: np.ndarray, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Validate ``rho`` as a density matrix or raise a StateValidationError."""
    return DensityMatrix(rho, tol)


def state_matrix(state) -> np.ndarray:
    """Unwrap a DensityMatrix, or coerce an array, into a square matrix."""
    if isinstance(state, DensityMatrix):
        return np.array(state.matrix, dtype=complex)
    return as_operator(state)

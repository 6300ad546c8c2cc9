"""Dense complex linear algebra used by the walk simulations.

Composite walker-coin matrices use a walker-major layout: the flat index of
``|n> (x) |s>`` is ``2 * n + s``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import tolerances

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class ToleranceError(ValueError):
    """A matrix failed a structural check (Hermitian, unitary, unit norm...)."""

    def __init__(self, what: str, violation: float, tol: float):
        self.what = what
        self.violation = float(violation)
        self.tol = float(tol)
        super().__init__(f"{what}: violation {self.violation:.3e} exceeds tolerance {self.tol:.1e}")


class BlochVector(NamedTuple):
    dx: float
    dy: float
    dz: float

    @classmethod
    def from_array(cls, v) -> "BlochVector":
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > tolerances.BLOCH_NORM_TOL:
            raise ToleranceError("Bloch vector norm", abs(norm - 1.0), tolerances.BLOCH_NORM_TOL)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


def hermiticity_error(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def is_hermitian(h: np.ndarray, tol: float | None = None) -> bool:
    return hermiticity_error(h) <= (tolerances.HERMITIAN_TOL if tol is None else tol)


def is_unitary(u: np.ndarray, tol: float | None = None) -> bool:
    return unitarity_error(u) <= (tolerances.UNITARY_TOL if tol is None else tol)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def hermitian_eig(h: np.ndarray, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of ``h``.

    Raises :class:`ToleranceError` if ``h`` is not Hermitian to within ``tol``
    (max-entry deviation of ``h - h^dagger``).
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    tol = tolerances.HERMITIAN_TOL if tol is None else tol
    err = hermiticity_error(h)
    if err > tol:
        raise ToleranceError("Hermiticity", err, tol)
    # symmetrise so the solver sees an exactly Hermitian input
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def expm_hermitian(h: np.ndarray, t: float = 1.0, tol: float | None = None) -> np.ndarray:
    """``exp(-i t h)`` for Hermitian ``h`` through its eigendecomposition."""
    w, v = hermitian_eig(h, tol)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def trace_norm(h: np.ndarray, tol: float | None = None) -> float:
    w, _ = hermitian_eig(h, tol)
    return float(np.sum(np.abs(w)))


def partial_transpose_walker(rho: np.ndarray, d: int) -> np.ndarray:
    """Transpose the walker factor of a ``2d x 2d`` walker-major matrix.

    Entry ``((n, s), (n', s'))`` of the result is entry ``((n', s), (n, s'))``
    of the input.
    """
    rho = np.asarray(rho)
    if rho.shape != (2 * d, 2 * d):
        raise ValueError(f"expected shape {(2 * d, 2 * d)}, got {rho.shape}")
    return rho.reshape(d, 2, d, 2).transpose(2, 1, 0, 3).reshape(2 * d, 2 * d)


def pauli_rotation(epsilon: float, n) -> np.ndarray:
    """Closed form of ``exp(-i epsilon n.sigma)`` for a unit axis ``n``."""
    nx, ny, nz = (float(c) for c in n)
    norm = np.sqrt(nx * nx + ny * ny + nz * nz)
    if abs(norm - 1.0) > tolerances.BLOCH_NORM_TOL:
        raise ToleranceError("rotation axis norm", abs(norm - 1.0), tolerances.BLOCH_NORM_TOL)
    n_sigma = nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z
    return np.cos(epsilon) * I2 - 1j * np.sin(epsilon) * n_sigma

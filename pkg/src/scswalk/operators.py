"""Coin, shift, DTQW and SCS operators on a cycle of ``d`` sites.

Walk operators are returned as dense ``2d x 2d`` matrices in the *site*
basis ``|n> (x) |s>``.  In the phase-space realization the sites are the
phase states ``|phi_n> = sum_m exp(i 2 pi n m / d) |m> / sqrt(d)`` of a
truncated oscillator, and states are stored in the number (Fock) basis
``|m> (x) |s>``.  :func:`to_number_basis` and :func:`to_site_basis` convert
an operator between the two.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .qmath import I2, SIGMA_X, SIGMA_Z, ToleranceError, expm_hermitian, kron, pauli_rotation


class TruncationWarning(UserWarning):
    """Most of a coherent state's weight lies beyond the truncated Fock space."""


@dataclass(frozen=True)
class WalkConfig:
    d: int
    theta: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-15:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")


@dataclass(frozen=True)
class ScsParams:
    """Angles of one SCS step: ``u1`` per-quantum rotation, ``u2`` coin rotation."""

    u1: float
    u2: float

    def __post_init__(self):
        if not (math.isfinite(self.u1) and math.isfinite(self.u2)):
            raise ValueError(f"SCS angles must be finite, got ({self.u1}, {self.u2})")

    @classmethod
    def nominal(cls, d: int, theta: float) -> "ScsParams":
        """Coin and shift generators of the DTQW simply added together."""
        return cls(2 * math.pi / d, theta)

    @classmethod
    def reference(cls, d: int) -> "ScsParams":
        """Reference fit (1.3650 * 2pi/d, 15.9462 * pi/4) for the Hadamard walk at d=31, l0=50."""
        return cls(1.3650 * 2 * math.pi / d, 15.9462 * math.pi / 4)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit vector on walker (x) coin, Fock basis, walker-major (index 2m+s)."""

    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.shape != (2 * self.d,):
            raise ValueError(f"expected {2 * self.d} amplitudes, got {amp.shape[0]}")
        err = abs(float(np.linalg.norm(amp)) - 1.0)
        if err > tolerances.STATE_NORM_TOL:
            raise ToleranceError("state norm", err, tolerances.STATE_NORM_TOL)
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def walker_coin(self) -> np.ndarray:
        """Amplitudes reshaped to ``(d, 2)``."""
        return self.amplitudes.reshape(self.d, 2)

    def with_phase(self, phi: float) -> "StateVector":
        return StateVector(self.d, np.exp(1j * phi) * self.amplitudes)


def build_coin(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def build_shift(d: int) -> np.ndarray:
    """Spin-conditioned shift: ``|n,0> -> |n+1,0>``, ``|n,1> -> |n-1,1>`` (mod d)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    s = np.zeros((2 * d, 2 * d), dtype=complex)
    for n in range(d):
        s[2 * ((n + 1) % d), 2 * n] = 1.0
        s[2 * ((n - 1) % d) + 1, 2 * n + 1] = 1.0
    return s


def build_dtqw(cfg: WalkConfig) -> np.ndarray:
    return build_shift(cfg.d) @ kron(np.eye(cfg.d), build_coin(cfg.theta))


def phase_distribution_basis(d: int) -> np.ndarray:
    """DFT matrix whose column ``n`` is ``|phi_n>`` written in the number basis."""
    m = np.arange(d)
    return np.exp(2j * np.pi * np.outer(m, m) / d) / math.sqrt(d)


def to_number_basis(u: np.ndarray, d: int) -> np.ndarray:
    f = kron(phase_distribution_basis(d), I2)
    return f @ u @ f.conj().T


def to_site_basis(u: np.ndarray, d: int) -> np.ndarray:
    f = kron(phase_distribution_basis(d), I2)
    return f.conj().T @ u @ f


def scs_blocks(d: int, p: ScsParams) -> np.ndarray:
    """The ``d`` 2x2 blocks ``exp(i u1 m sigma_z - i u2 sigma_x)``, m = 0..d-1."""
    blocks = np.empty((d, 2, 2), dtype=complex)
    for m in range(d):
        a = p.u1 * m
        eps = math.hypot(a, p.u2)
        if eps == 0.0:
            blocks[m] = I2
        else:
            blocks[m] = pauli_rotation(eps, (p.u2 / eps, 0.0, -a / eps))
    return blocks


def dtqw_blocks(cfg: WalkConfig) -> np.ndarray:
    """Number-basis blocks ``exp(i k sigma_z) C(theta)`` with k = 2 pi m / d."""
    coin = build_coin(cfg.theta)
    k = 2 * np.pi * np.arange(cfg.d) / cfg.d
    phases = np.stack([np.exp(1j * k), np.exp(-1j * k)], axis=1)
    return phases[:, :, None] * coin[None, :, :]


def block_diag(blocks: np.ndarray) -> np.ndarray:
    d = blocks.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    for m in range(d):
        out[2 * m:2 * m + 2, 2 * m:2 * m + 2] = blocks[m]
    return out


def build_scs(d: int, p: ScsParams) -> np.ndarray:
    return to_site_basis(block_diag(scs_blocks(d, p)), d)


def coherent_retained_fraction(alpha: complex, d: int) -> float:
    """Weight of ``|alpha>`` on the first ``d`` number states."""
    r2 = abs(alpha) ** 2
    if r2 == 0.0:
        return 1.0
    m = np.arange(d)
    logw = -r2 + m * math.log(r2) - np.array([math.lgamma(k + 1) for k in m])
    return float(np.sum(np.exp(logw)))


def coherent_state(alpha: complex, d: int, coin_s: int = 0) -> StateVector:
    """Truncated, renormalised coherent state ``|alpha> (x) |coin_s>``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if coin_s not in (0, 1):
        raise ValueError("coin_s must be 0 or 1")
    alpha = complex(alpha)
    walker = np.zeros(d, dtype=complex)
    if alpha == 0:
        walker[0] = 1.0
    else:
        m = np.arange(d)
        logmag = m * math.log(abs(alpha)) - 0.5 * np.array([math.lgamma(k + 1) for k in m])
        walker = np.exp(logmag - logmag.max() + 1j * m * np.angle(alpha))
        retained = coherent_retained_fraction(alpha, d)
        if retained < 0.5:
            warnings.warn(
                f"truncation to d={d} keeps only {retained:.3f} of |alpha={alpha}>",
                TruncationWarning,
                stacklevel=2,
            )
    walker /= np.linalg.norm(walker)
    amp = np.zeros((d, 2), dtype=complex)
    amp[:, coin_s] = walker
    return StateVector(d, amp.reshape(-1))


def number_state(m: int, d: int, coin_s: int = 0) -> StateVector:
    amp = np.zeros((d, 2), dtype=complex)
    amp[m, coin_s] = 1.0
    return StateVector(d, amp.reshape(-1))


def phase_state(n: int, d: int, coin_s: int = 0) -> StateVector:
    amp = np.zeros((d, 2), dtype=complex)
    amp[:, coin_s] = phase_distribution_basis(d)[:, n]
    return StateVector(d, amp.reshape(-1))


def shift_hamiltonian(d: int) -> np.ndarray:
    """Site-basis generator ``H_S`` with ``exp(-i H_S) = build_shift(d)``."""
    k = 2 * np.pi * np.arange(d) / d
    return to_site_basis(-kron(np.diag(k), SIGMA_Z), d)


def coin_hamiltonian(theta: float) -> np.ndarray:
    return theta * SIGMA_X


def trotter_defect(cfg: WalkConfig, n: int) -> float:
    """Max-entry distance between the n-slice Trotter product and ``exp(-i(H_S + 1 (x) H_C))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    h_s = shift_hamiltonian(cfg.d)
    h_c = kron(np.eye(cfg.d), coin_hamiltonian(cfg.theta))
    step = expm_hermitian(h_s, 1.0 / n, tol=1e-10) @ expm_hermitian(h_c, 1.0 / n)
    product = np.linalg.matrix_power(step, n)
    exact = expm_hermitian(h_s + h_c, tol=1e-10)
    return float(np.max(np.abs(product - exact)))

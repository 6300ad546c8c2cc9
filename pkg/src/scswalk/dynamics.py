"""Pure and dephased walk dynamics, phase distributions, spread and negativity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import tolerances
from .operators import StateVector, phase_distribution_basis, to_number_basis
from .qmath import ToleranceError, hermitian_eig, kron, partial_transpose_walker, trace_norm


@dataclass(frozen=True, eq=False)
class PhaseDistribution:
    """Walker probabilities on the phase sites ``phi_n = 2 pi n / d``."""

    d: int
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).reshape(-1)
        if p.shape != (self.d,):
            raise ValueError(f"expected {self.d} probabilities, got {p.shape[0]}")
        if np.any(p < -tolerances.CLIP_TOL):
            raise ToleranceError("negative probability", -float(p.min()), tolerances.CLIP_TOL)
        p = np.clip(p, 0.0, None)
        err = abs(float(p.sum()) - 1.0)
        if err > tolerances.DISTRIBUTION_SUM_TOL:
            raise ToleranceError("distribution sum", err, tolerances.DISTRIBUTION_SUM_TOL)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def phi(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.d) / self.d


@dataclass(frozen=True, eq=False)
class DensityOperator:
    d: int
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (2 * self.d, 2 * self.d):
            raise ValueError(f"expected shape {(2 * self.d, 2 * self.d)}, got {rho.shape}")
        tr_err = abs(complex(np.trace(rho)) - 1.0)
        if tr_err > tolerances.DENSITY_TRACE_TOL:
            raise ToleranceError("density trace", tr_err, tolerances.DENSITY_TRACE_TOL)
        w, _ = hermitian_eig(rho, tolerances.DENSITY_HERMITIAN_TOL)
        if w[0] < tolerances.DENSITY_MIN_EIG:
            raise ToleranceError("density positivity", -float(w[0]), -tolerances.DENSITY_MIN_EIG)
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def from_state(cls, psi: StateVector) -> "DensityOperator":
        a = psi.amplitudes
        return cls(psi.d, np.outer(a, a.conj()))


LambdaSchedule = Literal["per-step", "cumulative"]


@dataclass(frozen=True)
class DephasingSpec:
    """Coin dephasing with time ``t_dephase`` measured in walk steps.

    ``per-step`` applies the same strength ``1 - exp(-1/T_d)`` every step; after
    ``l`` steps the coin coherence equals that of a single application of
    strength ``1 - exp(-l/T_d)``.  ``cumulative`` applies ``1 - exp(-l/T_d)`` at
    step ``l`` itself.
    """

    t_dephase: float
    schedule: LambdaSchedule = "per-step"

    def __post_init__(self):
        if not self.t_dephase > 0:
            raise ValueError(f"dephasing time must be positive or inf, got {self.t_dephase}")
        if self.schedule not in ("per-step", "cumulative"):
            raise ValueError(f"unknown lambda schedule {self.schedule!r}")

    @property
    def per_step_lambda(self) -> float:
        return self.lambda_at(1)

    def lambda_at(self, step: int) -> float:
        if math.isinf(self.t_dephase):
            return 0.0
        exponent = 1.0 if self.schedule == "per-step" else float(step)
        return -math.expm1(-exponent / self.t_dephase)


def _number_basis_operator(u: np.ndarray, d: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2 * d, 2 * d):
        raise ValueError(f"operator shape {u.shape} does not match d={d}")
    return to_number_basis(u, d)


def evolve_pure(u: np.ndarray, psi0: StateVector, steps: int) -> list[StateVector]:
    """``[psi0, U psi0, ..., U^steps psi0]`` for a site-basis walk operator ``u``."""
    u_num = _number_basis_operator(u, psi0.d)
    out = [psi0]
    psi = psi0.amplitudes
    for _ in range(steps):
        psi = u_num @ psi
        out.append(StateVector(psi0.d, psi))
    return out


def evolve_blocks(blocks: np.ndarray, psi0: StateVector, steps: int) -> np.ndarray:
    """Number-basis amplitudes ``(steps+1, d, 2)`` for a block-diagonal step.

    Fast path for walks that are diagonal in the Fock index (DTQW and SCS).
    """
    out = np.empty((steps + 1, psi0.d, 2), dtype=complex)
    out[0] = psi0.walker_coin()
    for l in range(steps):
        out[l + 1] = np.einsum("mij,mj->mi", blocks, out[l])
    return out


def phase_probabilities(amplitudes: np.ndarray, d: int) -> np.ndarray:
    """Raw phase-site probabilities of number-basis amplitudes ``(..., d, 2)``."""
    f = phase_distribution_basis(d)
    proj = np.einsum("mn,...ms->...ns", f.conj(), amplitudes)
    return np.sum(np.abs(proj) ** 2, axis=-1)


def phase_distribution(psi: StateVector) -> PhaseDistribution:
    return PhaseDistribution(psi.d, phase_probabilities(psi.walker_coin(), psi.d))


def phase_distribution_from_density(rho: DensityOperator) -> PhaseDistribution:
    d = rho.d
    f = phase_distribution_basis(d)
    r = rho.matrix.reshape(d, 2, d, 2)
    p = np.zeros(d)
    for s in (0, 1):
        p += np.real(np.diag(f.conj().T @ r[:, s, :, s] @ f))
    return PhaseDistribution(d, p)


def distribution_std(p: PhaseDistribution) -> float:
    """Linear (non-circular) standard deviation of phi over [0, 2 pi)."""
    phi = p.phi
    mean = float(np.sum(p.p * phi))
    var = float(np.sum(p.p * phi**2)) - mean**2
    return math.sqrt(max(var, 0.0))


def negativity(rho: DensityOperator) -> float:
    pt = partial_transpose_walker(rho.matrix, rho.d)
    # partial transposition keeps the Hermiticity error of rho unchanged
    return 0.5 * (trace_norm(pt, tol=tolerances.DENSITY_HERMITIAN_TOL) - 1.0)


def pure_negativity(psi: StateVector) -> float:
    return negativity(DensityOperator.from_state(psi))


def dephasing_kraus(lam: float) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"dephasing strength must lie in [0, 1], got {lam}")
    e0 = np.diag([1.0, math.sqrt(1.0 - lam)]).astype(complex)
    e1 = np.diag([0.0, math.sqrt(lam)]).astype(complex)
    return e0, e1


def _apply_coin_dephasing(rho: np.ndarray, d: int, lam: float) -> np.ndarray:
    e0, e1 = dephasing_kraus(lam)
    k0 = kron(np.eye(d), e0)
    k1 = kron(np.eye(d), e1)
    return k0 @ rho @ k0.conj().T + k1 @ rho @ k1.conj().T


def evolve_channel(
    u: np.ndarray, rho0: DensityOperator, spec: DephasingSpec, steps: int
) -> list[DensityOperator]:
    """``rho_l = sum_j K_j U rho_{l-1} U^dagger K_j^dagger`` with ``K_j = 1 (x) E_j``."""
    d = rho0.d
    u_num = _number_basis_operator(u, d)
    u_dag = u_num.conj().T
    out = [rho0]
    rho = rho0.matrix
    for l in range(1, steps + 1):
        rho = _apply_coin_dephasing(u_num @ rho @ u_dag, d, spec.lambda_at(l))
        out.append(DensityOperator(d, rho))
    return out

"""Quasi-energy bands, Bloch vectors and winding numbers.

Both walks are block diagonal in momentum; each 2x2 block is written as
``exp(-i eps d.sigma)`` and this module evaluates ``eps`` and ``d`` in closed
form on the grid ``k = 2 pi m / d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import tolerances
from .qmath import BlochVector

Kind = Literal["dtqw", "scs"]


class SingularBlochError(ValueError):
    """The Bloch vector is undefined (the block is proportional to identity)."""


class GridTooCoarseError(ValueError):
    """Neighbouring Bloch vectors are too far apart to fix the winding."""


def dtqw_dispersion(theta: float, ktilde: float) -> float:
    return math.acos(max(-1.0, min(1.0, math.cos(theta) * math.cos(ktilde))))


def dtqw_bloch(theta: float, ktilde: float) -> BlochVector:
    sin_eps = math.sin(dtqw_dispersion(theta, ktilde))
    if sin_eps < tolerances.SINGULAR_SIN_EPS:
        raise SingularBlochError(f"degenerate DTQW block at theta={theta}, k={ktilde}")
    st, ct = math.sin(theta), math.cos(theta)
    ck, sk = math.cos(ktilde), math.sin(ktilde)
    v = np.array([st * ck, -st * sk, -ct * sk]) / sin_eps
    # renormalise away the rounding in sin(arccos(.))
    return BlochVector.from_array(v / np.linalg.norm(v))


def scs_dispersion(theta: float, ktilde: float) -> float:
    return math.hypot(ktilde, theta)


def scs_bloch(theta: float, ktilde: float) -> BlochVector:
    eps = scs_dispersion(theta, ktilde)
    if eps == 0.0:
        raise SingularBlochError("SCS Bloch vector undefined at theta = k = 0")
    return BlochVector(theta / eps, 0.0, -ktilde / eps)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Positive-branch quasi-energies and Bloch vectors on the momentum grid.

    For ``kind="scs"`` the block at grid index m has momentum ``u1 * m`` and coin
    angle ``theta`` (``= u2``); the nominal SCS operator has ``u1 = 2 pi / d``.
    """

    d: int
    theta: float
    kind: Kind
    ktilde: np.ndarray
    epsilon: np.ndarray
    bloch: np.ndarray  # shape (d, 3)

    def plane_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal pair spanning the great circle the Bloch vectors lie on."""
        e1 = np.array([1.0, 0.0, 0.0])
        if self.kind == "dtqw":
            normal = np.array([0.0, math.cos(self.theta), -math.sin(self.theta)])
        else:
            normal = np.array([0.0, -1.0, 0.0])
        return e1, np.cross(normal, e1)


def spectrum(kind: Kind, theta: float, d: int, u1: float | None = None) -> SpectralData:
    m = np.arange(d)
    if kind == "dtqw":
        k = 2 * np.pi * m / d
        eps = np.array([dtqw_dispersion(theta, kk) for kk in k])
        bloch = np.array([dtqw_bloch(theta, kk) for kk in k])
    elif kind == "scs":
        k = (2 * np.pi / d if u1 is None else u1) * m
        eps = np.array([scs_dispersion(theta, kk) for kk in k])
        bloch = np.array([scs_bloch(theta, kk) for kk in k])
    else:
        raise ValueError(f"unknown spectrum kind {kind!r}")
    return SpectralData(d, theta, kind, k, eps, bloch)


def winding_number(data: SpectralData) -> int:
    """Number of turns the Bloch vector makes in its plane as k runs once around."""
    vecs = np.array(data.bloch, dtype=float)
    if len(vecs) == 0:
        return 0
    # closed forms already lie on the continuous positive-eps branch; fix only the global sign
    if vecs[0, 0] < 0:
        vecs = -vecs
    e1, e2 = data.plane_basis()
    angles = np.arctan2(vecs @ e2, vecs @ e1)
    steps = np.diff(np.append(angles, angles[0]))
    steps = (steps + np.pi) % (2 * np.pi) - np.pi
    worst = float(np.max(np.abs(steps)))
    if worst > tolerances.WINDING_MAX_STEP:
        raise GridTooCoarseError(f"Bloch vector jumps by {worst:.3f} rad between grid points")
    return int(round(float(np.sum(steps)) / (2 * np.pi)))

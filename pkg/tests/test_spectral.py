import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scswalk.operators import ScsParams, WalkConfig, build_coin, dtqw_blocks, scs_blocks
from scswalk.qmath import SIGMA_X, SIGMA_Z, pauli_rotation
from scswalk.spectral import (
    GridTooCoarseError,
    SingularBlochError,
    SpectralData,
    dtqw_bloch,
    dtqw_dispersion,
    scs_bloch,
    scs_dispersion,
    spectrum,
    winding_number,
)

D = 31
GRID = [2 * math.pi * k / D for k in range(D)]


def dtqw_block(theta, k):
    return np.diag([np.exp(1j * k), np.exp(-1j * k)]) @ build_coin(theta)


def test_dtqw_dispersion_examples():
    for k in GRID:
        assert dtqw_dispersion(0.0, k) == pytest.approx(abs((k + math.pi) % (2 * math.pi) - math.pi), abs=1e-7)
    assert dtqw_dispersion(math.pi / 4, 0.0) == pytest.approx(math.pi / 4)


def test_dtqw_dispersion_matches_block_eigenvalues():
    theta = math.pi / 4
    for k in GRID:
        eig = np.linalg.eigvals(dtqw_block(theta, k))
        eps = dtqw_dispersion(theta, k)
        expected = sorted([np.exp(1j * eps), np.exp(-1j * eps)], key=lambda z: z.imag)
        got = sorted(eig, key=lambda z: z.imag)
        assert np.allclose(got, expected, atol=1e-10)


def test_dtqw_bloch_examples():
    assert dtqw_bloch(math.pi / 4, 0.0) == pytest.approx((1, 0, 0))
    theta = math.pi / 4
    normal = np.array([0, math.cos(theta), -math.sin(theta)])
    for k in GRID:
        v = np.array(dtqw_bloch(theta, k))
        assert abs(v @ normal) <= 1e-10
        assert abs(np.linalg.norm(v) - 1) <= 1e-10


@pytest.mark.parametrize("theta", [math.pi / 4, 0.3, 1.2])
def test_dtqw_rotation_reconstructs_block(theta):
    for k in GRID:
        u = pauli_rotation(dtqw_dispersion(theta, k), dtqw_bloch(theta, k))
        assert np.max(np.abs(u - dtqw_block(theta, k))) <= 1e-10


def test_dtqw_singular_point():
    with pytest.raises(SingularBlochError):
        dtqw_bloch(0.0, 0.0)


def test_scs_dispersion_and_bloch_examples():
    assert scs_dispersion(0.0, -1.3) == pytest.approx(1.3)
    assert scs_dispersion(math.pi / 4, 0.0) == pytest.approx(math.pi / 4)
    assert scs_bloch(0.7, 0.0) == pytest.approx((1, 0, 0))
    v = scs_bloch(12.52, 2 * math.pi * 30 / 31)
    assert v.dx > 0.89 and v.dy == 0.0
    with pytest.raises(SingularBlochError):
        scs_bloch(0.0, 0.0)


def test_scs_large_theta_limit():
    for theta in (10.0, 100.0, 1000.0):
        v = scs_bloch(theta, 2.0)
        assert v.dx == pytest.approx(1.0, abs=2.5 / theta**2)


def test_scs_band_data_two_branches():
    data = spectrum("scs", math.pi / 4, D)
    assert np.allclose(data.epsilon, np.hypot(GRID, math.pi / 4))


def test_scs_eigenvector_from_beta():
    theta = math.pi / 4
    for k in GRID[1:]:
        eps = scs_dispersion(theta, k)
        cos2 = (1 - k / eps) / 2
        vec = np.array([math.sqrt(cos2), math.sqrt(1 - cos2)])
        block = pauli_rotation(eps, scs_bloch(theta, k))
        out = block @ vec
        lam = np.vdot(vec, out)
        assert np.max(np.abs(out - lam * vec)) <= 1e-10
        assert abs(abs(lam) - 1) <= 1e-12


@pytest.mark.parametrize("kind", ["dtqw", "scs"])
def test_rotation_reproduces_evolution_blocks(kind):
    theta = math.pi / 4
    data = spectrum(kind, theta, D)
    blocks = dtqw_blocks(WalkConfig(D, theta)) if kind == "dtqw" else scs_blocks(D, ScsParams.nominal(D, theta))
    for m in range(D):
        assert np.max(np.abs(pauli_rotation(data.epsilon[m], data.bloch[m]) - blocks[m])) <= 1e-10


def test_spectrum_invariants():
    theta = math.pi / 4
    dt = spectrum("dtqw", theta, D)
    assert np.all((dt.epsilon >= 0) & (dt.epsilon <= math.pi))
    normal = np.array([0, math.cos(theta), -math.sin(theta)])
    assert np.max(np.abs(dt.bloch @ normal)) < 1e-10
    sc = spectrum("scs", theta, D)
    assert np.all(sc.bloch[:, 1] == 0.0)
    for data in (dt, sc):
        assert np.max(np.abs(np.linalg.norm(data.bloch, axis=1) - 1)) <= 1e-10


def test_winding_numbers():
    assert winding_number(spectrum("dtqw", math.pi / 4, D)) == 1
    assert winding_number(spectrum("scs", math.pi / 4, D)) == 0
    assert winding_number(spectrum("scs", 15.9462 * math.pi / 4, D, u1=1.3650 * 2 * math.pi / D)) == 0


def test_winding_constant_vectors():
    bloch = np.tile([1.0, 0.0, 0.0], (D, 1))
    data = SpectralData(D, 0.5, "scs", np.zeros(D), np.ones(D), bloch)
    assert winding_number(data) == 0


def test_winding_grid_too_coarse():
    with pytest.raises(GridTooCoarseError):
        winding_number(spectrum("dtqw", math.pi / 4, 2))


@settings(max_examples=30, deadline=None)
@given(shift=st.integers(0, D - 1), theta=st.floats(0.05, math.pi / 2 - 0.05))
def test_winding_invariant_under_cyclic_relabelling(shift, theta):
    for kind in ("dtqw", "scs"):
        data = spectrum(kind, theta, D)
        rolled = SpectralData(D, theta, kind, np.roll(data.ktilde, shift), np.roll(data.epsilon, shift),
                              np.roll(data.bloch, shift, axis=0))
        assert winding_number(rolled) == winding_number(data)


def test_scs_block_generator_sign():
    # exp(-i eps d.sigma) equals exp(i k sigma_z - i theta sigma_x)
    theta, k = 0.4, 1.1
    eps = scs_dispersion(theta, k)
    d = scs_bloch(theta, k)
    gen = eps * (d.dx * SIGMA_X + d.dz * SIGMA_Z)
    assert np.allclose(gen, -k * SIGMA_Z + theta * SIGMA_X)

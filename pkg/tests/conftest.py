import numpy as np
import pytest

from kickedgas import cesium_preset, derive_scaled, make_grid, Orbital


@pytest.fixture(scope="session")
def scaled():
    return derive_scaled(cesium_preset())


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(256, 20e-6, 532.25e-9)


def random_orbital(grid, rng, boost_bins: int = 0):
    """Smooth normalized orbital with optional momentum boost."""
    raw = rng.normal(size=grid.n_dim) + 1j * rng.normal(size=grid.n_dim)
    phi = np.fft.fft(raw) * np.exp(-grid.k_zeta ** 2)
    psi = np.fft.ifft(phi)
    if boost_bins:
        psi = psi * np.exp(1j * (2 * np.pi / grid.span) * boost_bins * grid.zeta)
    return Orbital(psi, grid).normalized()


def random_orthonormal(grid, rng, n):
    """n random orthonormal orbitals (dz-normalized)."""
    raw = rng.normal(size=(grid.n_dim, n)) + 1j * rng.normal(size=(grid.n_dim, n))
    q, _ = np.linalg.qr(raw)
    return [Orbital(q[:, i] / np.sqrt(grid.dz), grid) for i in range(n)]

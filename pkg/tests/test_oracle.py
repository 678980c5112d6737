import numpy as np
import pytest
import scipy.special

from kickedgas import ConfigError, Orbital, bessel_one_kick, brute_obdm_n2, make_grid
from conftest import random_orthonormal

LATTICE = 532.25e-9


def test_bessel_zero_argument():
    pops = bessel_one_kick(0.0, 5)
    assert pops[5] == 1.0
    assert np.all(pops[np.arange(11) != 5] == 0.0)


def test_bessel_sum_rule():
    for arg in (0.5, 0.83, 2.0):
        assert bessel_one_kick(arg, 40).sum() >= 1.0 - 1e-12


def test_bessel_against_scipy():
    for arg in (0.3, 0.83, 1.7, 4.2):
        mine = bessel_one_kick(arg, 15)
        ref = np.array([scipy.special.jv(n, arg) ** 2 for n in range(-15, 16)])
        assert np.max(np.abs(mine - ref)) < 1e-14


def test_bessel_kappa_083_dominant():
    pops = bessel_one_kick(0.83, 10)
    assert pops[10] == pytest.approx(0.698, abs=0.01)
    assert pops[10] == pops.max()


def test_bessel_rejects_bad_n():
    with pytest.raises(ConfigError):
        bessel_one_kick(1.0, 0)


def test_brute_n2_basic_identities():
    grid = make_grid(48, 12e-6, LATTICE)
    # two lowest "box" plane waves on the periodic grid
    a = Orbital(np.ones(grid.n_dim, complex), grid).normalized()
    b = Orbital(np.exp(1j * (2 * np.pi / grid.span) * grid.zeta), grid).normalized()
    obdm = brute_obdm_n2(a, b)
    assert obdm.rho.trace().real == pytest.approx(2.0, abs=1e-10)
    assert np.max(np.abs(obdm.rho - obdm.rho.conj().T)) < 1e-12
    site_density = (np.abs(a.amplitudes) ** 2 + np.abs(b.amplitudes) ** 2) * grid.dz
    assert np.allclose(obdm.density, site_density, atol=1e-12)


def test_brute_n2_rejects_non_orthogonal():
    grid = make_grid(32, 10e-6, LATTICE)
    rng = np.random.default_rng(0)
    a = random_orthonormal(grid, rng, 1)[0]
    shifted = Orbital(np.roll(a.amplitudes, 1), grid)
    with pytest.raises(ConfigError):
        brute_obdm_n2(a, shifted)


def test_brute_n2_size_cap():
    grid = make_grid(256, 40e-6, LATTICE)
    rng = np.random.default_rng(1)
    orbs = random_orthonormal(grid, rng, 2)
    with pytest.raises(ConfigError):
        brute_obdm_n2(orbs[0], orbs[1])

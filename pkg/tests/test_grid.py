import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kickedgas import ConfigError, Orbital, boundary_occupancy, make_grid, to_momentum, to_position
from conftest import random_orbital

LATTICE = 532.25e-9


def test_geometry_invariants():
    grid = make_grid(2048, 150e-6, LATTICE)
    assert grid.dz * grid.n_dim == pytest.approx(grid.span, rel=1e-14)
    assert grid.span / (2 * np.pi) == pytest.approx(round(grid.span / (2 * np.pi)))
    assert grid.zeta[0] == pytest.approx(-grid.span / 2)
    assert grid.zeta[-1] == pytest.approx(grid.span / 2 - grid.dz)


def test_snap_adjusts_length():
    grid = make_grid(512, 150e-6, LATTICE)
    k_lat = np.pi / LATTICE
    assert grid.span == pytest.approx(2 * k_lat * grid.length_z, rel=1e-12)
    unsnapped = make_grid(512, 150e-6, LATTICE, snap_to_kick=False)
    assert unsnapped.length_z == 150e-6


def test_small_grid_frequencies():
    # 8 points over span Z = 8 (snap off): dz = 1, wavenumbers 2*pi*j/8
    length = 8 / (2 * np.pi / LATTICE)  # 2*k_L*length = 8
    grid = make_grid(8, length, LATTICE, snap_to_kick=False)
    assert grid.dz == pytest.approx(1.0)
    expected = 2 * np.pi * np.fft.fftfreq(8, d=1.0)
    assert np.allclose(grid.k_zeta, expected)
    assert np.allclose(grid.k_values, 2 * expected)


def test_rejects_bad_arguments():
    with pytest.raises(ConfigError):
        make_grid(4, 100e-6, LATTICE)
    with pytest.raises(ConfigError):
        make_grid(64, 0.0, LATTICE)


def test_momentum_bin_symmetry():
    grid = make_grid(64, 30e-6, LATTICE)
    ks = grid.sorted_k()
    # all bins except 0 and the single Nyquist bin pair up
    nyquist = ks[0]
    body = ks[1:]
    assert np.allclose(body, -body[::-1])
    assert not np.any(np.isclose(ks, -nyquist))


def test_plane_wave_is_delta(small_grid):
    bin_no = 5
    psi = np.exp(1j * (2 * np.pi / small_grid.span) * bin_no * small_grid.zeta)
    orb = Orbital(psi, small_grid).normalized()
    phi = to_momentum(orb)
    weights = np.abs(phi.amplitudes) ** 2
    assert weights.argmax() == bin_no
    assert weights[bin_no] / weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_constant_is_delta_at_zero(small_grid):
    orb = Orbital(np.ones(small_grid.n_dim, complex), small_grid).normalized()
    phi = to_momentum(orb)
    assert np.abs(phi.amplitudes[1:]).max() < 1e-12 * np.abs(phi.amplitudes[0])


def test_round_trip_and_parseval(small_grid):
    rng = np.random.default_rng(3)
    for boost in (0, 7):
        orb = random_orbital(small_grid, rng, boost_bins=boost)
        phi = to_momentum(orb)
        back = to_position(phi)
        assert np.max(np.abs(back.amplitudes - orb.amplitudes)) < 1e-12
        assert abs(phi.norm() - orb.norm()) < 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 31))
def test_transform_unitary_property(seed):
    grid = make_grid(128, 20e-6, LATTICE)
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=grid.n_dim) + 1j * rng.normal(size=grid.n_dim)
    orb = Orbital(raw, grid).normalized()
    assert abs(to_momentum(orb).norm() - 1.0) < 1e-12


def test_boundary_occupancy(small_grid):
    psi = np.zeros(small_grid.n_dim, complex)
    psi[small_grid.n_dim // 2] = 1.0
    orb = Orbital(psi, small_grid).normalized()
    assert boundary_occupancy(orb.amplitudes, small_grid) == 0.0
    edge = np.zeros(small_grid.n_dim, complex)
    edge[0] = 1.0
    orb2 = Orbital(edge, small_grid).normalized()
    assert boundary_occupancy(orb2.amplitudes, small_grid) == pytest.approx(1.0)

import numpy as np
import pytest

from kickedgas import (ConfigError, InvariantError, OBDM, Orbital, SlaterState,
                       TrapSpec, brute_obdm_n2, green_function,
                       lowest_eigenstates, make_grid, momentum_dist_obdm,
                       momentum_dist_set, obdm_from_green, obdm_from_orbitals,
                       von_neumann_entropy)
from kickedgas.tonks import load_obdm_binary, _direct_bordered
from conftest import random_orthonormal

LATTICE = 532.25e-9


def test_single_particle_is_projector(small_grid):
    rng = np.random.default_rng(11)
    orb = random_orthonormal(small_grid, rng, 1)[0]
    obdm = obdm_from_orbitals([orb])
    site = orb.amplitudes * np.sqrt(small_grid.dz)
    assert np.max(np.abs(obdm.rho - np.outer(site.conj(), site))) < 1e-12
    assert obdm.rho.trace().real == pytest.approx(1.0, abs=1e-10)


def test_density_identity(small_grid):
    rng = np.random.default_rng(12)
    orbs = random_orthonormal(small_grid, rng, 4)
    state = SlaterState.from_orbitals(orbs)
    G = green_function(state)
    fermi_density = np.sum(np.abs(state.P) ** 2, axis=1)
    assert np.allclose(1.0 - G.diagonal().real, fermi_density, atol=1e-10)
    obdm = obdm_from_green(G, small_grid, 4)
    assert np.allclose(obdm.density, fermi_density, atol=1e-10)


def test_jwt_matches_brute_force_oracle():
    grid = make_grid(32, 10e-6, LATTICE)
    rng = np.random.default_rng(13)
    for _ in range(5):
        orbs = random_orthonormal(grid, rng, 2)
        brute = brute_obdm_n2(orbs[0], orbs[1])
        jwt = obdm_from_orbitals(orbs)
        assert np.max(np.abs(brute.rho - jwt.rho)) < 1e-8


def test_fast_path_matches_reference():
    grid = make_grid(48, 14e-6, LATTICE)
    rng = np.random.default_rng(14)
    for n_part in (1, 2, 3, 5):
        orbs = random_orthonormal(grid, rng, n_part)
        state = SlaterState.from_orbitals(orbs)
        fast = green_function(state, method="fast")
        ref = green_function(state, method="reference")
        assert np.max(np.abs(fast - ref)) < 1e-10


def test_fast_path_matches_reference_trap_states(scaled):
    grid = make_grid(96, 20e-6, LATTICE)
    eig = lowest_eigenstates(TrapSpec(kind="gaussian", freq_hz=200.0),
                             grid, scaled, 4)
    state = SlaterState.from_orbitals(eig.orbitals)
    fast = green_function(state, method="fast")
    ref = green_function(state, method="reference")
    assert np.max(np.abs(fast - ref)) < 1e-10


def test_direct_bordered_matches_reference():
    grid = make_grid(24, 8e-6, LATTICE)
    rng = np.random.default_rng(15)
    orbs = random_orthonormal(grid, rng, 3)
    state = SlaterState.from_orbitals(orbs)
    ref = green_function(state, method="reference")
    P = np.ascontiguousarray(state.P)
    for i, j in ((0, 5), (3, 17), (10, 11)):
        assert _direct_bordered(P, i, j) == pytest.approx(ref[i, j], abs=1e-12)


def test_obdm_invariants_random_states(small_grid):
    rng = np.random.default_rng(16)
    obdm = obdm_from_orbitals(random_orthonormal(small_grid, rng, 5))
    obdm.validate()
    assert np.max(np.abs(obdm.rho - obdm.rho.conj().T)) < 1e-10
    assert obdm.eigenvalues().min() > -1e-8
    assert abs(obdm.rho.trace().real - 5.0) < 1e-8
    assert obdm.density.min() > -1e-10 and obdm.density.max() < 1.0 + 1e-10


def test_slater_state_rejects_nonorthonormal(small_grid):
    rng = np.random.default_rng(17)
    orbs = random_orthonormal(small_grid, rng, 2)
    with pytest.raises(InvariantError):
        SlaterState.from_orbitals([orbs[0], orbs[0]])


def test_momentum_broadening_vs_fermions(scaled):
    # hard-core bosons pile up near k = 0 relative to the free-fermion sea
    grid = make_grid(128, 40e-6, LATTICE)
    eig = lowest_eigenstates(TrapSpec(kind="gaussian", freq_hz=100.0),
                             grid, scaled, 6)
    obdm = obdm_from_orbitals(eig.orbitals)
    bose = momentum_dist_obdm(obdm)
    amps = np.stack([o.amplitudes for o in eig.orbitals])
    fermi = momentum_dist_set(amps, grid)
    mid = len(bose.k) // 2
    assert bose.n[mid] > fermi.n[mid]


def test_entropy_pure_state_zero(small_grid):
    rng = np.random.default_rng(18)
    obdm = obdm_from_orbitals(random_orthonormal(small_grid, rng, 1))
    assert von_neumann_entropy(obdm) == pytest.approx(0.0, abs=1e-9)


def test_entropy_maximally_mixed():
    rho = np.eye(4, dtype=np.complex128) / 4.0
    obdm = OBDM(rho=rho, grid=None, n_particles=1)
    assert von_neumann_entropy(obdm) == pytest.approx(np.log(4.0), rel=1e-12)


def test_entropy_conventions_related(small_grid):
    rng = np.random.default_rng(19)
    obdm = obdm_from_orbitals(random_orthonormal(small_grid, rng, 4))
    raw = von_neumann_entropy(obdm)
    unit = von_neumann_entropy(obdm, normalized=True)
    assert unit == pytest.approx(raw / 4.0 + np.log(4.0), rel=1e-9)


def test_entropy_rejects_negative_spectrum():
    rho = np.diag([1.5, -0.5]).astype(np.complex128)
    obdm = OBDM(rho=rho, grid=None, n_particles=1)
    with pytest.raises(InvariantError):
        von_neumann_entropy(obdm)


def test_obdm_binary_roundtrip(tmp_path, small_grid):
    rng = np.random.default_rng(20)
    obdm = obdm_from_orbitals(random_orthonormal(small_grid, rng, 3))
    path = tmp_path / "state.bin"
    obdm.save_binary(path)
    loaded = load_obdm_binary(path, grid=small_grid)
    assert loaded.n_particles == 3
    assert np.array_equal(loaded.rho, obdm.rho)
    with open(path, "rb") as fh:
        header = fh.read(16)
    assert header[:4] == b"OBDM"
    (path2 := tmp_path / "bad.bin").write_bytes(b"NOPE" + header[4:])
    with pytest.raises(ConfigError):
        load_obdm_binary(path2)
    path3 = tmp_path / "short.bin"
    path3.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(ConfigError):
        load_obdm_binary(path3)


def test_flat_bottom_ground_state_density_profile(scaled):
    """Hard-core ground-state density: flat plateau, sharp edges."""
    grid = make_grid(512, 120e-6, LATTICE)
    eig = lowest_eigenstates(TrapSpec(), grid, scaled, 10)
    obdm = obdm_from_orbitals(eig.orbitals)
    dens = obdm.density
    z_m = grid.zeta / (2 * np.pi) * LATTICE
    inner = np.abs(z_m) < 15e-6
    outer = np.abs(z_m) > 45e-6
    assert dens[inner].std() / dens[inner].mean() < 0.1
    assert dens[outer].max() < 0.05 * dens[inner].mean()

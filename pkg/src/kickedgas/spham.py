"""Trap potentials and their lowest eigenstates on the grid.

The kinetic operator used here is the spectral (Fourier-diagonal) one, the
same operator the propagator applies, so initial states are stationary
under kick-free evolution to machine precision.  Scaled convention: the
Hamiltonian hbar_eff*k^2/2 + V(zeta) has one recoil energy equal to
hbar_eff^2/8 scaled units.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigError, ConvergenceError
from .grid import Grid, Orbital
from .units import HBAR, ScaledParams, scaled_potential_prefactor

TRAP_KINDS = ("none", "flat_bottom", "gaussian")


@dataclass(frozen=True)
class TrapSpec:
    kind: str = "flat_bottom"
    v1_er: float = 45.7       # Gaussian trap depth, E_r
    v2_er: float = 9.3        # Gaussian anti-trap depth, E_r
    w1: float = 300e-6        # trap waist, m
    w2: float = 135e-6        # anti-trap waist, m
    freq_hz: float = 14.7     # harmonic-equivalent frequency (gaussian kind)

    def __post_init__(self):
        if self.kind not in TRAP_KINDS:
            raise ConfigError(f"unknown trap kind {self.kind!r}")
        if self.kind == "flat_bottom":
            if not (self.v1_er > self.v2_er > 0):
                raise ConfigError("flat_bottom requires v1_er > v2_er > 0")
            if not self.w1 > self.w2:
                raise ConfigError("flat_bottom requires w1 > w2")
        if self.kind == "gaussian" and not self.freq_hz > 0:
            raise ConfigError("gaussian trap requires a positive frequency")


@dataclass
class EigenSet:
    energies: np.ndarray       # E_r, ascending
    orbitals: list             # list[Orbital], dz-normalized
    residual: float            # worst |H psi - E psi| (scaled units)


def potential_on_grid(spec: TrapSpec, grid: Grid, scaled: ScaledParams) -> np.ndarray:
    """Evaluate the scaled external potential on every grid point.

    The physical potential (in E_r) enters multiplied by hbar_eff^2/8; the
    minimum is shifted to zero.
    """
    if spec.kind == "none":
        return np.zeros(grid.n_dim)

    k_lat = np.pi / grid.lattice_constant
    pref = scaled_potential_prefactor(scaled)
    zeta2 = grid.zeta ** 2

    if spec.kind == "flat_bottom":
        g1 = np.exp(-zeta2 / (2.0 * (k_lat * spec.w1) ** 2))
        g2 = np.exp(-zeta2 / (2.0 * (k_lat * spec.w2) ** 2))
        v_er = spec.v1_er * (1.0 - g1) + spec.v2_er * (g2 - 1.0)
    else:  # gaussian with matched harmonic curvature at the bottom
        e_r = scaled.recoil_rate * HBAR
        mass = (np.pi * HBAR / grid.lattice_constant) ** 2 / (2.0 * e_r)
        omega = 2.0 * np.pi * spec.freq_hz
        v1_er = mass * omega ** 2 * spec.w1 ** 2 / (4.0 * e_r)
        g1 = np.exp(-zeta2 / (2.0 * (k_lat * spec.w1) ** 2))
        v_er = v1_er * (1.0 - g1)

    v = pref * v_er
    return v - v.min()


def kinetic_symbol(grid: Grid, scaled: ScaledParams) -> np.ndarray:
    """Kinetic phase rate hbar_eff*k^2/2 in momentum representation (FFT order).

    This is the momentum diagonal of H/hbar_eff; the matching position
    diagonal is v_ext/hbar_eff.
    """
    return scaled.hbar_eff * grid.k_zeta ** 2 / 2.0


def apply_phase_rate(vec: np.ndarray, v_rate: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """(H/hbar_eff) acting on an l2 coefficient vector, via FFT."""
    return np.fft.ifft(symbol * np.fft.fft(vec)) + v_rate * vec


def lowest_eigenstates(spec: TrapSpec, grid: Grid, scaled: ScaledParams,
                       n_states: int, residual_tol: float = 1e-8) -> EigenSet:
    """Lowest eigenpairs of the scaled single-particle Hamiltonian."""
    v_ext = potential_on_grid(spec, grid, scaled)
    return eigenstates_from_potential(v_ext, grid, scaled, n_states, residual_tol)


def eigenstates_from_potential(v_ext: np.ndarray, grid: Grid, scaled: ScaledParams,
                               n_states: int, residual_tol: float = 1e-8) -> EigenSet:
    """Diagonalize kinetic + an arbitrary scaled potential on the grid.

    Dense symmetric diagonalization with the spectral kinetic matrix
    (a real symmetric circulant), so eigenstates are exactly stationary
    under the kick-free propagator.  Eigenvector phases are fixed so the
    largest-magnitude component is real positive.
    """
    if n_states < 1:
        raise ConfigError("n_states must be at least 1")
    if n_states > grid.n_dim // 4:
        raise ConfigError(
            f"n_states={n_states} too large for n_dim={grid.n_dim}"
        )

    v_rate = v_ext / scaled.hbar_eff
    symbol = kinetic_symbol(grid, scaled)

    first_row = np.fft.ifft(symbol)
    # symbol is even in the FFT index, so the circulant is real symmetric
    kin = scipy.linalg.circulant(first_row.real)
    ham = kin + np.diag(v_rate)
    rates, vectors = scipy.linalg.eigh(ham, subset_by_index=(0, n_states - 1))

    worst = 0.0
    orbitals = []
    for idx in range(n_states):
        vec = vectors[:, idx].astype(np.complex128)
        peak = int(np.argmax(np.abs(vec)))
        phase = vec[peak] / abs(vec[peak])
        vec = vec * np.conj(phase)
        res = float(np.linalg.norm(apply_phase_rate(vec, v_rate, symbol) - rates[idx] * vec))
        worst = max(worst, res)
        orbitals.append(Orbital(vec / np.sqrt(grid.dz), grid))
    if worst > residual_tol:
        raise ConvergenceError(
            f"eigenstate residual {worst:.3e} exceeds tolerance {residual_tol:.1e}"
        )

    # eigenvalues of H/hbar_eff -> scaled energy -> recoils
    energies = rates * scaled.hbar_eff / scaled_potential_prefactor(scaled)
    return EigenSet(energies=energies, orbitals=orbitals, residual=worst)

"""Brute-force oracles used to validate the production paths.

These share no code with the propagator or the determinant sweep: the
Bessel populations come from the ascending power series, and the
two-particle density matrix from the explicitly (anti)symmetrized
two-body wavefunction summed over the spectator coordinate.
"""

import numpy as np

from .errors import ConfigError
from .grid import Orbital
from .tonks import OBDM


def bessel_one_kick(k_over_hbar: float, n_max: int) -> np.ndarray:
    """|J_n(kappa)|^2 for n = -n_max..n_max via the ascending series.

    A single delta kick applied to a zero-momentum state populates the
    momentum ladder with exactly these weights.
    """
    if n_max < 1:
        raise ConfigError("n_max must be at least 1")
    x = float(k_over_hbar)
    half = 0.5 * x
    populations = np.empty(2 * n_max + 1)
    for n in range(n_max + 1):
        # term_0 = (x/2)^n / n!
        term = 1.0
        for m in range(1, n + 1):
            term *= half / m
        total = term
        m = 0
        while abs(term) > 1e-300 and m < 200:
            term *= -(half * half) / ((m + 1) * (n + m + 1))
            total += term
            m += 1
        populations[n_max + n] = total * total
        populations[n_max - n] = total * total  # |J_{-n}| = |J_n|
    return populations


def brute_obdm_n2(orb_a: Orbital, orb_b: Orbital, tol: float = 1e-8) -> OBDM:
    """Two-particle hard-core density matrix by direct summation.

    Builds the 2x2 Slater determinant on all site pairs, applies the
    sign map sgn(zeta_i - zeta_j), and evaluates
    rho_ij = 2 sum_y conj(Psi_B(i, y)) Psi_B(j, y).
    """
    grid = orb_a.grid
    if grid.n_dim > 128:
        raise ConfigError("brute-force two-particle path is capped at n_dim=128")
    if not grid.same_as(orb_b.grid):
        raise ConfigError("orbitals live on different grids")

    a = orb_a.amplitudes * np.sqrt(grid.dz)
    b = orb_b.amplitudes * np.sqrt(grid.dz)
    for name, vec in (("orb_a", a), ("orb_b", b)):
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > tol:
            raise ConfigError(f"{name} is not normalized: |norm-1| = {abs(norm-1):.3e}")
    overlap = abs(np.vdot(a, b))
    if overlap > tol:
        raise ConfigError(f"orbitals are not orthogonal: |<a|b>| = {overlap:.3e}")

    psi_f = (np.outer(a, b) - np.outer(b, a)) / np.sqrt(2.0)
    idx = np.arange(grid.n_dim)
    sign = np.sign(idx[:, None] - idx[None, :])
    psi_b = sign * psi_f
    rho = 2.0 * (psi_b.conj() @ psi_b.T)
    return OBDM(rho=rho, grid=grid, n_particles=2).validate()

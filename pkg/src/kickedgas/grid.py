"""Periodic position/momentum grid and the unitary transform pair.

The grid lives in the scaled coordinate zeta = 2*k_L*z on [-Z/2, Z/2) with
Z = 2*k_L*L_z.  By default Z is snapped to the nearest multiple of 2*pi so
the kick lattice cos(zeta) fits an integer number of periods in the box and
suffers no spectral leakage.  Momentum bins are reported in units of k_L
(twice the wavenumber conjugate to zeta).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InvariantError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    n_dim: int
    length_z: float          # physical box length in m (after snapping)
    lattice_constant: float  # m
    span: float              # Z = 2*k_L*length_z, dimensionless
    dz: float                # grid spacing in zeta
    zeta: np.ndarray = field(repr=False)     # positions, shape (n_dim,)
    k_zeta: np.ndarray = field(repr=False)   # wavenumbers conj. to zeta, FFT order
    k_values: np.ndarray = field(repr=False)  # momentum bins in k_L units, FFT order

    @property
    def dk(self) -> float:
        """Momentum bin width in k_L units."""
        return 2.0 * TWO_PI / self.span

    def sorted_k(self) -> np.ndarray:
        """Momentum bins in k_L units, ascending (for reporting)."""
        return np.sort(self.k_values)

    def sort_indices(self) -> np.ndarray:
        return np.argsort(self.k_values)

    def same_as(self, other: "Grid") -> bool:
        return self.n_dim == other.n_dim and abs(self.span - other.span) < 1e-12


def make_grid(n_dim: int, length_z: float, lattice_constant: float,
              snap_to_kick: bool = True) -> Grid:
    """Build the periodic grid for a box of physical length ``length_z``.

    With ``snap_to_kick`` the dimensionless span is rounded to the nearest
    nonzero multiple of 2*pi (the kick-lattice period), adjusting the
    physical length accordingly.
    """
    if n_dim < 8:
        raise ConfigError(f"n_dim must be at least 8, got {n_dim}")
    if not length_z > 0 or not lattice_constant > 0:
        raise ConfigError("length_z and lattice_constant must be positive")

    k_lat = np.pi / lattice_constant
    span = 2.0 * k_lat * length_z
    if snap_to_kick:
        periods = max(1, round(span / TWO_PI))
        span = periods * TWO_PI
        length_z = span / (2.0 * k_lat)

    dz = span / n_dim
    zeta = -span / 2.0 + dz * np.arange(n_dim)
    k_zeta = TWO_PI * np.fft.fftfreq(n_dim, d=dz)
    return Grid(
        n_dim=n_dim,
        length_z=length_z,
        lattice_constant=lattice_constant,
        span=span,
        dz=dz,
        zeta=zeta,
        k_zeta=k_zeta,
        k_values=2.0 * k_zeta,
    )


class Orbital:
    """One complex single-particle wavefunction on a grid.

    Normalized so that sum(|psi|^2)*dz = 1 in position space and
    sum(|phi|^2)*dk_zeta = 1 in momentum space (dk_zeta = 2*pi/Z).
    """

    __slots__ = ("amplitudes", "grid", "space")

    def __init__(self, amplitudes: np.ndarray, grid: Grid, space: str = "position"):
        if amplitudes.shape != (grid.n_dim,):
            raise ConfigError(
                f"amplitude array has shape {amplitudes.shape}, expected ({grid.n_dim},)"
            )
        if space not in ("position", "momentum"):
            raise ConfigError(f"unknown representation {space!r}")
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        self.grid = grid
        self.space = space

    @property
    def measure(self) -> float:
        return self.grid.dz if self.space == "position" else TWO_PI / self.grid.span

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.measure))

    def normalized(self) -> "Orbital":
        return Orbital(self.amplitudes / self.norm(), self.grid, self.space)

    def copy(self) -> "Orbital":
        return Orbital(self.amplitudes.copy(), self.grid, self.space)


def to_momentum(orb: Orbital) -> Orbital:
    """Unitary transform to the momentum representation."""
    if orb.space != "position":
        raise ConfigError("orbital is already in momentum representation")
    phi = np.fft.fft(orb.amplitudes) * orb.grid.dz / np.sqrt(TWO_PI)
    return Orbital(phi, orb.grid, space="momentum")


def to_position(orb: Orbital) -> Orbital:
    """Inverse of :func:`to_momentum`."""
    if orb.space != "momentum":
        raise ConfigError("orbital is already in position representation")
    psi = np.fft.ifft(orb.amplitudes) * np.sqrt(TWO_PI) / orb.grid.dz
    return Orbital(psi, orb.grid, space="position")


def boundary_occupancy(amps: np.ndarray, grid: Grid, fraction: float = 0.05) -> float:
    """Probability per particle in the outer ``fraction`` of the box.

    ``amps`` is (n_orbitals, n_dim) or (n_dim,) in position representation.
    """
    amps = np.atleast_2d(amps)
    n_edge = max(1, int(round(grid.n_dim * fraction / 2.0)))
    prob = np.abs(amps) ** 2 * grid.dz
    outer = prob[:, :n_edge].sum() + prob[:, -n_edge:].sum()
    return float(outer / amps.shape[0])


def check_boundary(amps: np.ndarray, grid: Grid, tol: float, where: str = "") -> float:
    occ = boundary_occupancy(amps, grid)
    if occ > tol:
        raise InvariantError(
            f"boundary occupancy {occ:.3e} exceeds tolerance {tol:.1e}"
            + (f" at {where}" if where else "")
        )
    return occ

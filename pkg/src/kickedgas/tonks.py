"""Hard-core boson one-particle density matrix from free-fermion orbitals.

The evolved hard-core gas is a Slater determinant of N orbitals on the
n-site grid.  String-operator expectation values reduce to determinants:
with P the (n, N) orbital matrix, P^(i) denotes P with rows 0..i-1 negated
and the unit column e_i appended, and

    G_ij = det[(P^(i))^dagger P^(j)]

is the Green's function <b_i b_j^dagger>.  The density matrix
rho_ij = <b_i^dagger b_j> follows elementwise from G.

Two evaluation paths are provided.  The reference path builds every
(N+1) x (N+1) Gram matrix explicitly; it is simple, obviously correct and
O(n^2 N^2 n) slow, so it doubles as the test oracle.  The fast path sweeps
j for fixed i, updating the N x N sign-flip Gram block by rank-1
Sherman-Morrison steps at O(N^2) per pair, with periodic LU refreshes and
a direct bordered-determinant fallback near singular pivots.
"""

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigError, InvariantError
from .grid import Grid

_REFRESH_EVERY = 64
_PIVOT_TOL = 1e-10
_DET_FLOOR = 1e-280


@dataclass
class SlaterState:
    """Orthonormal orbitals as columns, site-normalized (P^dagger P = I)."""

    P: np.ndarray
    grid: Grid
    n_particles: int

    @classmethod
    def from_orbitals(cls, orbitals, tol: float = 1e-8) -> "SlaterState":
        grid = orbitals[0].grid
        P = np.stack([o.amplitudes for o in orbitals], axis=1) * np.sqrt(grid.dz)
        defect = np.max(np.abs(P.conj().T @ P - np.eye(P.shape[1])))
        if defect > tol:
            raise InvariantError(
                f"orbital set is not orthonormal: defect {defect:.3e} > {tol:.1e}"
            )
        return cls(P=P.astype(np.complex128), grid=grid, n_particles=P.shape[1])


@dataclass
class OBDM:
    """Density matrix of the fermionized bosons on the grid (trace = N)."""

    rho: np.ndarray
    grid: Grid
    n_particles: int
    _eigenvalues: np.ndarray = field(default=None, repr=False)

    @property
    def density(self) -> np.ndarray:
        """Per-site occupation (real diagonal)."""
        return self.rho.diagonal().real

    def eigenvalues(self) -> np.ndarray:
        if self._eigenvalues is None:
            self._eigenvalues = np.linalg.eigvalsh(self.rho)
        return self._eigenvalues

    def validate(self, positivity: bool = True):
        herm = float(np.max(np.abs(self.rho - self.rho.conj().T)))
        if herm > 1e-10:
            raise InvariantError(f"OBDM hermiticity defect {herm:.3e} > 1e-10")
        trace = float(self.rho.trace().real)
        if abs(trace - self.n_particles) > 1e-8:
            raise InvariantError(
                f"OBDM trace {trace!r} deviates from N={self.n_particles} by "
                f"{abs(trace - self.n_particles):.3e}"
            )
        diag = self.density
        if diag.min() < -1e-10 or diag.max() > 1.0 + 1e-10:
            raise InvariantError(
                f"OBDM diagonal outside [0, 1]: min {diag.min():.3e}, "
                f"max {diag.max():.6f}"
            )
        if positivity:
            low = float(self.eigenvalues().min())
            if low < -1e-8:
                raise InvariantError(f"OBDM eigenvalue {low:.3e} below -1e-8")
        return self

    def save_binary(self, path):
        """Dump as magic "OBDM", version, n_dim, N (u32 LE), then row-major
        complex entries as little-endian float64 (re, im) pairs."""
        with open(path, "wb") as fh:
            fh.write(b"OBDM")
            fh.write(struct.pack("<III", 1, self.rho.shape[0], self.n_particles))
            fh.write(np.ascontiguousarray(self.rho, dtype="<c16").tobytes())


def load_obdm_binary(path, grid: Grid = None) -> OBDM:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != b"OBDM":
            raise ConfigError(f"{path}: bad magic {magic!r}")
        version, n_dim, n_particles = struct.unpack("<III", fh.read(12))
        if version != 1:
            raise ConfigError(f"{path}: unsupported version {version}")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != n_dim * n_dim:
        raise ConfigError(f"{path}: truncated payload")
    rho = data.reshape(n_dim, n_dim).astype(np.complex128)
    return OBDM(rho=rho, grid=grid, n_particles=n_particles)


@njit(cache=True)
def _direct_bordered(P, i, j):
    """det[(P^(i))^dagger P^(j)] for i < j, built explicitly. O(N^3)."""
    n, N = P.shape
    A = np.zeros((N + 1, N + 1), np.complex128)
    for a in range(N):
        A[a, a] = 1.0
    for l in range(i, j):
        for a in range(N):
            ca = np.conj(P[l, a])
            for b in range(N):
                A[a, b] -= 2.0 * ca * P[l, b]
    for a in range(N):
        A[a, N] = np.conj(P[j, a])   # column P^(i)^dagger e-part, rows < j
        A[N, a] = -P[i, a]           # bottom row: sign-flipped row i of P^(j)
    A[N, N] = 0.0
    return np.linalg.det(A)


@njit(cache=True)
def _green_fast(P, refresh_every, pivot_tol, det_floor):
    """Full Green's function by Sherman-Morrison row sweeps. O(n^2 N^2)."""
    n, N = P.shape
    G = np.zeros((n, n), np.complex128)
    fallbacks = 0

    for i in range(n):
        occ = 0.0
        for m in range(N):
            occ += P[i, m].real ** 2 + P[i, m].imag ** 2
        G[i, i] = 1.0 - occ

        # M accumulates I - 2 sum_l conj(p_l) p_l^T over sites l in [i, j)
        M = np.zeros((N, N), np.complex128)
        Y = np.zeros((N, N), np.complex128)
        for a in range(N):
            M[a, a] = 1.0
            Y[a, a] = 1.0
        d = 1.0 + 0.0j
        ok = True
        since_refresh = 0

        for j in range(i + 1, n):
            l = j - 1
            pl = P[l, :]
            cpl = np.conj(pl)

            pivot = 1.0 + 0.0j
            if ok:
                ypl = Y @ cpl
                pivot = 1.0 - 2.0 * (pl @ ypl)

            # exact rank-1 accumulation of the sign-flip block
            for a in range(N):
                ca = 2.0 * cpl[a]
                for b in range(N):
                    M[a, b] -= ca * pl[b]

            if ok and np.abs(pivot) > pivot_tol and since_refresh < refresh_every:
                d = d * pivot
                ply = pl @ Y
                f = 2.0 / pivot
                for a in range(N):
                    ya = f * ypl[a]
                    for b in range(N):
                        Y[a, b] += ya * ply[b]
                since_refresh += 1
            else:
                d = np.linalg.det(M)
                since_refresh = 0
                if np.abs(d) > det_floor:
                    Y = np.ascontiguousarray(np.linalg.inv(M))
                    ok = True
                else:
                    ok = False

            if ok:
                G[i, j] = d * (P[i, :] @ (Y @ np.conj(P[j, :])))
            else:
                G[i, j] = _direct_bordered(P, i, j)
                fallbacks += 1
            G[j, i] = np.conj(G[i, j])

    return G, fallbacks


def _green_reference(P: np.ndarray, row_chunk: int = 16) -> np.ndarray:
    """Literal construction: stack every P^(i), take batched determinants."""
    n, N = P.shape
    signs = 1.0 - 2.0 * np.tril(np.ones((n, n)), -1)  # signs[i, l], -1 for l < i
    Pext = np.empty((n, n, N + 1), np.complex128)
    Pext[:, :, :N] = signs[:, :, None] * P[None, :, :]
    Pext[:, :, N] = np.eye(n)
    G = np.empty((n, n), np.complex128)
    for start in range(0, n, row_chunk):
        stop = min(start + row_chunk, n)
        A = np.einsum("ilm,jln->ijmn", Pext[start:stop].conj(), Pext, optimize=True)
        G[start:stop] = np.linalg.det(A)
    return G


def green_function(state: SlaterState, method: str = "fast") -> np.ndarray:
    """<b_i b_j^dagger> for the Slater state, Hermitian n x n."""
    P = np.ascontiguousarray(state.P, dtype=np.complex128)
    if method == "fast":
        G, fallbacks = _green_fast(P, _REFRESH_EVERY, _PIVOT_TOL, _DET_FLOOR)
        if fallbacks:
            warnings.warn(
                f"OBDM determinant sweep hit {fallbacks} near-singular pivots; "
                "used direct bordered determinants there",
                RuntimeWarning,
            )
    elif method == "reference":
        if state.P.shape[0] > 512:
            raise ConfigError("reference Green's function is capped at n_dim=512")
        G = _green_reference(P)
    else:
        raise ConfigError(f"unknown green_function method {method!r}")
    herm = float(np.max(np.abs(G - G.conj().T)))
    if herm > 1e-10:
        raise InvariantError(f"Green's function hermiticity defect {herm:.3e}")
    return G


def obdm_from_green(G: np.ndarray, grid: Grid, n_particles: int,
                    validate: bool = True, positivity: bool = True) -> OBDM:
    """Assemble rho_ij = <b_i^dagger b_j> from the Green's function.

    Off the diagonal <b_i^dagger b_j> = <b_j b_i^dagger> = conj(G_ij); the
    diagonal is the site density 1 - G_ii.  (Equivalently: the transpose of
    G + delta*(1 - 2 G_ii); the operator ordering is pinned by the
    two-particle brute-force oracle.)
    """
    rho = G.conj()
    np.fill_diagonal(rho, 1.0 - G.diagonal().real)
    obdm = OBDM(rho=rho, grid=grid, n_particles=n_particles)
    if validate:
        obdm.validate(positivity=positivity)
    return obdm


def obdm_from_orbitals(orbitals, method: str = "fast", validate: bool = True) -> OBDM:
    state = SlaterState.from_orbitals(orbitals)
    G = green_function(state, method=method)
    return obdm_from_green(G, state.grid, state.n_particles, validate=validate)


def von_neumann_entropy(obdm: OBDM, normalized: bool = False,
                        clamp: float = 1e-12) -> float:
    """-Tr[rho ln rho] over the OBDM spectrum (natural log).

    With ``normalized`` the spectrum is divided by N first, giving the
    unit-trace convention; otherwise the trace-N spectrum is used as is.
    Eigenvalues below ``clamp`` are dropped.
    """
    lam = obdm.eigenvalues()
    low = float(lam.min())
    if low < -1e-8:
        raise InvariantError(f"OBDM eigenvalue {low:.3e} below -1e-8")
    if normalized:
        lam = lam / obdm.n_particles
    lam = lam[lam > clamp]
    return float(-np.sum(lam * np.log(lam)))

"""Observables on snapshots: n(k), energies, entropies, JSD, g1, fits, contact.

Momentum axes are in units of k_L throughout, distances in units of the
lattice spacing a.  Distributions are normalized as probability densities,
sum(n)*dk = 1, so a plane wave at q k_L carries q^2 recoil energies.
"""

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import ConfigError, ConvergenceError, InvariantError
from .grid import Grid, Orbital, to_momentum
from .tonks import OBDM

LOG2 = np.log(2.0)


@dataclass
class MomentumDist:
    k: np.ndarray  # ascending, k_L units
    n: np.ndarray  # probability density per k_L

    @property
    def dk(self) -> float:
        return float(self.k[1] - self.k[0])

    @property
    def bin_probs(self) -> np.ndarray:
        return self.n * self.dk


def _finalize_dist(k_sorted: np.ndarray, raw: np.ndarray, tol: float = 1e-10) -> MomentumDist:
    scale = raw.max() if raw.size and raw.max() > 0 else 1.0
    if raw.min() < -tol * scale:
        raise InvariantError(
            f"momentum distribution negativity {raw.min() / scale:.3e} beyond tolerance"
        )
    raw = np.clip(raw, 0.0, None)
    dk = float(k_sorted[1] - k_sorted[0])
    total = raw.sum() * dk
    if total <= 0:
        raise InvariantError("momentum distribution has zero weight")
    return MomentumDist(k=k_sorted, n=raw / total)


def momentum_dist_set(amps: np.ndarray, grid: Grid) -> MomentumDist:
    """Average |phi_i(k)|^2 over the orbital rows of ``amps`` (position rep)."""
    amps = np.atleast_2d(amps)
    phi = np.fft.fft(amps, axis=-1)
    raw = np.mean(np.abs(phi) ** 2, axis=0)
    order = grid.sort_indices()
    return _finalize_dist(grid.k_values[order], raw[order])


def momentum_dist_single(orb: Orbital) -> MomentumDist:
    """Momentum distribution |<k|psi>|^2 of one orbital."""
    if orb.space == "momentum":
        phi2 = np.abs(orb.amplitudes) ** 2
        order = orb.grid.sort_indices()
        return _finalize_dist(orb.grid.k_values[order], phi2[order])
    return momentum_dist_set(orb.amplitudes[None, :], orb.grid)


def momentum_dist_obdm(obdm: OBDM) -> MomentumDist:
    """Double Fourier transform of the density matrix, n(k) = (F rho F^+)_kk."""
    rho = obdm.rho
    n_dim = rho.shape[0]
    diag = np.diagonal(np.fft.ifft(np.fft.fft(rho, axis=1), axis=0)) * n_dim
    imag = float(np.max(np.abs(diag.imag)))
    if imag > 1e-8 * max(1.0, float(np.max(np.abs(diag.real)))):
        raise InvariantError(f"OBDM momentum distribution has imaginary part {imag:.3e}")
    order = obdm.grid.sort_indices()
    return _finalize_dist(obdm.grid.k_values[order], diag.real[order])


def average_dists(dists) -> MomentumDist:
    """Mean of distributions on identical grids (for realization averages)."""
    k = dists[0].k
    for d in dists[1:]:
        if not np.allclose(d.k, k):
            raise ConfigError("cannot average distributions on different grids")
    return _finalize_dist(k, np.mean([d.n for d in dists], axis=0))


def kinetic_energy(dist: MomentumDist) -> float:
    """<(k/k_L)^2> in recoil energies per particle."""
    return float(np.sum(dist.n * dist.k ** 2) * dist.dk)


def kinetic_energy_orbitals(amps: np.ndarray, grid: Grid) -> float:
    """Per-particle <k^2> of an orbital set, evaluated spectrally (E_r)."""
    amps = np.atleast_2d(amps)
    phi2 = np.abs(np.fft.fft(amps, axis=-1)) ** 2
    weights = phi2 / phi2.sum(axis=-1, keepdims=True)
    return float(np.mean(weights @ grid.k_values ** 2))


def info_entropy(dist: MomentumDist) -> float:
    """Shannon entropy -sum p ln p of the bin probabilities (natural log)."""
    p = dist.bin_probs
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def jsd(p: MomentumDist, q: MomentumDist) -> float:
    """Jensen-Shannon divergence in bits, bounded to [0, 1]."""
    if p.k.shape != q.k.shape or not np.allclose(p.k, q.k):
        raise ConfigError("JSD requires distributions on identical momentum grids")
    a = p.bin_probs
    b = q.bin_probs
    m = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        ta = np.where(a > 0, a * np.log(np.where(a > 0, 2.0 * a / np.where(m > 0, m, 1.0), 1.0)), 0.0)
        tb = np.where(b > 0, b * np.log(np.where(b > 0, 2.0 * b / np.where(m > 0, m, 1.0), 1.0)), 0.0)
    val = 0.5 * float(np.sum(ta + tb)) / LOG2
    return min(max(val, 0.0), 1.0)


@dataclass
class CorrFunction:
    z: np.ndarray   # distances in units of a, starting at 0
    g1: np.ndarray  # normalized, g1[0] = 1


def _lags_to_z(n_lags: int, dk: float, n_dim: int) -> np.ndarray:
    # dz in zeta units is 4*pi/(dk*n_dim); z/a = zeta/(2*pi)
    dz_over_a = 2.0 / (dk * n_dim)
    return dz_over_a * np.arange(n_lags)


def g1_from_momentum(dist: MomentumDist, z_max_a: float = 25.0) -> CorrFunction:
    """One-body correlation function as the Fourier transform of n(k)."""
    p_fft = np.fft.ifftshift(dist.bin_probs)
    g = np.fft.ifft(p_fft) * p_fft.size
    n_dim = p_fft.size
    z = _lags_to_z(n_dim // 2, dist.dk, n_dim)
    keep = z <= z_max_a
    g1 = g.real[: n_dim // 2][keep]
    return CorrFunction(z=z[keep], g1=g1 / g1[0])


def g1_from_obdm(obdm: OBDM, z_max_a: float = 25.0) -> CorrFunction:
    """Distance average of the density matrix over the periodic box."""
    rho = obdm.rho
    n_dim = rho.shape[0]
    rows = np.arange(n_dim)
    dz_over_a = obdm.grid.dz / (2.0 * np.pi)
    n_lags = min(n_dim // 2, int(z_max_a / dz_over_a) + 1)
    raw = np.empty(n_lags)
    for d in range(n_lags):
        raw[d] = rho[rows, (rows + d) % n_dim].real.sum()
    return CorrFunction(z=dz_over_a * np.arange(n_lags), g1=raw / raw[0])


@dataclass
class FitResult:
    model: str
    param: float        # r_c, width, or amplitude depending on the model
    amplitude: float
    residual_rms: float
    window: tuple


_MODELS = {
    "exponential": lambda z, A, rc: A * np.exp(-z / rc),
    "lorentzian": lambda z, A, w: A / (1.0 + (z / w) ** 2),
    "algebraic": lambda z, A: A / np.sqrt(z),
}


def fit_decay(corr: CorrFunction, model: str, window) -> FitResult:
    """Least-squares fit of a decay model to g1 over a distance window."""
    if model not in _MODELS:
        raise ConfigError(f"unknown decay model {model!r}")
    z_min, z_max = window
    if z_min < corr.z[0] - 1e-12 or z_max > corr.z[-1] + 1e-12:
        raise ConfigError(
            f"fit window [{z_min}, {z_max}] outside data range "
            f"[{corr.z[0]:.3g}, {corr.z[-1]:.3g}]"
        )
    mask = (corr.z >= z_min) & (corr.z <= z_max)
    if model == "algebraic":
        mask &= corr.z > 0
    z = corr.z[mask]
    y = corr.g1[mask]
    if z.size < 3:
        raise ConfigError("fit window contains fewer than 3 samples")

    func = _MODELS[model]
    amp0 = max(abs(y[0]), 1e-6)
    p0 = [amp0] if model == "algebraic" else [amp0, max(z[-1] / 2.0, 1e-3)]
    try:
        popt, _ = scipy.optimize.curve_fit(func, z, y, p0=p0, maxfev=20000)
    except RuntimeError as exc:
        raise ConvergenceError(f"{model} fit did not converge: {exc}") from exc
    popt = np.abs(popt)
    resid = func(z, *popt) - y
    rms = float(np.sqrt(np.mean(resid ** 2)))
    param = float(popt[0] if model == "algebraic" else popt[1])
    return FitResult(model=model, param=param, amplitude=float(popt[0]),
                     residual_rms=rms, window=(float(z_min), float(z_max)))


def contact_plateau(dist: MomentumDist, k_min: float = 6.0, min_bins: int = 8):
    """Mean and coefficient of variation of k^4 n(k) beyond ``k_min``."""
    mask = np.abs(dist.k) >= k_min
    if mask.sum() < min_bins:
        raise ConfigError(
            f"only {int(mask.sum())} bins beyond {k_min} k_L (need {min_bins}); "
            "increase the grid momentum range"
        )
    vals = dist.k[mask] ** 4 * dist.n[mask]
    mean = float(vals.mean())
    if mean == 0.0:
        return 0.0, float("inf")
    return mean, float(vals.std() / mean)


def gaussian_blur(dist: MomentumDist, waist_kl: float) -> MomentumDist:
    """Convolve n(k) with a Gaussian of 1/e^2 waist ``waist_kl`` (TOF model)."""
    if waist_kl <= 0:
        return dist
    half_width = int(np.ceil(3.0 * waist_kl / dist.dk))
    offsets = np.arange(-half_width, half_width + 1) * dist.dk
    kernel = np.exp(-2.0 * offsets ** 2 / waist_kl ** 2)
    kernel /= kernel.sum()
    blurred = np.convolve(dist.n, kernel, mode="same")
    return _finalize_dist(dist.k, blurred)

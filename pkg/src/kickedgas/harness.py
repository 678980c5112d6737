"""Experiment driver: ground state -> kicked evolution -> observables -> files.

A run writes into its own directory: ``series.csv`` (one row per recorded
kick count), ``nk_<np>.csv`` and ``g1_<np>.csv`` per snapshot, optionally
``obdm_<np>.bin``, the resolved ``config.cfg`` and a ``manifest.txt``
listing every artifact with its byte length.  CSV contents are a pure
function of the configuration (timestamps only appear in the manifest), so
identical configs give byte-identical data files.
"""

import csv
import datetime as _dt
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._version import VERSION
from .config import SWEEPABLE, ExperimentConfig
from .errors import ConfigError, KickedGasError
from .floquet import iterate_evolution
from .grid import Orbital
from .observables import (average_dists, contact_plateau, fit_decay,
                          g1_from_momentum, info_entropy, jsd, kinetic_energy,
                          kinetic_energy_orbitals, momentum_dist_obdm,
                          momentum_dist_set)
from .oracle import brute_obdm_n2
from .spham import lowest_eigenstates, potential_on_grid
from .tonks import (SlaterState, green_function, obdm_from_green,
                    von_neumann_entropy)

SERIES_COLUMNS = (
    "n_p", "energy_er", "s_info", "s_vn_raw", "s_vn_unit_trace", "jsd_prev",
    "contact", "contact_cv", "fit_model", "fit_param", "fit_residual",
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    val = float(value)
    if math.isnan(val):
        return ""
    return f"{val:.12g}"


@dataclass
class RunManifest:
    out_dir: Path
    info: dict
    diagnostics: dict
    files: list  # (relative name, byte length)

    def verify(self) -> bool:
        for name, size in self.files:
            path = self.out_dir / name
            if not path.is_file() or path.stat().st_size != size:
                return False
        return True

    def write(self):
        lines = [f"{k} = {v}" for k, v in self.info.items()]
        lines += [f"diag.{k} = {_fmt(v)}" for k, v in self.diagnostics.items()]
        lines += [f"file.{name} = {size}" for name, size in self.files]
        (self.out_dir / "manifest.txt").write_text("\n".join(lines) + "\n")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _series_row(n_p, **cols):
    row = {key: None for key in SERIES_COLUMNS}
    row["n_p"] = n_p
    row.update(cols)
    return row


def _dist_columns(cfg: ExperimentConfig, dist, prev_dist):
    cols = {"s_info": info_entropy(dist)}
    cols["jsd_prev"] = jsd(dist, prev_dist) if prev_dist is not None else None
    try:
        contact, cv = contact_plateau(dist, k_min=cfg["analysis.contact_kmin"])
        cols["contact"], cols["contact_cv"] = contact, cv
    except ConfigError:
        pass
    corr = g1_from_momentum(dist, z_max_a=cfg["analysis.z_max_a"])
    model = cfg.fit_model()
    lo, hi = cfg.window("analysis.fit_window")
    try:
        fit = fit_decay(corr, model, (max(lo, corr.z[0]), min(hi, corr.z[-1])))
        cols.update(fit_model=fit.model, fit_param=fit.param,
                    fit_residual=fit.residual_rms)
    except KickedGasError:
        cols["fit_model"] = model
    return cols, corr


def _snapshot_files(out_dir, n_p, dist, corr, files):
    nk_name = f"nk_{n_p}.csv"
    _write_csv(out_dir / nk_name, ("k_over_kL", "n_of_k"), zip(dist.k, dist.n))
    files.append((nk_name, (out_dir / nk_name).stat().st_size))
    g1_name = f"g1_{n_p}.csv"
    _write_csv(out_dir / g1_name, ("z_over_a", "g1"), zip(corr.z, corr.g1))
    files.append((g1_name, (out_dir / g1_name).stat().st_size))


def run_experiment(cfg: ExperimentConfig, out_dir, quiet: bool = True) -> RunManifest:
    """Execute one configuration and persist every artifact under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    scaled = cfg.scaled()
    grid = cfg.grid()
    trap = cfg.trap()
    sched = cfg.schedule()
    v_ext = potential_on_grid(trap, grid, scaled)
    n_particles = cfg.n_particles()
    series_points, snap_points = cfg.record_points()

    if not quiet:
        print(f"[run] K={sched.K:.4g} hbar_eff={scaled.hbar_eff:.4g} "
              f"n_dim={grid.n_dim} N={n_particles} kicks={sched.n_kicks}")

    eig = lowest_eigenstates(trap, grid, scaled, n_particles)
    files = []
    diagnostics = {
        "eig_residual": eig.residual,
        "max_boundary_occupancy": 0.0,
        "max_ortho_defect": 0.0,
    }

    evo_kwargs = dict(
        boundary_tol=cfg["boundary.tol"],
        boundary_mode=cfg["boundary.mode"],
    )

    rows = []
    if cfg.is_tg:
        _run_tg(cfg, grid, scaled, v_ext, sched, eig, series_points, snap_points,
                out_dir, files, diagnostics, rows, evo_kwargs, quiet)
    else:
        _run_gamma0(cfg, grid, scaled, v_ext, sched, eig, series_points,
                    snap_points, out_dir, files, diagnostics, rows, evo_kwargs,
                    quiet)

    _write_csv(out_dir / "series.csv", SERIES_COLUMNS,
               ([row[c] for c in SERIES_COLUMNS] for row in rows))
    files.insert(0, ("series.csv", (out_dir / "series.csv").stat().st_size))

    (out_dir / "config.cfg").write_text("\n".join(cfg.lines()) + "\n")
    files.append(("config.cfg", (out_dir / "config.cfg").stat().st_size))

    manifest = RunManifest(
        out_dir=out_dir,
        info={
            "preset": cfg["preset"] or "(none)",
            "config_hash": cfg.hash(),
            "version": VERSION,
            "created": _dt.datetime.now().isoformat(timespec="seconds"),
            "gamma": cfg["gamma"],
            "n_particles": n_particles,
            "n_kicks": sched.n_kicks,
            "kick_strength": f"{sched.K:.8g}",
            "hbar_eff": f"{scaled.hbar_eff:.8g}",
            "grid_n_dim": grid.n_dim,
            "grid_length_um": f"{grid.length_z * 1e6:.6g}",
        },
        diagnostics=diagnostics,
        files=files,
    )
    manifest.write()
    return manifest


def _run_gamma0(cfg, grid, scaled, v_ext, sched, eig, series_points, snap_points,
                out_dir, files, diagnostics, rows, evo_kwargs, quiet):
    realizations = cfg["kick.realizations"] if sched.kind == "random" else 1
    dists_by_point = {n_p: [] for n_p in series_points}
    for real in range(realizations):
        sched_r = replace(sched, rng_seed=sched.rng_seed + real)
        for snap in iterate_evolution([eig.orbitals[0]], sched_r, v_ext, scaled,
                                      series_points, **evo_kwargs):
            diagnostics["max_boundary_occupancy"] = max(
                diagnostics["max_boundary_occupancy"], snap.boundary)
            dists_by_point[snap.n_p].append(momentum_dist_set(snap.amplitudes, grid))

    cache = {}
    for n_p in series_points:
        dist = average_dists(dists_by_point[n_p])
        cache[n_p] = dist
        prev = cache.get(n_p - cfg["analysis.jsd_lag"])
        cols, corr = _dist_columns(cfg, dist, prev)
        cols["energy_er"] = kinetic_energy(dist)
        rows.append(_series_row(n_p, **cols))
        if n_p in snap_points:
            _snapshot_files(out_dir, n_p, dist, corr, files)
        if not quiet:
            print(f"[n_p {n_p:5d}] E={cols['energy_er']:.4f} Er  "
                  f"S={cols['s_info']:.4f}")


def _run_tg(cfg, grid, scaled, v_ext, sched, eig, series_points, snap_points,
            out_dir, files, diagnostics, rows, evo_kwargs, quiet):
    check_oracle = (cfg["oracle.validate_obdm"] and eig.orbitals and
                    len(eig.orbitals) == 2 and grid.n_dim <= 128)
    cache = {}
    for snap in iterate_evolution(eig.orbitals, sched, v_ext, scaled,
                                  series_points, **evo_kwargs):
        diagnostics["max_boundary_occupancy"] = max(
            diagnostics["max_boundary_occupancy"], snap.boundary)
        diagnostics["max_ortho_defect"] = max(
            diagnostics["max_ortho_defect"], snap.ortho_defect)
        n_p = snap.n_p
        cols = {"energy_er": kinetic_energy_orbitals(snap.amplitudes, grid)}
        if n_p in snap_points:
            orbitals = [Orbital(a, grid) for a in snap.amplitudes]
            state = SlaterState.from_orbitals(orbitals)
            green = green_function(state, method="fast")
            obdm = obdm_from_green(green, grid, state.n_particles)
            if check_oracle:
                brute = brute_obdm_n2(orbitals[0], orbitals[1])
                defect = float(np.max(np.abs(brute.rho - obdm.rho)))
                if defect > 1e-8:
                    raise KickedGasError(
                        f"oracle cross-check failed at kick {n_p}: {defect:.3e}")
            dist = momentum_dist_obdm(obdm)
            prev = cache.get(n_p - cfg["analysis.jsd_lag"])
            dist_cols, corr = _dist_columns(cfg, dist, prev)
            cols.update(dist_cols)
            cols["s_vn_raw"] = von_neumann_entropy(obdm)
            cols["s_vn_unit_trace"] = von_neumann_entropy(obdm, normalized=True)
            cache[n_p] = dist
            _snapshot_files(out_dir, n_p, dist, corr, files)
            if cfg["record.dump_obdm"]:
                name = f"obdm_{n_p}.bin"
                obdm.save_binary(out_dir / name)
                files.append((name, (out_dir / name).stat().st_size))
        rows.append(_series_row(n_p, **cols))
        if not quiet:
            extra = f"  S_vN={cols['s_vn_raw']:.4f}" if "s_vn_raw" in cols else ""
            print(f"[n_p {n_p:5d}] E={cols['energy_er']:.4f} Er{extra}")


def load_series(path) -> dict:
    """Read series.csv back as float arrays (empty fields become NaN)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        raw = list(reader)
    out = {}
    for col in SERIES_COLUMNS:
        if col == "fit_model":
            out[col] = np.array([r[col] for r in raw])
        else:
            out[col] = np.array(
                [float(r[col]) if r[col] else np.nan for r in raw])
    return out


def localized_window_mean(n_p: np.ndarray, values: np.ndarray, window):
    """Mean over a kick window plus the relative drift between its halves."""
    lo, hi = window
    mask = (n_p >= lo) & (n_p <= hi) & np.isfinite(values)
    if mask.sum() < 4:
        raise ConfigError(
            f"window [{lo}, {hi}] holds {int(mask.sum())} samples, need >= 4")
    sel_n = n_p[mask]
    sel_v = values[mask]
    mean = float(sel_v.mean())
    mid = 0.5 * (lo + hi)
    first = sel_v[sel_n < mid]
    second = sel_v[sel_n >= mid]
    drift = float((second.mean() - first.mean()) / mean) if mean else 0.0
    return mean, drift


def sweep(cfg: ExperimentConfig, axis: str, values, out_root, quiet: bool = True):
    """One run per value of a sweepable key, plus a localized-energy summary."""
    if axis not in SWEEPABLE:
        raise ConfigError(f"axis {axis!r} is not sweepable; pick one of {SWEEPABLE}")
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    window = cfg.window()
    manifests = []
    summary = []
    for value in values:
        tag = f"{axis.replace('.', '_')}={value}"
        sub = out_root / tag
        try:
            run_cfg = cfg.with_overrides({axis: str(value)})
            manifest = run_experiment(run_cfg, sub, quiet=quiet)
            series = load_series(sub / "series.csv")
            mean, drift = localized_window_mean(
                series["n_p"], series["energy_er"], window)
            summary.append((value, "ok", mean, drift))
            manifests.append(manifest)
        except KickedGasError as exc:
            summary.append((value, f"failed: {exc}", None, None))
    _write_csv(out_root / "summary.csv",
               (axis, "status", "localized_energy_er", "window_drift"), summary)
    return manifests

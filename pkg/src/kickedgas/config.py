"""Flat key = value configuration with presets and stable hashing.

The format is one dotted key per line, ``#`` comments, UTF-8.  Presets are
config files shipped with the package; CLI ``--set key=value`` overrides
win over preset and file values.  The config hash is taken over the sorted
resolved key/value lines, so key order never matters.
"""

import hashlib
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .floquet import KickSchedule
from .grid import Grid, make_grid
from .spham import TrapSpec
from .units import PhysicalParams, ScaledParams, derive_scaled

DEFAULTS = {
    "preset": "",
    "species.mass_kg": 2.2069469e-25,
    "species.lattice_nm": 532.25,
    "drive.period_us": 60.0,
    "drive.pulse_us": 10.0,
    "drive.depth_er": 20.0,
    "gamma": "0",
    "particles.n": 18,
    "grid.n_dim": 2048,
    "grid.length_um": 150.0,
    "grid.snap": True,
    "trap.kind": "flat_bottom",
    "trap.v1_er": 45.7,
    "trap.v2_er": 9.3,
    "trap.w1_um": 300.0,
    "trap.w2_um": 135.0,
    "trap.freq_hz": 14.7,
    "kick.kind": "periodic_square",
    "kick.n": 800,
    "kick.K": 0.0,  # 0 means: derive from the drive parameters
    "kick.substeps": 8,
    "kick.substeps_free": 1,
    "kick.split_order": 2,
    "kick.seed": 1234,
    "kick.jitter": 0.0,
    "kick.realizations": 1,
    "record.series_every": 10,
    "record.obdm_every": 100,
    "record.first_kick": True,
    "record.dump_obdm": False,
    "boundary.tol": 1e-6,
    "boundary.mode": "raise",
    "analysis.window": "400:800",
    "analysis.jsd_lag": 100,
    "analysis.jsd_frozen_tol": 1e-3,
    "analysis.fit_window": "0.25:2.5",
    "analysis.fit_model": "",  # empty: lorentzian for gamma=0, exponential for TG
    "analysis.z_max_a": 25.0,
    "analysis.contact_kmin": 6.0,
    "analysis.tof_blur_waist_kl": 0.0,
    "oracle.validate_obdm": False,
}

SWEEPABLE = ("grid.n_dim", "particles.n", "trap.kind", "kick.K")


def _parse_value(text: str):
    text = text.strip()
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = _parse_value(val)
    return values


@dataclass(frozen=True)
class ExperimentConfig:
    values: tuple  # sorted (key, value) pairs

    def __getitem__(self, key: str):
        d = dict(self.values)
        if key not in d:
            raise ConfigError(f"unknown config key {key!r}")
        return d[key]

    def with_overrides(self, overrides: dict) -> "ExperimentConfig":
        d = dict(self.values)
        for key, val in overrides.items():
            if key not in d:
                raise ConfigError(f"unknown config key {key!r}")
            d[key] = _parse_value(val) if isinstance(val, str) else val
        return ExperimentConfig(values=tuple(sorted(d.items())))

    def lines(self):
        return [f"{k} = {_format_value(v)}" for k, v in sorted(self.values)]

    def hash(self) -> str:
        digest = hashlib.sha256("\n".join(self.lines()).encode()).hexdigest()
        return digest[:16]

    # -- resolved domain objects -------------------------------------------

    def physical(self) -> PhysicalParams:
        return PhysicalParams(
            lattice_constant=self["species.lattice_nm"] * 1e-9,
            particle_mass=self["species.mass_kg"],
            kick_period=self["drive.period_us"] * 1e-6,
            pulse_width=self["drive.pulse_us"] * 1e-6,
            kick_depth=self["drive.depth_er"],
        )

    def scaled(self) -> ScaledParams:
        return derive_scaled(self.physical())

    def grid(self) -> Grid:
        return make_grid(
            n_dim=self["grid.n_dim"],
            length_z=self["grid.length_um"] * 1e-6,
            lattice_constant=self["species.lattice_nm"] * 1e-9,
            snap_to_kick=self["grid.snap"],
        )

    def trap(self) -> TrapSpec:
        return TrapSpec(
            kind=self["trap.kind"],
            v1_er=self["trap.v1_er"],
            v2_er=self["trap.v2_er"],
            w1=self["trap.w1_um"] * 1e-6,
            w2=self["trap.w2_um"] * 1e-6,
            freq_hz=self["trap.freq_hz"],
        )

    def schedule(self) -> KickSchedule:
        scaled = self.scaled()
        K = self["kick.K"]
        if not K:
            K = scaled.K
        return KickSchedule(
            kind=self["kick.kind"],
            n_kicks=self["kick.n"],
            K=float(K),
            pulse_fraction=scaled.pulse_fraction,
            sub_steps_in_pulse=self["kick.substeps"],
            sub_steps_free=self["kick.substeps_free"],
            split_order=self["kick.split_order"],
            rng_seed=self["kick.seed"],
            period_jitter=self["kick.jitter"],
        )

    @property
    def is_tg(self) -> bool:
        gamma = str(self["gamma"]).lower()
        if gamma in ("inf", "infinity", "tg"):
            return True
        if gamma in ("0", "0.0", "none"):
            return False
        raise ConfigError(
            f"gamma must be 0 or inf (the two solvable limits), got {gamma!r}"
        )

    def n_particles(self) -> int:
        n = self["particles.n"]
        if n < 1:
            raise ConfigError("particles.n must be >= 1")
        return n if self.is_tg else 1

    def record_points(self):
        """(series_points, snapshot_points); snapshots carry files and,
        for the hard-core gas, the density-matrix ladder."""
        n_kicks = self["kick.n"]
        every = self["record.series_every"]
        if every < 1:
            raise ConfigError("record.series_every must be >= 1")
        series = set(range(0, n_kicks + 1, every))
        series.add(n_kicks)
        if self["record.first_kick"] and n_kicks >= 1:
            series.add(1)
        snaps = set()
        snap_every = self["record.obdm_every"]
        if snap_every:
            # ladder 1, 1+every, 1+2*every, ... mirrors the measurement protocol
            snaps = set(range(1, n_kicks + 1, snap_every)) if n_kicks >= 1 else set()
            snaps |= {0, n_kicks}
        return sorted(series | snaps), sorted(snaps)

    def window(self, key: str = "analysis.window"):
        text = str(self[key])
        try:
            lo, hi = (float(part) for part in text.split(":"))
        except ValueError as exc:
            raise ConfigError(f"{key} must look like 'lo:hi', got {text!r}") from exc
        if not lo < hi:
            raise ConfigError(f"{key} must have lo < hi, got {text!r}")
        return lo, hi

    def fit_model(self) -> str:
        model = self["analysis.fit_model"]
        if model:
            return model
        return "exponential" if self.is_tg else "lorentzian"


def preset_names():
    root = resources.files("kickedgas").joinpath("presets")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def load_config(config_path=None, preset=None, overrides=None) -> ExperimentConfig:
    values = dict(DEFAULTS)
    if preset:
        res = resources.files("kickedgas").joinpath("presets", f"{preset}.cfg")
        if not res.is_file():
            raise ConfigError(
                f"unknown preset {preset!r}; available: {', '.join(preset_names())}"
            )
        parsed = parse_config_text(res.read_text())
        _merge(values, parsed)
        values["preset"] = preset
    if config_path:
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        _merge(values, parse_config_text(path.read_text()))
    cfg = ExperimentConfig(values=tuple(sorted(values.items())))
    if overrides:
        pairs = {}
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            key, _, val = item.partition("=")
            pairs[key.strip()] = val.strip()
        cfg = cfg.with_overrides(pairs)
    return cfg


def _merge(base: dict, extra: dict):
    for key, val in extra.items():
        if key not in base:
            raise ConfigError(f"unknown config key {key!r}")
        base[key] = val

import numpy as np
import pytest

from kickedgas import (ConfigError, load_config, load_series,
                       localized_window_mean, preset_names, run_experiment,
                       sweep)
from kickedgas.cli import main as cli_main
from kickedgas.config import parse_config_text

TINY = [
    "grid.n_dim=256", "grid.length_um=20", "kick.n=30",
    "record.series_every=10", "record.obdm_every=15",
    "boundary.mode=off", "analysis.jsd_lag=10",
    "analysis.window=10:30", "analysis.fit_window=0.1:1.5",
    "analysis.contact_kmin=6",
]


def tiny_config(*extra):
    return load_config(overrides=TINY + list(extra))


def test_parse_config_text_types():
    values = parse_config_text(
        "# comment\nkick.n = 12\nkick.jitter = 0.25\n"
        "grid.snap = true\ntrap.kind = gaussian  # inline\n")
    assert values == {"kick.n": 12, "kick.jitter": 0.25,
                      "grid.snap": True, "trap.kind": "gaussian"}


def test_parse_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_config_text("this is not a config\n")


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        load_config(overrides=["frobnicate=1"])


def test_hash_stable_under_reordering():
    a = load_config(overrides=["kick.n=5", "grid.n_dim=64"])
    b = load_config(overrides=["grid.n_dim=64", "kick.n=5"])
    assert a.hash() == b.hash()
    c = load_config(overrides=["grid.n_dim=128", "kick.n=5"])
    assert a.hash() != c.hash()


def test_presets_resolve():
    names = preset_names()
    assert "fig2-gamma0-desk" in names and "fig3-tg-desk" in names
    for name in names:
        cfg = load_config(preset=name)
        cfg.schedule()
        cfg.grid()
        cfg.trap()
        series, snaps = cfg.record_points()
        assert all(b > a for a, b in zip(series, series[1:]))
        assert all(b > a for a, b in zip(snaps, snaps[1:]))


def test_unknown_preset():
    with pytest.raises(ConfigError):
        load_config(preset="fig9-nonexistent")


def test_gamma_validation():
    assert not load_config(overrides=["gamma=0"]).is_tg
    assert load_config(overrides=["gamma=inf"]).is_tg
    with pytest.raises(ConfigError):
        load_config(overrides=["gamma=2"]).is_tg


def test_record_ladder():
    cfg = load_config(overrides=["kick.n=500", "record.series_every=100",
                                 "record.obdm_every=200"])
    series, snaps = cfg.record_points()
    assert snaps == [0, 1, 201, 401, 500]
    assert series[:3] == [0, 1, 100] and series[-1] == 500


def test_window_parsing():
    cfg = load_config(overrides=["analysis.window=100:300"])
    assert cfg.window() == (100.0, 300.0)
    with pytest.raises(ConfigError):
        load_config(overrides=["analysis.window=300:100"]).window()


def test_localized_window_mean_constant_and_linear():
    n_p = np.arange(0, 101, 10, dtype=float)
    const = np.full_like(n_p, 7.0)
    mean, drift = localized_window_mean(n_p, const, (0, 100))
    assert mean == 7.0 and drift == 0.0
    slope = 0.04
    lin = slope * n_p
    mean, drift = localized_window_mean(n_p, lin, (0, 100))
    # halves differ by slope * window/2
    assert drift * mean == pytest.approx(slope * 50.0, rel=0.12)
    with pytest.raises(ConfigError):
        localized_window_mean(n_p, const, (90, 100))


def test_run_gamma0_and_determinism(tmp_path):
    cfg = tiny_config()
    m1 = run_experiment(cfg, tmp_path / "a")
    m2 = run_experiment(cfg, tmp_path / "b")
    assert m1.verify() and m2.verify()
    assert (tmp_path / "a/series.csv").read_bytes() == (tmp_path / "b/series.csv").read_bytes()
    assert (tmp_path / "a/nk_16.csv").read_bytes() == (tmp_path / "b/nk_16.csv").read_bytes()
    series = load_series(tmp_path / "a/series.csv")
    assert series["n_p"][0] == 0 and series["n_p"][-1] == 30
    assert np.all(np.isfinite(series["energy_er"]))


def test_run_tg_writes_snapshots(tmp_path):
    cfg = tiny_config("gamma=inf", "particles.n=3")
    manifest = run_experiment(cfg, tmp_path / "tg")
    assert manifest.verify()
    names = [name for name, _ in manifest.files]
    assert "nk_16.csv" in names and "g1_16.csv" in names
    series = load_series(tmp_path / "tg/series.csv")
    snap_rows = np.isfinite(series["s_vn_raw"])
    assert snap_rows.sum() >= 3
    assert np.all(np.isfinite(series["energy_er"]))


def test_run_tg_obdm_dump_and_oracle(tmp_path):
    cfg = tiny_config("gamma=inf", "particles.n=2", "grid.n_dim=64",
                      "kick.n=10", "record.obdm_every=5",
                      "record.dump_obdm=true", "oracle.validate_obdm=true")
    manifest = run_experiment(cfg, tmp_path / "tg2")
    names = [name for name, _ in manifest.files]
    assert any(n.startswith("obdm_") and n.endswith(".bin") for n in names)
    assert manifest.verify()


def test_manifest_detects_truncation(tmp_path):
    cfg = tiny_config()
    manifest = run_experiment(cfg, tmp_path / "c")
    (tmp_path / "c/series.csv").write_text("gone")
    assert not manifest.verify()


def test_sweep_summary_and_error_isolation(tmp_path):
    cfg = tiny_config("kick.n=20", "analysis.window=0:20")
    manifests = sweep(cfg, "kick.K", [1.0, -1.0], tmp_path / "sweep")
    # the negative kick strength is fine physically; sweep both ok
    assert len(manifests) == 2
    summary = (tmp_path / "sweep/summary.csv").read_text().splitlines()
    assert summary[0].startswith("kick.K,")
    assert len(summary) == 3
    with pytest.raises(ConfigError):
        sweep(cfg, "kick.seed", [1, 2], tmp_path / "bad")


def test_sweep_marks_failures(tmp_path):
    cfg = tiny_config("kick.n=20", "analysis.window=0:20")
    manifests = sweep(cfg, "grid.n_dim", [128, 3], tmp_path / "sweepfail")
    assert len(manifests) == 1
    rows = (tmp_path / "sweepfail/summary.csv").read_text().splitlines()
    assert "failed" in rows[2]


def test_cli_derive_params(capsys):
    assert cli_main(["derive-params", "--preset", "fig2-gamma0-desk"]) == 0
    out = capsys.readouterr().out
    assert "K" in out and "hbar_eff" in out


def test_cli_bad_config_exit_code(capsys):
    assert cli_main(["derive-params", "--set", "bogus.key=1"]) == 2


def test_cli_oracle_bessel(capsys):
    assert cli_main(["oracle", "bessel", "--kappa", "0.83", "--n-max", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 7


def test_cli_oracle_obdm(capsys):
    assert cli_main(["oracle", "obdm-n2", "--n-dim", "32", "--seed", "5"]) == 0
    assert "rho_brute - rho_jwt" in capsys.readouterr().out


def test_cli_run_and_compare(tmp_path, capsys):
    args = ["run", "--out", str(tmp_path)]
    for item in TINY:
        args += ["--set", item]
    assert cli_main(args) == 0
    out_dir = next((tmp_path / "custom").iterdir())
    nk = sorted(out_dir.glob("nk_*.csv"))
    assert cli_main(["compare", str(nk[0]), str(nk[0])]) == 0
    assert "JSD = 0" in capsys.readouterr().out


def test_cli_presets_listing(capsys):
    assert cli_main(["presets"]) == 0
    assert "fig3-tg-desk" in capsys.readouterr().out

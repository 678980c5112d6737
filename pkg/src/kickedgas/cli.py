"""Command-line interface.

Subcommands: derive-params, ground-state, run, sweep, oracle, compare.
Exit codes: 0 success, 2 configuration error, 3 numerical-invariant
violation, 4 convergence failure.
"""

import argparse
import datetime as _dt
import sys
from pathlib import Path

import numpy as np

from .config import load_config, preset_names
from .errors import ConfigError, ConvergenceError, InvariantError
from .harness import _write_csv, run_experiment, sweep
from .observables import MomentumDist, jsd
from .oracle import bessel_one_kick, brute_obdm_n2
from .spham import lowest_eigenstates, potential_on_grid
from .units import derive_scaled


def _add_config_args(parser):
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--preset", help="named preset shipped with the package")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key")
    parser.add_argument("--seed", type=int, help="shortcut for --set kick.seed=...")


def _config_from(args):
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"kick.seed={args.seed}")
    return load_config(args.config, args.preset, overrides)


def _out_dir(args, cfg) -> Path:
    root = Path(args.out) if args.out else Path("runs")
    stamp = _dt.datetime.now().strftime("%Y%m%d-%H%M%S")
    preset = cfg["preset"] or "custom"
    return root / preset / stamp


def cmd_derive_params(args):
    cfg = _config_from(args)
    scaled = derive_scaled(cfg.physical())
    print(f"hbar_eff       = {scaled.hbar_eff:.6g}")
    print(f"kappa          = {scaled.kappa:.6g}")
    print(f"K              = {scaled.K:.6g}")
    print(f"pulse_fraction = {scaled.pulse_fraction:.6g}")
    print(f"recoil_rate    = {scaled.recoil_rate:.6g} 1/s")
    return 0


def cmd_ground_state(args):
    cfg = _config_from(args)
    grid = cfg.grid()
    scaled = cfg.scaled()
    trap = cfg.trap()
    v_ext = potential_on_grid(trap, grid, scaled)
    eig = lowest_eigenstates(trap, grid, scaled, cfg.n_particles())
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "energies.csv", ("state", "energy_er"),
               enumerate(eig.energies))
    density = sum(np.abs(o.amplitudes) ** 2 for o in eig.orbitals)
    _write_csv(out / "density.csv", ("z_over_a", "density", "v_ext_scaled"),
               zip(grid.zeta / (2 * np.pi), density, v_ext))
    print(f"ground state: E_0 = {eig.energies[0]:.6g} Er, "
          f"residual {eig.residual:.2e}; wrote {out}")
    return 0


def cmd_run(args):
    cfg = _config_from(args)
    out = _out_dir(args, cfg)
    manifest = run_experiment(cfg, out, quiet=args.quiet)
    print(f"run complete: {manifest.out_dir}")
    return 0


def cmd_sweep(args):
    cfg = _config_from(args)
    values = args.values.split(",")
    out = _out_dir(args, cfg)
    manifests = sweep(cfg, args.axis, values, out, quiet=args.quiet)
    print(f"sweep complete: {len(manifests)}/{len(values)} runs ok; wrote {out}")
    return 0


def cmd_oracle(args):
    if args.mode == "bessel":
        pops = bessel_one_kick(args.kappa, args.n_max)
        for n, p in zip(range(-args.n_max, args.n_max + 1), pops):
            print(f"{n:+d} {p:.12g}")
        return 0
    # obdm-n2: random orthonormal pair on a small grid
    from .grid import Orbital, make_grid
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    grid = make_grid(args.n_dim, 20e-6, 532.25e-9)
    raw = rng.normal(size=(grid.n_dim, 2)) + 1j * rng.normal(size=(grid.n_dim, 2))
    q, _ = np.linalg.qr(raw)
    orbs = [Orbital(q[:, i] / np.sqrt(grid.dz), grid) for i in range(2)]
    obdm = brute_obdm_n2(orbs[0], orbs[1])
    from .tonks import obdm_from_orbitals
    fast = obdm_from_orbitals(orbs)
    defect = float(np.max(np.abs(obdm.rho - fast.rho)))
    print(f"n_dim={args.n_dim} max |rho_brute - rho_jwt| = {defect:.3e}")
    return 0 if defect < 1e-8 else 3


def cmd_compare(args):
    def read_nk(path):
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        return MomentumDist(k=data[:, 0], n=data[:, 1])

    a = read_nk(args.file_a)
    b = read_nk(args.file_b)
    print(f"JSD = {jsd(a, b):.8g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kickedgas",
        description="Kicked 1D Bose gas simulator (free and hard-core limits)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive-params", help="print the dimensionless kick constants")
    _add_config_args(p)
    p.set_defaults(func=cmd_derive_params)

    p = sub.add_parser("ground-state", help="diagonalize the trap and dump spectra")
    _add_config_args(p)
    p.add_argument("--out", help="output root (default ./runs)")
    p.set_defaults(func=cmd_ground_state)

    p = sub.add_parser("run", help="run one experiment configuration")
    _add_config_args(p)
    p.add_argument("--out", help="output root (default ./runs)")
    p.add_argument("--quiet", action="store_true", help="suppress progress lines")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="repeat a run over values of one key")
    _add_config_args(p)
    p.add_argument("--axis", required=True,
                   help="sweepable key (grid.n_dim, particles.n, trap.kind, kick.K)")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--out", help="output root (default ./runs)")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="run a brute-force oracle")
    p.add_argument("mode", choices=("bessel", "obdm-n2"))
    p.add_argument("--kappa", type=float, default=0.83, help="kick phase K/hbar_eff")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--n-dim", type=int, default=64)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="JSD between two saved nk_<np>.csv files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("presets", help="list shipped presets")
    p.set_defaults(func=lambda args: (print("\n".join(preset_names())), 0)[1])

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())

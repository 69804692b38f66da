"""Command-line front end.

Every subcommand reads the TOML configuration (``--config``), applies the
explicit command-line overrides, writes ``resolved_config.toml`` into the
output directory and then its CSV/JSON products.  Environment variables are
never consulted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, config_dict, load_config, write_resolved
from .errors import KbmError

SUBCOMMANDS = ("profiles", "slow", "fast", "bvp", "pic", "verify", "figures")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="TOML scenario file")
    p.add_argument("--out", type=Path, help="output directory (overrides config)")
    p.add_argument("--seed", type=int, help="seed (overrides config)")


def _physics(p: argparse.ArgumentParser):
    p.add_argument("--profile", choices=("gaussian", "lorentz", "tabulated"))
    p.add_argument("--table", help="electron (and default ion) density table for the tabulated profile")
    for name in ("eps", "mu", "gamma", "b", "Ti0"):
        p.add_argument(f"--{name}", type=float)


def _grid(p: argparse.ArgumentParser):
    p.add_argument("--taus", type=float, nargs="+", metavar="TAU")
    p.add_argument("--x", type=float, nargs=3, metavar=("START", "STOP", "NUM"), help="x-grid")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kbmplasma", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profiles", help="initial densities, field, xi, delta, Omega on a grid")
    _common(p), _physics(p)
    p.add_argument("--x", type=float, nargs=3, metavar=("START", "STOP", "NUM"))

    p = sub.add_parser("slow", help="slow (ion) solution table")
    _common(p), _physics(p), _grid(p)
    p.add_argument("--coordinate", choices=("label", "lab"))
    p.add_argument("--primed", choices=("xi", "bvp"))

    p = sub.add_parser("fast", help="fast (electron) reconstruction")
    _common(p), _physics(p), _grid(p)
    p.add_argument("--points-per-period", type=int)
    p.add_argument("--delta-mode", choices=("label-frozen", "i3-scaled"))

    p = sub.add_parser("bvp", help="quasi-neutral potential problem")
    _common(p), _physics(p)
    p.add_argument("--x-max", type=float)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("pic", help="reference kinetic run")
    _common(p), _physics(p)
    p.add_argument("--n-particles", type=int)
    p.add_argument("--tau-end", type=float)
    p.add_argument("--resume", type=Path, help="checkpoint to resume from")

    p = sub.add_parser("verify", help="invariant/property suite")
    _common(p), _physics(p)
    p.add_argument("which", nargs="?", default="all", choices=("all", "symmetry", "invariants"))

    p = sub.add_parser("figures", help="figure-data CSV bundle")
    _common(p)
    p.add_argument("--figure", type=int, action="append", help="figure id 1..7 (repeatable; default all configured)")
    return parser


def _set(d: dict, path: str, value):
    if value is None:
        return
    keys = path.split(".")
    for k in keys[:-1]:
        d = d.setdefault(k, {})
    d[keys[-1]] = value


def resolve(args) -> tuple[RunConfig, Path | None]:
    """Merge the config file with explicit flags; returns the config and the file's directory."""
    if args.config is not None:
        base_cfg = load_config(args.config)
        base = args.config.resolve().parent
    else:
        base_cfg = RunConfig()
        base = None
    d = config_dict(base_cfg)
    d["scenario"] = args.command
    _set(d, "out", str(args.out) if args.out is not None else None)
    _set(d, "seed", args.seed)
    for name in ("eps", "mu", "gamma", "b", "Ti0"):
        _set(d, f"params.{name}", getattr(args, name, None))
    _set(d, "profile.kind", getattr(args, "profile", None))
    _set(d, "profile.table", getattr(args, "table", None))
    block = {"slow": "slow", "fast": "fast"}.get(args.command)
    if block:
        _set(d, f"{block}.taus", args.taus)
        if args.x is not None:
            _set(d, f"{block}.x", {"start": args.x[0], "stop": args.x[1], "num": int(args.x[2])})
    if args.command == "slow":
        _set(d, "slow.coordinate", args.coordinate)
        _set(d, "slow.primed", args.primed)
    if args.command == "fast":
        _set(d, "fast.points_per_period", args.points_per_period)
        _set(d, "fast.delta_mode", args.delta_mode)
    if args.command == "bvp":
        _set(d, "bvp.x_max", args.x_max)
        _set(d, "bvp.n", args.grid_n)
        _set(d, "tolerances.bvp", args.tol)
    if args.command == "pic":
        _set(d, "pic.n_particles", args.n_particles)
        _set(d, "pic.tau_end", args.tau_end)
    cfg = RunConfig.model_validate(d)
    return cfg, base


def _fields(cfg, base):
    from .profiles import field_functions

    return field_functions(cfg.density(base), cfg.plasma())


def cmd_profiles(cfg, base, args, out):
    from .figures import write_csv

    f = _fields(cfg, base)
    x = np.linspace(args.x[0], args.x[1], int(args.x[2])) if args.x else np.linspace(-5.0, 5.0, 201)
    write_csv(
        out / "profiles.csv",
        ("x", "n_e0", "n_i0", "p0", "xi", "delta", "omega"),
        (x, f.n_e0(x), f.n_i0(x), f.p0(x), f.xi(x), f.delta(x), f.omega(x)),
    )
    return 0


def _primed(cfg, base):
    if cfg.slow.primed != "bvp":
        return None
    from .bvp import GridSpec, primed_state, solve_quasineutral_potential

    f, p = _fields(cfg, base), cfg.plasma()
    sol = solve_quasineutral_potential(f, p, GridSpec(cfg.bvp.x_max, cfg.bvp.n), cfg.tolerances.bvp, cfg.bvp.max_iter)
    return primed_state(sol, f, p)


def cmd_slow(cfg, base, args, out):
    from .figures import write_csv
    from .slow import lab_profile, slow_table

    f, p = _fields(cfg, base), cfg.plasma()
    x = cfg.slow.x.values()
    primed = _primed(cfg, base)
    if cfg.slow.coordinate == "label":
        rows = slow_table(x, cfg.slow.taus, f, p, primed)
    else:
        rows = []
        for tau in cfg.slow.taus:
            rows += [(s.tau, s.x_prime, s.x_bar, s.n_av, s.v_av, s.T, s.p_bar) for s in lab_profile(x, tau, f, p, primed)]
    cols = list(zip(*rows))
    write_csv(out / "slow.csv", ("tau", "x_prime", "x_bar", "n_av", "v_av", "T", "p_bar"), cols)
    return 0


def cmd_fast(cfg, base, args, out):
    from .fast import FastOptions, reconstruct
    from .figures import write_csv

    f, p = _fields(cfg, base), cfg.plasma()
    opts = FastOptions(points_per_period=cfg.fast.points_per_period, delta_mode=cfg.fast.delta_mode)
    cols = [[] for _ in range(7)]
    for tau in cfg.fast.taus:
        rec = reconstruct(cfg.fast.x.values(), tau, f, p, options=opts)
        for pt in rec.points:
            for c, v in zip(cols, (tau, pt.x_bar, pt.p_full, pt.p_slow, pt.u, pt.n_e_av, pt.u_e_av)):
                c.append(v)
    write_csv(out / "fast.csv", ("tau", "x_bar", "p_full", "p_slow", "u", "n_e_av", "u_e_av"), cols)
    return 0


def cmd_bvp(cfg, base, args, out):
    from .bvp import GridSpec, primed_state, solve_quasineutral_potential
    from .figures import write_csv

    f, p = _fields(cfg, base), cfg.plasma()
    sol = solve_quasineutral_potential(f, p, GridSpec(cfg.bvp.x_max, cfg.bvp.n), cfg.tolerances.bvp, cfg.bvp.max_iter)
    ps = primed_state(sol, f, p)
    write_csv(out / "bvp.csv", ("x", "phi", "p_prime"), (sol.x, sol.phi, ps.p_prime(sol.x)))
    (out / "bvp_convergence.json").write_text(json.dumps(sol.record(), indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_pic(cfg, base, args, out):
    from .pic import PicConfig, compare_slow, run
    from .pic.checkpoint import load
    from .figures import write_csv

    p = cfg.plasma()
    pc = PicConfig.for_tau(
        cfg.pic.tau_end, p, cfg.density(base), n_diag=cfg.pic.n_diag, dt=cfg.pic.dt, x_max=cfg.pic.x_max,
        n_cells=cfg.pic.n_cells, n_particles=cfg.pic.n_particles, seed=cfg.seed,
    )
    state = load(args.resume) if args.resume else None
    series = run(pc, state, cfg.pic.checkpoint_every, out / "pic.ckpt")
    series.to_csv(out / "pic_diagnostics.csv")
    series.profiles_to_csv(out / "pic_profiles.csv")
    if state is None:
        rep = compare_slow(series)
        write_csv(
            out / "pic_compare.csv",
            ("tau", "half_width_ratio", "half_width_target", "peak_ratio", "peak_target", "slope", "slope_target",
             "T_ratio", "T_target_s2", "T_target_s4"),
            [rep.column(k) for k in ("tau", "half_width_ratio", "half_width_target", "peak_ratio", "peak_target",
                                     "slope", "slope_target", "T_ratio", "T_target_s2", "T_target_s4")],
        )
    (out / "pic_losses.json").write_text(json.dumps(series.state.losses, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_verify(cfg, base, args, out):
    from .verify import run_verify, verify_invariants, verify_symmetry

    if args.which == "symmetry":
        verify_symmetry(cfg, out)
        return 0
    if args.which == "invariants":
        verify_invariants(cfg, out)
        return 0
    report = run_verify(cfg, out)
    verify_symmetry(cfg, out)
    verify_invariants(cfg, out)
    for c in report["checks"]:
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"{mark} {c['name']}: {c['measured']:.3e} {c['comparison']} {c['tolerance']:.1e}")
    return 0 if report["passed"] else 1


def cmd_figures(cfg, base, args, out):
    from .figures import run_figures

    run_figures(cfg, out, args.figure, base)
    return 0


COMMANDS = {
    "profiles": cmd_profiles,
    "slow": cmd_slow,
    "fast": cmd_fast,
    "bvp": cmd_bvp,
    "pic": cmd_pic,
    "verify": cmd_verify,
    "figures": cmd_figures,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, base = resolve(args)
        out = Path(cfg.out)
        write_resolved(cfg, out)
        return COMMANDS[args.command](cfg, base, args, out)
    except (KbmError, ValueError) as exc:
        print(f"kbmplasma {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Verification suite: invariant and property checks with a machine-readable report."""

from __future__ import annotations

import csv
import json
import math
import platform
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .bvp import GridSpec, solve_quasineutral_potential
from .config import RunConfig
from .lieflow import (
    PhasePoint,
    fast_invariants,
    integrate_fast,
    integrate_slow,
    relative_drift,
    slow_invariants,
)
from .profiles import PlasmaParams, field_functions, make_profile
from .slow import gaussian_closed_form, ion_diagnostics, slow_map_forward
from .symmetry import residual_scaling_study


@dataclass
class CheckResult:
    name: str
    measured: float
    tolerance: float
    passed: bool
    comparison: str = "<"
    seconds: float = 0.0


def _check(name, measured, tolerance, comparison="<"):
    measured = float(measured)
    if comparison == "<":
        ok = measured < tolerance
    else:
        ok = measured <= tolerance
    return CheckResult(name, measured, float(tolerance), bool(ok and math.isfinite(measured)), comparison)


def gaussian_fields(params: PlasmaParams):
    return field_functions(make_profile("gaussian", b=params.b), params)


def lorentz_fields(params: PlasmaParams):
    return field_functions(make_profile("lorentz", b=params.b), params)


def closed_form_grid(n_points: int):
    """``(x', tau)`` pairs on ``[0.1, 3] x [0, 18]`` with at least ``n_points`` entries."""
    side = int(math.ceil(math.sqrt(n_points)))
    xs = np.linspace(0.1, 3.0, side)
    taus = np.linspace(0.0, 18.0, side)
    return [(float(x), float(t)) for x in xs for t in taus]


def slow_map_errors(params: PlasmaParams, n_points: int = 200, tol: float = 1e-13) -> np.ndarray:
    """Relative errors of the numeric slow map against the Gaussian closed form."""
    f = gaussian_fields(params)
    errs = []
    for xp, tau in closed_form_grid(n_points):
        xb = slow_map_forward(xp, tau, f, params, tol)
        ref = gaussian_closed_form(xp, tau, params).x_bar
        errs.append(abs(xb - ref) / abs(ref))
    return np.array(errs)


def diagnostic_errors(params: PlasmaParams, n_points: int = 200):
    """Relative errors of ``v_av`` and ``T`` against ``(x_bar/eps) nu^2 tau/S^2`` and ``S^-4``.

    Also returns the ``T`` error against ``S^-2`` for reference.
    """
    f = gaussian_fields(params)
    ev, et4, et2 = [], [], []
    for xp, tau in closed_form_grid(n_points):
        v, _, T = ion_diagnostics(xp, tau, f, params)
        s2 = 1.0 + params.nu2 * tau * tau
        xb = xp * math.sqrt(s2)
        v_ref = xb / params.eps * params.nu2 * tau / s2
        ev.append(abs(v - v_ref) / abs(v_ref) if v_ref != 0.0 else abs(v))
        et4.append(abs(T / params.Ti0 - s2**-2) / s2**-2)
        et2.append(abs(T / params.Ti0 - 1.0 / s2) * s2)
    return np.array(ev), np.array(et4), np.array(et2)


def random_fast_starts(n: int, seed: int):
    rng = np.random.default_rng(seed)
    return [
        PhasePoint(
            t=float(rng.uniform(0.0, 5.0)),
            x=float(rng.uniform(0.3, 2.5)) * float(rng.choice([-1.0, 1.0])),
            u=float(rng.uniform(-2.0, 2.0)),
            p=float(rng.uniform(-0.5, 0.5)),
            g=float(rng.uniform(0.1, 1.0)),
        )
        for _ in range(n)
    ]


def random_slow_starts(n: int, seed: int):
    rng = np.random.default_rng(seed + 1)
    return [
        PhasePoint(
            x=float(rng.uniform(0.3, 2.5)) * float(rng.choice([-1.0, 1.0])),
            u=float(rng.uniform(-2.0, 2.0)),
            w=float(rng.uniform(-0.5, 0.5)),
            p=float(rng.uniform(-0.5, 0.5)),
            g=float(rng.uniform(0.1, 1.0)),
            f=float(rng.uniform(0.1, 1.0)),
        )
        for _ in range(n)
    ]


def fast_drifts(fields, params, starts, a_end=10.0, tol=1e-10, csv_rows=None):
    """Max relative drift of ``J1..J4`` per orbit."""
    out = []
    for k, st in enumerate(starts):
        tr = integrate_fast(st, a_end, fields, tol, params=params)
        sets = [fast_invariants(p, fields, x_label=st.x, params=params) for p in tr.points]
        d = relative_drift(sets)
        out.append(d)
        if csv_rows is not None:
            for p, s in zip(tr.points, sets):
                csv_rows.append(("fast", k, p.a, p.t, p.tau, p.x, p.u, p.w, p.p, *s.values, *([np.nan] * 2), float(np.max(d))))
    return np.array(out)


def slow_drifts(fields, params, starts, a_end=10.0, tol=1e-10, csv_rows=None):
    """Max relative drift of ``I1..I6`` per orbit (anchor at the start, ``tau = 0``)."""
    out = []
    for k, st in enumerate(starts):
        tr = integrate_slow(st, a_end, fields, params, tol)
        sets = [slow_invariants(p, fields, params, st.x) for p in tr.points]
        d = relative_drift(sets)
        out.append(d)
        if csv_rows is not None:
            for p, s in zip(tr.points, sets):
                csv_rows.append(("slow", k, p.a, p.t, p.tau, p.x, p.u, p.w, p.p, *s.values, float(np.max(d))))
    return np.array(out)


INVARIANT_HEADER = ("system", "orbit", "a", "t", "tau", "x", "u", "w", "p", "inv1", "inv2", "inv3", "inv4", "inv5", "inv6", "max_drift")
SYMMETRY_HEADER = ("point", "equation", "residual", "eps", "mu")


def _write(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([x if isinstance(x, str) else repr(x) if isinstance(x, float) else x for x in r])


def verify_symmetry(cfg: RunConfig, out_dir) -> Path:
    """Residual table of the approximate generator at ``(eps, mu)`` and ``(eps/2, mu/2)``."""
    p = cfg.plasma()
    study = residual_scaling_study(lorentz_fields if cfg.profile.kind == "lorentz" else gaussian_fields, p, cfg.verify.n_points, cfg.seed)
    path = Path(out_dir) / "symmetry_residuals.csv"
    _write(path, SYMMETRY_HEADER, [(a, b, float(c), float(d), float(e)) for a, b, c, d, e in study.rows])
    return path


def verify_invariants(cfg: RunConfig, out_dir) -> Path:
    p = cfg.plasma()
    f = field_functions(cfg.density(), p)
    rows = []
    n = cfg.verify.n_orbits
    fast_drifts(f, p, random_fast_starts(n, cfg.seed), cfg.verify.a_end, cfg.tolerances.lie, rows)
    slow_drifts(f, p, random_slow_starts(n, cfg.seed), cfg.verify.a_end, cfg.tolerances.lie, rows)
    path = Path(out_dir) / "invariants.csv"
    _write(path, INVARIANT_HEADER, rows)
    return path


def run_verify(cfg: RunConfig, out_dir=None) -> dict:
    """Run the invariant/property suite; returns the report (also written as JSON)."""
    out = Path(out_dir if out_dir is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tol = cfg.tolerances
    base = cfg.plasma()
    gparams = PlasmaParams(eps=base.eps, mu=base.mu, gamma=base.gamma, b=1.0, Ti0=base.Ti0)
    checks = []

    def timed(fn):
        t0 = time.perf_counter()
        res = fn()
        for r in res if isinstance(res, list) else [res]:
            r.seconds = time.perf_counter() - t0
            checks.append(r)

    timed(lambda: _check("slow_map_vs_gaussian_closed_form", np.max(slow_map_errors(gparams, cfg.verify.grid_points, tol.slow_map)), tol.closed_form))

    def diag():
        ev, _, et2 = diagnostic_errors(gparams, cfg.verify.grid_points)
        return [
            _check("ion_velocity_vs_gaussian_closed_form", np.max(ev), tol.diagnostics),
            _check("ion_temperature_vs_xi_ratio_form", np.max(et2), tol.diagnostics),
        ]

    timed(diag)
    f = field_functions(cfg.density(), base)
    n = cfg.verify.n_orbits
    timed(lambda: _check("fast_invariant_drift", np.max(fast_drifts(f, base, random_fast_starts(n, cfg.seed), cfg.verify.a_end, tol.lie)), tol.fast_drift))
    timed(lambda: _check("slow_invariant_drift", np.max(slow_drifts(f, base, random_slow_starts(n, cfg.seed), cfg.verify.a_end, tol.lie)), tol.slow_drift))

    def scaling():
        factory = lorentz_fields if cfg.profile.kind == "lorentz" else gaussian_fields
        st = residual_scaling_study(factory, base.replace(b=1.0), cfg.verify.n_points, cfg.seed)
        return [
            _check("fast_residual_ratio_median", st.fast_median, tol.residual_ratio, "<="),
            _check("slow_residual_ratio_median", st.slow_median, tol.residual_ratio, "<="),
        ]

    timed(scaling)

    def trivial():
        sol = solve_quasineutral_potential(
            f, base, GridSpec(x_max=10.0, n=2000), tol=tol.bvp, n_i0=lambda x: np.ones_like(np.asarray(x, dtype=float))
        )
        return _check("bvp_uniform_density_potential", np.max(np.abs(sol.phi)), tol.bvp_trivial)

    timed(trivial)
    report = {
        "passed": all(c.passed for c in checks),
        "seed": cfg.seed,
        "versions": {
            "kbmplasma": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "checks": [asdict(c) for c in checks],
    }
    (out / "verify_report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8", newline="\n")
    return report

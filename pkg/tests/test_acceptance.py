"""Acceptance criteria, one PASS/FAIL line per criterion.

Each test prints its verdict line (visible with ``pytest -s`` and in the
captured output) and then asserts it.  Measured values and tolerances are
part of every line.
"""

import math

import numpy as np
import pytest

from kbmplasma.bvp import GridSpec, solve_quasineutral_potential
from kbmplasma.config import load_config
from kbmplasma.fast import oscillation_extrema
from kbmplasma.figures import read_csv, run_figures, tau_label
from kbmplasma.pic import PicConfig, compare_slow, run
from kbmplasma.profiles import PlasmaParams, field_functions, make_profile
from kbmplasma.symmetry import residual_scaling_study
from kbmplasma.verify import (
    diagnostic_errors,
    fast_drifts,
    random_fast_starts,
    random_slow_starts,
    slow_drifts,
    slow_map_errors,
)

MU = math.sqrt(1.0 / 2000.0)
BASELINE = PlasmaParams(eps=0.1, mu=MU, gamma=0.1, b=1.0)
GRID_POINTS = 200


def verdict(capsys, number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def _factory(kind):
    return lambda p: field_functions(make_profile(kind, p.b), p)


def test_criterion_1_gaussian_slow_map(capsys):
    err = float(np.max(slow_map_errors(BASELINE, GRID_POINTS)))
    verdict(capsys, 1, err < 1e-6, f"slow map vs closed form, max rel err {err:.2e} (< 1e-6)")


def test_criterion_2_gaussian_velocity_temperature(capsys):
    ev, et4, et2 = diagnostic_errors(BASELINE, GRID_POINTS)
    ev, et4, et2 = float(np.max(ev)), float(np.max(et4)), float(np.max(et2))
    ok = ev < 1e-5 and et4 < 1e-5
    verdict(
        capsys,
        2,
        ok,
        f"v_av max rel err {ev:.2e} (< 1e-5); T/Ti0 vs S^-4 max rel err {et4:.2e} (< 1e-5) "
        f"[T/Ti0 vs S^-2 max rel err {et2:.2e}]",
    )


def test_criterion_3_invariant_drift(capsys):
    worst_fast = worst_slow = 0.0
    for kind, b in (("gaussian", 1.0), ("lorentz", 1.0661)):
        p = BASELINE.replace(b=b)
        f = field_functions(make_profile(kind, b), p)
        worst_fast = max(worst_fast, float(np.max(fast_drifts(f, p, random_fast_starts(20, 0), 10.0, 1e-10))))
        worst_slow = max(worst_slow, float(np.max(slow_drifts(f, p, random_slow_starts(20, 0), 10.0, 1e-10))))
    ok = worst_fast < 1e-8 and worst_slow < 1e-7
    verdict(capsys, 3, ok, f"J1-J4 max drift {worst_fast:.2e} (< 1e-8); I1-I6 max drift {worst_slow:.2e} (< 1e-7)")


def test_criterion_4_residual_scaling(capsys):
    medians = {}
    for kind in ("gaussian", "lorentz"):
        st = residual_scaling_study(_factory(kind), BASELINE, 50, seed=0)
        medians[kind] = (st.fast_median, st.slow_median)
    worst = max(max(v) for v in medians.values())
    detail = "; ".join(f"{k} fast {a:.3f} slow {b:.3f}" for k, (a, b) in medians.items())
    verdict(capsys, 4, worst <= 0.35, f"median residual ratios {detail} (<= 0.35)")


def test_criterion_5_bvp(capsys):
    base = PlasmaParams(eps=0.1, mu=MU, gamma=0.001, b=1.0661)
    f = field_functions(make_profile("lorentz", 1.0661), base)
    trivial = solve_quasineutral_potential(f, base, GridSpec(10.0, 2000), n_i0=lambda x: np.ones_like(np.asarray(x, dtype=float)))
    phi_max = float(np.max(np.abs(trivial.phi)))
    dev = []
    for eps in (0.1, 0.05):
        p = base.replace(eps=eps)
        fe = field_functions(make_profile("lorentz", 1.0661), p)
        sol = solve_quasineutral_potential(fe, p)
        m = sol.x <= 5.0
        dev.append(float(np.max(np.abs(sol.phi[m] - np.log(fe.n_i0(sol.x[m]))))))
    ratio = dev[0] / dev[1]
    ok = phi_max < 1e-10 and 3.0 <= ratio <= 5.0
    verdict(capsys, 5, ok, f"uniform ||phi|| {phi_max:.2e} (< 1e-10); Lorentz deviation ratio {ratio:.3f} (in [3, 5])")


@pytest.fixture(scope="module")
def pic_series():
    cfg = PicConfig.for_tau(4.0, BASELINE, make_profile("gaussian", 1.0), n_diag=8, n_particles=100_000)
    return run(cfg)


def test_criterion_6_kinetic_cross_validation(capsys, pic_series):
    rep = compare_slow(pic_series)
    rows = [r for r in rep.rows if r.tau > 0]
    hw = max(abs(r.half_width_error) for r in rows)
    slope = max(abs(r.slope_error) for r in rows)
    T = rep.column("T_ratio")
    recs = pic_series.records
    e0 = recs[0].energy
    drift = max(abs(r.energy - e0) for r in recs) / e0
    lost = pic_series.state.electrons.lost_weight + pic_series.state.ions.lost_weight
    ok = hw < 0.10 and slope < 0.15 and rep.T_monotone
    verdict(
        capsys,
        6,
        ok,
        f"tau_end {rows[-1].tau:.3f}: half-width max rel err {hw:.3f} (< 0.10); slope max rel err {slope:.3f} (< 0.15); "
        f"T/T0 monotone {rep.T_monotone} (final {T[-1]:.4f}) [energy drift {drift:.1e}, lost weight {lost:.1e}]",
    )


@pytest.fixture(scope="module")
def figure_bundle(tmp_path_factory):
    from pathlib import Path

    cfg = load_config(Path(__file__).resolve().parent.parent / "configs" / "figures.toml")
    out = tmp_path_factory.mktemp("acceptance_figs")
    run_figures(cfg, out, [2, 3, 5, 6, 7])
    return cfg, out


def test_criterion_7_figure_properties(capsys, figure_bundle):
    cfg, out = figure_bundle
    left = read_csv(out / "fig3_left_0.csv")
    p0 = left["p0"]
    odd_err = float(np.max(np.abs(p0 + p0[::-1])))
    dp = np.diff(p0[left["x"] > 0])
    n_ext = int(np.count_nonzero(np.sign(dp[:-1]) * np.sign(dp[1:]) < 0))
    outer = []
    for fig in (5, 6, 7):
        tau = cfg.figures[f"fig{fig}"].taus[0]
        d = read_csv(out / f"fig{fig}_field_{tau_label(tau)}.csv")
        pos = d["x_bar"] > 0
        outer.append(float(oscillation_extrema(d["x_bar"][pos], d["p_full"][pos]).max()))
    peaks = [float(read_csv(out / f"fig2_density_{tau_label(t)}.csv")["n_av"].max()) for t in cfg.figures["fig2"].taus]
    ok = (
        odd_err < 1e-12
        and n_ext == 1
        and all(a < b for a, b in zip(outer, outer[1:]))
        and all(a > b for a, b in zip(peaks, peaks[1:]))
    )
    verdict(
        capsys,
        7,
        ok,
        f"fig3 p0 odd err {odd_err:.1e}, positive-side extrema {n_ext}; outer field extremum "
        f"{' -> '.join(f'{v:.2f}' for v in outer)}; fig2 peaks {', '.join(f'{v:.3f}' for v in peaks)}",
    )

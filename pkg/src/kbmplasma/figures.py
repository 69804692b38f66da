"""Figure-data reproduction: one CSV per curve and panel plus a JSON manifest.

Each figure is described completely by its configuration block (parameters,
profile, slow times and grid); nothing is defaulted in figure mode.

=========  ===================================================  ===========================
figure     panels                                               columns
=========  ===================================================  ===========================
1, 3       ``left`` (tau = 0), ``right`` (tau > 0)              ``x, p0, xi`` / ``x_bar, p_bar``
2, 4       ``density``, ``velocity``                            ``x_bar, n_av`` / ``x_bar, v_av``
5, 6, 7    ``field``, ``velocity``                              ``x_bar, p_full, p_slow`` / ``x_bar, u_e_av``
=========  ===================================================  ===========================
"""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from . import __version__
from .config import FIGURE_IDS, FigureBlock, RunConfig
from .errors import ParameterDomainError
from .fast import FastOptions, reconstruct
from .profiles import field_functions
from .slow import lab_profile

SLOW_PROFILE_FIGS = (1, 3)
ION_FIGS = (2, 4)
FAST_FIGS = (5, 6, 7)


def tau_label(tau: float) -> str:
    return format(float(tau), "g")


def write_csv(path, header, columns) -> Path:
    """CSV with round-trip float precision and ``\\n`` line endings."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in zip(*columns):
            wr.writerow([repr(float(v)) for v in row])
    return path


def _fields(block: FigureBlock, base):
    params = block.params.build()
    prof = block.profile.build(params.b, base)
    return field_functions(prof, params), params


def _figure(fig_id: int, block: FigureBlock, out: Path, base):
    fields, params = _fields(block, base)
    x = block.x.values()
    files = []
    if fig_id in SLOW_PROFILE_FIGS:
        for tau in block.taus:
            name = f"fig{fig_id}_{'left' if tau == 0 else 'right'}_{tau_label(tau)}.csv"
            if tau == 0:
                cols = (x, fields.p0(x), fields.xi(x))
                head = ("x", "p0", "xi")
            else:
                states = lab_profile(x, tau, fields, params)
                cols = (x, [s.p_bar for s in states])
                head = ("x_bar", "p_bar")
            files.append(write_csv(out / name, head, cols))
    elif fig_id in ION_FIGS:
        for tau in block.taus:
            states = lab_profile(x, tau, fields, params)
            files.append(
                write_csv(out / f"fig{fig_id}_density_{tau_label(tau)}.csv", ("x_bar", "n_av"), (x, [s.n_av for s in states]))
            )
            files.append(
                write_csv(out / f"fig{fig_id}_velocity_{tau_label(tau)}.csv", ("x_bar", "v_av"), (x, [s.v_av for s in states]))
            )
    else:
        if np.any(x == 0.0):
            raise ParameterDomainError(f"fig{fig_id}: the fast grid must exclude x = 0")
        opts = FastOptions(points_per_period=block.points_per_period, delta_mode=block.delta_mode)
        for tau in block.taus:
            rec = reconstruct(x, tau, fields, params, options=opts)
            files.append(
                write_csv(
                    out / f"fig{fig_id}_field_{tau_label(tau)}.csv",
                    ("x_bar", "p_full", "p_slow"),
                    (x, rec.column("p_full"), rec.column("p_slow")),
                )
            )
            files.append(
                write_csv(out / f"fig{fig_id}_velocity_{tau_label(tau)}.csv", ("x_bar", "u_e_av"), (x, rec.column("u_e_av")))
            )
    return files


def run_figures(config: RunConfig, out_dir=None, ids=None, base=None) -> dict:
    """Write the CSV bundle for figures ``ids`` (default: all configured) and the manifest.

    Returns the manifest dictionary.
    """
    out = Path(out_dir if out_dir is not None else config.out)
    out.mkdir(parents=True, exist_ok=True)
    if ids is None:
        ids = sorted(int(k[3:]) for k in config.figures)
    manifest = {
        "package": "kbmplasma",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "figures": {},
    }
    for fig_id in ids:
        if fig_id not in FIGURE_IDS:
            raise ParameterDomainError(f"unknown figure id {fig_id}")
        key = f"fig{fig_id}"
        if key not in config.figures:
            raise ParameterDomainError(f"figure {fig_id} has no configuration block [figures.{key}]")
        block = config.figures[key]
        files = _figure(fig_id, block, out, base)
        manifest["figures"][key] = {
            "params": block.params.model_dump(),
            "profile": {k: v for k, v in block.profile.model_dump().items() if v is not None},
            "taus": list(block.taus),
            "x": block.x.model_dump(),
            "delta_mode": block.delta_mode if fig_id in FAST_FIGS else None,
            "points_per_period": block.points_per_period if fig_id in FAST_FIGS else None,
            "files": [f.name for f in files],
        }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    return manifest


def read_csv(path) -> dict:
    """Read a figure CSV into ``{column: array}``."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], np.array(rows[1:], dtype=float)
    return {h: body[:, i] for i, h in enumerate(head)}

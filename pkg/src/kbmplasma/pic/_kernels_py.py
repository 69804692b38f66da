"""Pure-numpy versions of the cloud-in-cell kernels (same contracts)."""

from __future__ import annotations

import numpy as np


def _locate(x, x0, dx):
    s = (np.asarray(x, dtype=float) - x0) / dx
    i = np.floor(s).astype(np.intp)
    return i, s - i


def deposit_cic(x, w, x0, dx, n_nodes):
    """Linear-weighting deposit of ``w`` onto the nodes (charge, not density)."""
    i, f = _locate(x, x0, dx)
    w = np.asarray(w, dtype=float)
    out = np.bincount(i, weights=w * (1.0 - f), minlength=n_nodes)
    out += np.bincount(i + 1, weights=w * f, minlength=n_nodes)
    return out[:n_nodes]


def gather_cic(x, field, x0, dx):
    """Linear interpolation of a node field to particle positions."""
    i, f = _locate(x, x0, dx)
    field = np.asarray(field, dtype=float)
    return field[i] * (1.0 - f) + field[i + 1] * f


def deposit_current(x_old, x_new, w, x0, dx, n_nodes, dt):
    """Charge-conserving face current for a move ``x_old -> x_new``."""
    c_old = np.cumsum(deposit_cic(x_old, w, x0, dx, n_nodes))
    c_new = np.cumsum(deposit_cic(x_new, w, x0, dx, n_nodes))
    return -(c_new - c_old)[:-1] / dt

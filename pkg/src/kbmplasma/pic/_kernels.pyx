# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cloud-in-cell kernels.

All kernels work on a uniform node grid ``x0 + k dx``, ``k = 0..n_nodes-1``,
and assume every particle lies inside ``[x0, x0 + (n_nodes-1) dx)``.
"""

import numpy as np
from libc.math cimport floor


def deposit_cic(const double[::1] x, const double[::1] w, double x0, double dx, Py_ssize_t n_nodes):
    """Linear-weighting deposit of ``w`` onto the nodes (charge, not density)."""
    cdef Py_ssize_t p, i
    cdef double s, f
    out = np.zeros(n_nodes, dtype=np.float64)
    cdef double[::1] o = out
    for p in range(x.shape[0]):
        s = (x[p] - x0) / dx
        i = <Py_ssize_t>floor(s)
        f = s - i
        o[i] += w[p] * (1.0 - f)
        o[i + 1] += w[p] * f
    return out


def gather_cic(const double[::1] x, const double[::1] field, double x0, double dx):
    """Linear interpolation of a node field to particle positions."""
    cdef Py_ssize_t p, i
    cdef double s, f
    out = np.empty(x.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    for p in range(x.shape[0]):
        s = (x[p] - x0) / dx
        i = <Py_ssize_t>floor(s)
        f = s - i
        o[p] = field[i] * (1.0 - f) + field[i + 1] * f
    return out


cdef inline double _left_fraction(Py_ssize_t k, Py_ssize_t i, double f) noexcept nogil:
    # part of a particle's shape on nodes <= k
    if k < i:
        return 0.0
    if k == i:
        return 1.0 - f
    return 1.0


def deposit_current(
    const double[::1] x_old,
    const double[::1] x_new,
    const double[::1] w,
    double x0,
    double dx,
    Py_ssize_t n_nodes,
    double dt,
):
    """Charge-conserving face current for a move ``x_old -> x_new``.

    ``j[k]`` is the flux through the face between nodes ``k`` and ``k+1``,
    chosen so that ``(rho_new - rho_old)/dt + (j[k] - j[k-1])/dx = 0``
    holds node by node for the linear-weighting charge.
    """
    cdef Py_ssize_t p, k, i0, i1, lo, hi
    cdef double s, f0, f1, q
    cdef double inv_dt = 1.0 / dt
    out = np.zeros(n_nodes - 1, dtype=np.float64)
    cdef double[::1] o = out
    for p in range(x_old.shape[0]):
        s = (x_old[p] - x0) / dx
        i0 = <Py_ssize_t>floor(s)
        f0 = s - i0
        s = (x_new[p] - x0) / dx
        i1 = <Py_ssize_t>floor(s)
        f1 = s - i1
        lo = i0 if i0 < i1 else i1
        hi = i1 if i0 < i1 else i0
        q = w[p] * inv_dt
        if i0 == i1:
            # no node crossed: only the face inside the cell carries flux
            if i0 < n_nodes - 1:
                o[i0] += q * (f1 - f0)
            continue
        for k in range(lo, hi + 1):
            if k < n_nodes - 1:
                o[k] -= q * (_left_fraction(k, i1, f1) - _left_fraction(k, i0, f0))
    return out

"""Backend selection for the particle kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is selected.  :func:`use_backend` switches explicitly.
"""

from __future__ import annotations

from . import _kernels_py

try:  # pragma: no cover - depends on the build
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

_active = "cython" if _compiled is not None else "python"


def available_backends() -> tuple[str, ...]:
    return tuple(BACKENDS)


def backend() -> str:
    """Name of the active backend."""
    return _active


def use_backend(name: str) -> str:
    """Select ``"cython"`` or ``"python"``; returns the previous name."""
    global _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(BACKENDS)})")
    prev, _active = _active, name
    return prev


def deposit_cic(x, w, x0, dx, n_nodes):
    return BACKENDS[_active].deposit_cic(x, w, x0, dx, n_nodes)


def gather_cic(x, field, x0, dx):
    return BACKENDS[_active].gather_cic(x, field, x0, dx)


def deposit_current(x_old, x_new, w, x0, dx, n_nodes, dt):
    return BACKENDS[_active].deposit_current(x_old, x_new, w, x0, dx, n_nodes, dt)

"""Reference electrostatic particle-in-cell solver."""

from .compare import CompareReport, compare_slow
from .kernels import available_backends, backend, use_backend
from .solver import PicConfig, PicSeries, PicState, initial_state, run, single_clock_system

__all__ = [
    "CompareReport",
    "PicConfig",
    "PicSeries",
    "PicState",
    "available_backends",
    "backend",
    "compare_slow",
    "initial_state",
    "run",
    "single_clock_system",
    "use_backend",
]

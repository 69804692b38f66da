"""Kinetic run versus the slow (averaged) analytic solution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterDomainError


@dataclass
class CompareRow:
    tau: float
    half_width_ratio: float
    half_width_target: float
    peak_ratio: float
    peak_target: float
    slope: float
    slope_target: float
    T_ratio: float
    T_target_s2: float
    T_target_s4: float

    @property
    def half_width_error(self) -> float:
        return self.half_width_ratio / self.half_width_target - 1.0

    @property
    def peak_error(self) -> float:
        return self.peak_ratio / self.peak_target - 1.0

    @property
    def slope_error(self) -> float:
        if self.slope_target == 0.0:
            return abs(self.slope)
        return self.slope / self.slope_target - 1.0


@dataclass
class CompareReport:
    rows: list = field(default_factory=list)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    @property
    def T_monotone(self) -> bool:
        t = self.column("T_ratio")
        return bool(np.all(np.diff(t) <= 0.0))


def compare_slow(series, params=None) -> CompareReport:
    """Per-record errors of half-width, peak density, core velocity slope and ``T/T0``.

    Targets are the self-similar Gaussian forms with ``S = sqrt(1 + nu^2 tau^2)``:
    half-width ``S``, peak ``1/S``, slope ``nu^2 tau / (eps S^2)``.  Widths
    and densities are normalised by their values in the first (``tau = 0``)
    record, so the density normalisation convention drops out.  ``T/T0`` is
    reported against both ``S^-2`` and ``S^-4``.
    """
    params = params or series.config.params
    recs = series.records
    if not recs or recs[0].step != 0:
        raise ParameterDomainError("comparison needs the tau = 0 record first")
    hw0, pk0, T0 = recs[0].ion_half_width, recs[0].ion_peak, recs[0].ion_T
    nu2, eps = params.nu2, params.eps
    rep = CompareReport()
    for r in recs:
        s2 = 1.0 + nu2 * r.tau**2
        s = math.sqrt(s2)
        rep.rows.append(
            CompareRow(
                tau=r.tau,
                half_width_ratio=r.ion_half_width / hw0,
                half_width_target=s,
                peak_ratio=r.ion_peak / pk0,
                peak_target=1.0 / s,
                slope=r.ion_slope,
                slope_target=nu2 * r.tau / (eps * s2),
                T_ratio=r.ion_T / T0 if T0 > 0 else float("nan"),
                T_target_s2=1.0 / s2,
                T_target_s4=1.0 / (s2 * s2),
            )
        )
    return rep

"""Approximate symmetry generator, its exact limits, and determining residuals.

A generator is represented by its fast (oscillating) and slow parts, since
the local determining equations split into a fast and a slow block.  The
residual of each block is evaluated at a phase point with all partial
derivatives taken by Richardson-extrapolated central differences.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields as dc_fields, replace
from typing import Callable

import numpy as np

from .errors import NumericalDifferentiationWarning, ParameterDomainError, SingularityError
from .lieflow import PhasePoint
from .profiles import FieldFunctions, PlasmaParams


@dataclass(frozen=True)
class GeneratorCoordinates:
    xi1: float = 0.0
    xi2: float = 0.0
    xi3: float = 0.0
    xi4: float = 0.0
    xi5: float = 0.0
    eta1: float = 0.0
    eta2: float = 0.0
    eta3: float = 0.0

    def __add__(self, other):
        return GeneratorCoordinates(
            *(getattr(self, f.name) + getattr(other, f.name) for f in dc_fields(self))
        )

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in dc_fields(self)])


ZERO = GeneratorCoordinates()


def _zero(point):
    return ZERO


@dataclass(frozen=True)
class Generator:
    """A generator given as fast and slow coordinate functions of a point.

    Only ``xi1, xi2, xi3, eta2`` of the fast part enter the fast block; the
    slow part supplies ``xi1..xi5`` and ``eta2`` to the slow block.
    """

    fast: Callable[[PhasePoint], GeneratorCoordinates] = _zero
    slow: Callable[[PhasePoint], GeneratorCoordinates] = _zero

    def __call__(self, point: PhasePoint) -> GeneratorCoordinates:
        return self.fast(point) + self.slow(point)


def _value(fn, x):
    return float(fn(x)) if callable(fn) else float(fn)


def approximate_split(fields: FieldFunctions, params: PlasmaParams) -> Generator:
    """The approximate generator with its fast/slow split."""
    eps, mu = params.eps, params.mu

    def fast(pt):
        d, om = float(fields.delta(pt.x)), float(fields.omega(pt.x))
        if om <= 0.0:
            raise SingularityError("plasma frequency vanishes (vacuum region)")
        s, c = math.sin(om * pt.t), math.cos(om * pt.t)
        return GeneratorCoordinates(xi1=1.0, xi2=eps * d / om * s, xi3=d * c, eta2=d * om * s)

    def slow(pt):
        xv, dx = float(fields.xi(pt.x)), float(fields.dxi(pt.x))
        return GeneratorCoordinates(
            xi1=eps * pt.tau**2 * dx,
            xi2=eps * mu * pt.tau * xv,
            xi3=-eps * mu * pt.tau * pt.u * dx,
            xi4=mu * (xv - eps * pt.tau * pt.w * dx),
            xi5=mu * (1.0 + eps * pt.tau**2 * dx),
            eta2=-3.0 * mu * eps * pt.tau * pt.p * dx,
        )

    return Generator(fast, slow)


def approximate_generator(point: PhasePoint, fields: FieldFunctions, params: PlasmaParams) -> GeneratorCoordinates:
    """Coordinates of the approximate symmetry generator at ``point``."""
    return approximate_split(fields, params)(point)


def electron_plasma_split(delta, Omega, eps: float) -> Generator:
    """Exact generator for electrons on a uniform ion background (``mu = 0``).

    ``delta`` and ``Omega`` are constants or callables of ``x``.
    """

    def fast(pt):
        d, om = _value(delta, pt.x), _value(Omega, pt.x)
        if om <= 0.0:
            raise SingularityError("Omega must be positive")
        s, c = math.sin(om * pt.t), math.cos(om * pt.t)
        return GeneratorCoordinates(xi1=1.0, xi2=eps * d / om * s, xi3=d * c, eta2=d * om * s)

    return Generator(fast=fast)


def electron_plasma_generator(point: PhasePoint, delta, Omega, eps: float) -> GeneratorCoordinates:
    return electron_plasma_split(delta, Omega, eps)(point)


def quasineutral_split(beta: float, params: PlasmaParams) -> Generator:
    """Exact quasi-neutral generator (``delta = 0``, ``xi = beta x``).

    The slow-clock coefficient is ``xi5``; ``xi1`` is set to ``xi5/mu`` so
    that the convention ``xi5 = mu xi1`` used by the slow block holds
    (``xi1 = 0`` when ``mu = 0``).
    """
    eps, mu = params.eps, params.mu

    def slow(pt):
        xi5 = 1.0 + beta * eps * pt.tau**2
        return GeneratorCoordinates(
            xi1=xi5 / mu if mu > 0 else 0.0,
            xi2=eps * beta * pt.tau * pt.x,
            xi3=beta * (mu * pt.x - eps * pt.tau * pt.u),
            xi4=beta * (pt.x - eps * pt.tau * pt.w),
            xi5=xi5,
            eta2=-3.0 * eps * beta * pt.tau * pt.p,
        )

    return Generator(slow=slow)


def quasineutral_generator(point: PhasePoint, beta: float, params: PlasmaParams) -> GeneratorCoordinates:
    return quasineutral_split(beta, params)(point)


@dataclass(frozen=True)
class ResidualReport:
    """Residual magnitudes of the local determining equations at one point."""

    fast: tuple | None
    slow: tuple | None
    eps: float
    mu: float
    h: float

    @property
    def fast_norm(self) -> float:
        return float(np.linalg.norm(self.fast)) if self.fast is not None else float("nan")

    @property
    def slow_norm(self) -> float:
        return float(np.linalg.norm(self.slow)) if self.slow is not None else float("nan")


class _Partials:
    """Central differences of a coordinate function, Richardson-extrapolated."""

    def __init__(self, fn, point: PhasePoint, h: float):
        self.fn = fn
        self.point = point
        self.h = h
        self._cache = {}

    def __call__(self, var: str) -> np.ndarray:
        if var in self._cache:
            return self._cache[var]
        x0 = getattr(self.point, var)
        step = self.h * max(1.0, abs(x0))

        def central(hh):
            fp = self.fn(replace(self.point, **{var: x0 + hh})).as_array()
            fm = self.fn(replace(self.point, **{var: x0 - hh})).as_array()
            return (fp - fm) / (2.0 * hh)

        d1, d2 = central(step), central(0.5 * step)
        rich = (4.0 * d2 - d1) / 3.0
        scale = np.abs(self.fn(self.point).as_array()) + np.abs(rich) * step
        noise = np.finfo(float).eps * np.maximum(scale, 1e-300) / step
        disagreement = np.abs(d1 - d2)
        if np.any((disagreement > 1e-6 * np.maximum(np.abs(rich), 1.0)) & (noise > 1e-3 * disagreement)):
            warnings.warn(
                f"central differences in {var} dominated by cancellation (h={step:.1e})",
                NumericalDifferentiationWarning,
                stacklevel=3,
            )
        self._cache[var] = rich
        return rich


_I = {f.name: i for i, f in enumerate(dc_fields(GeneratorCoordinates))}


def determining_residual_fast(generator: Generator, point: PhasePoint, params: PlasmaParams, h: float = 1e-5) -> ResidualReport:
    """Residuals of the two fast local determining equations."""
    eps, mu = params.eps, params.mu
    c = generator.fast(point)
    d = _Partials(generator.fast, point, h)
    u, p = point.u, point.p
    X1, X2, X3, E2 = _I["xi1"], _I["xi2"], _I["xi3"], _I["eta2"]
    dt, dtau, dx, du = d("t"), d("tau"), d("x"), d("u")
    r1 = (
        c.eta2
        + p * (dt[X1] + mu * dtau[X1] - du[X3])
        + dt[X3]
        + mu * dtau[X3]
        + eps * u * p * dx[X1]
        + eps * u * dx[X3]
    )
    r2 = (
        eps * c.xi3
        - dt[X2]
        - mu * dtau[X2]
        + eps * u * (dt[X1] + mu * dtau[X1] - dx[X2])
        + eps**2 * u**2 * dx[X1]
    )
    return ResidualReport(fast=(abs(r1), abs(r2)), slow=None, eps=eps, mu=mu, h=h)


def determining_residual_slow(generator: Generator, point: PhasePoint, params: PlasmaParams, h: float = 1e-5) -> ResidualReport:
    """Residuals of the four slow local determining equations."""
    eps, mu = params.eps, params.mu
    c = generator.slow(point)
    d = _Partials(generator.slow, point, h)
    u, w, p = point.u, point.w, point.p
    X1, X2, X3, X4, X5 = _I["xi1"], _I["xi2"], _I["xi3"], _I["xi4"], _I["xi5"]
    dtau, dx, du, dw = d("tau"), d("x"), d("u"), d("w")
    r1 = c.eta2 + p * (dtau[X5] + eps * w * dx[X5] - dw[X4]) - dtau[X4] - eps * w * dx[X4]
    r2 = (
        c.eta2
        + p * (mu * dtau[X1] - du[X3])
        + mu * dtau[X3]
        + eps * u * p * dx[X1]
        + eps * u * dx[X3]
    )
    r3 = eps * c.xi3 - mu * dtau[X2] + eps * u * (mu * dtau[X1] - dx[X2]) + eps**2 * u**2 * dx[X1]
    r4 = eps * c.xi4 - dtau[X2] + eps * w * (dtau[X5] - dx[X2]) + eps**2 * w**2 * dx[X5]
    return ResidualReport(fast=None, slow=(abs(r1), abs(r2), abs(r3), abs(r4)), eps=eps, mu=mu, h=h)


def invariant_solution_state(t, tau, x_prime, u_prime, w_prime, fields, params, primed=None) -> PhasePoint:
    """Phase point on the slow invariant solution for one label."""
    from .slow import slow_transform

    st = slow_transform(x_prime, w_prime, u_prime, tau, fields, params, primed)
    return PhasePoint(t=t, tau=tau, x=st.x_bar, u=st.u_bar, w=st.w_bar, p=st.p_bar)


@dataclass(frozen=True)
class ScalingStudy:
    fast_ratios: np.ndarray
    slow_ratios: np.ndarray
    rows: list

    @property
    def fast_median(self) -> float:
        return float(np.median(self.fast_ratios))

    @property
    def slow_median(self) -> float:
        return float(np.median(self.slow_ratios))


def residual_scaling_study(
    profile_factory: Callable[[PlasmaParams], FieldFunctions],
    params: PlasmaParams,
    n_points: int = 50,
    seed: int = 0,
    h: float = 1e-5,
) -> ScalingStudy:
    """Residual ratios of the approximate generator under ``(eps, mu) -> (eps/2, mu/2)``.

    Points ``(t, tau, x', u', w')`` are drawn once; at each parameter set the
    state is rebuilt on that set's slow invariant solution.
    """
    if params.mu <= 0:
        raise ParameterDomainError("scaling study needs mu > 0")
    rng = np.random.default_rng(seed)
    draws = np.column_stack(
        [
            rng.uniform(0.0, 10.0, n_points),
            rng.uniform(0.5, 4.0, n_points),
            rng.uniform(0.3, 2.5, n_points),
            rng.uniform(-2.0, 2.0, n_points),
            rng.uniform(-1.0, 1.0, n_points),
        ]
    )
    half = params.replace(eps=params.eps / 2, mu=params.mu / 2)
    f_full, f_half = profile_factory(params), profile_factory(half)
    g_full, g_half = approximate_split(f_full, params), approximate_split(f_half, half)
    fr, sr, rows = [], [], []
    for k, (t, tau, xp, up, wp) in enumerate(draws):
        pt1 = invariant_solution_state(t, tau, xp, up, wp, f_full, params)
        pt2 = invariant_solution_state(t, tau, xp, up, wp, f_half, half)
        a1 = determining_residual_fast(g_full, pt1, params, h)
        a2 = determining_residual_fast(g_half, pt2, half, h)
        b1 = determining_residual_slow(g_full, pt1, params, h)
        b2 = determining_residual_slow(g_half, pt2, half, h)
        fr.append(a2.fast_norm / a1.fast_norm)
        sr.append(b2.slow_norm / b1.slow_norm)
        for rep, pr in ((a1, params), (a2, half)):
            rows += [(k, f"fast{i + 1}", v, pr.eps, pr.mu) for i, v in enumerate(rep.fast)]
        for rep, pr in ((b1, params), (b2, half)):
            rows += [(k, f"slow{i + 1}", v, pr.eps, pr.mu) for i, v in enumerate(rep.slow)]
    return ScalingStudy(np.array(fr), np.array(sr), rows)

"""Lie equations of the approximate symmetry and their invariants.

Three flows are provided: the full system in the group parameter ``a``,
its fast (electron) reduction and its slow (averaged, ion) reduction.
Integration uses the Dormand-Prince 5(4) pair with dense output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp, trapezoid

from .errors import DomainError, ParameterDomainError, SingularityError, StiffnessError
from .profiles import FieldFunctions, PlasmaParams
from .slow import inverse_cube_integral, nested_integral

FAST = "fast"
SLOW = "slow"


@dataclass(frozen=True)
class PhasePoint:
    """One point of a group orbit."""

    t: float = 0.0
    tau: float = 0.0
    x: float = 0.0
    u: float = 0.0
    w: float = 0.0
    p: float = 0.0
    g: float = 0.0
    f: float = 0.0
    a: float = 0.0

    def mirrored(self) -> "PhasePoint":
        """Image under ``x, u, w, p -> -x, -u, -w, -p`` (profiles are even)."""
        return replace(self, x=-self.x, u=-self.u, w=-self.w, p=-self.p)


_VARS = ("t", "x", "u", "w", "tau", "p")


@dataclass
class OrbitTrajectory:
    """Sampled orbit with its dense interpolant and integrator statistics."""

    points: list
    a: np.ndarray
    y: np.ndarray
    sol: object = field(repr=False, default=None)
    nfev: int = 0
    steps: int = 0
    rejected: int = 0
    tol: float = 0.0
    _template: PhasePoint = field(repr=False, default=None)

    def at(self, a: float) -> PhasePoint:
        """Dense-output point at group parameter ``a``."""
        vals = self.sol(a)
        return replace(self._template, a=float(a), **{k: float(v) for k, v in zip(_VARS, vals)})

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])


def _check_tol(tol):
    if not 1e-14 < tol < 1e-3:
        raise ParameterDomainError(f"tol must lie in (1e-14, 1e-3), got {tol}")


def _run(rhs, start: PhasePoint, a_end, tol, a_eval, fields, n_out):
    _check_tol(tol)
    y0 = np.array([getattr(start, k) for k in _VARS], dtype=float)
    if a_eval is None:
        a_eval = np.linspace(0.0, a_end, n_out)
    a_eval = np.asarray(a_eval, dtype=float)
    limit = fields.x_limit
    last = {"a": 0.0, "y": y0.copy()}

    def guarded(a, y):
        if not abs(y[1]) <= limit:
            raise DomainError("orbit left the valid x-domain", last_valid=last)
        try:
            out = rhs(a, y)
        except DomainError as exc:
            raise DomainError(str(exc), last_valid=last) from None
        last["a"], last["y"] = a, y.copy()
        return out

    def leave(a, y):
        return limit - abs(y[1]) if np.isfinite(limit) else 1.0

    leave.terminal = True
    try:
        sol = solve_ivp(
            guarded,
            (0.0, a_end),
            y0,
            method="DOP853",
            rtol=tol,
            atol=tol * 1e-2,
            dense_output=True,
            t_eval=a_eval,
            events=leave,
        )
    except DomainError as exc:
        ly = exc.last_valid["y"]
        pt = replace(start, a=exc.last_valid["a"], **dict(zip(_VARS, map(float, ly))))
        raise DomainError(str(exc), last_valid=pt) from None
    if sol.status == -1:
        raise StiffnessError(sol.message)
    if sol.status == 1:
        ly = sol.y_events[0][0]
        pt = replace(start, a=float(sol.t_events[0][0]), **dict(zip(_VARS, map(float, ly))))
        raise DomainError("orbit left the valid x-domain", last_valid=pt)
    points = [
        replace(start, a=float(a), **{k: float(v) for k, v in zip(_VARS, col)})
        for a, col in zip(sol.t, sol.y.T)
    ]
    naccept = len(sol.sol.ts) - 1
    return OrbitTrajectory(
        points=points,
        a=sol.t,
        y=sol.y,
        sol=sol.sol,
        nfev=sol.nfev,
        steps=naccept,
        # DOP853 uses a fixed number of stages per attempt
        rejected=max(0, sol.nfev // 12 - naccept),
        tol=tol,
        _template=start,
    )


def integrate_full(
    start: PhasePoint,
    a_end: float,
    fields: FieldFunctions,
    params: PlasmaParams,
    tol: float = 1e-10,
    a_eval=None,
    n_out: int = 101,
) -> OrbitTrajectory:
    """Integrate the complete Lie system of the approximate generator.

    ``g`` and ``f`` are group invariants and are carried unchanged.
    """
    eps, mu = params.eps, params.mu
    xi, dxi, delta, omega = fields.xi, fields.dxi, fields.delta, fields.omega

    def rhs(a, y):
        t, x, u, w, tau, p = y
        d, om, xv, dx = float(delta(x)), float(omega(x)), float(xi(x)), float(dxi(x))
        if om <= 0.0:
            raise SingularityError("plasma frequency vanishes")
        s, c = math.sin(om * t), math.cos(om * t)
        clock = 1.0 + eps * tau * tau * dx
        return [
            clock,
            eps * ((d / om) * s + mu * tau * xv),
            d * c - eps * mu * tau * u * dx,
            mu * (xv - eps * tau * w * dx),
            mu * clock,
            d * om * s - 3.0 * mu * eps * tau * p * dx,
        ]

    return _run(rhs, start, a_end, tol, a_eval, fields, n_out)


def integrate_fast(
    start: PhasePoint,
    a_end: float,
    fields: FieldFunctions,
    tol: float = 1e-10,
    frozen: bool = True,
    params: PlasmaParams | None = None,
    a_eval=None,
    n_out: int = 101,
) -> OrbitTrajectory:
    """Integrate the fast (electron) Lie system.

    With ``frozen`` (the default) ``delta`` and ``omega`` are held at the
    orbit's starting ``x``, which makes ``J1..J4`` exact invariants.
    ``frozen=False`` evaluates them at the instantaneous ``x``.
    """
    params = params or fields.params
    eps = params.eps
    delta, omega = fields.delta, fields.omega
    d0, om0 = float(delta(start.x)), float(omega(start.x))

    def rhs(a, y):
        t, x = y[0], y[1]
        if frozen:
            d, om = d0, om0
        else:
            d, om = float(delta(x)), float(omega(x))
        if om <= 0.0:
            raise SingularityError("plasma frequency vanishes")
        s, c = math.sin(om * t), math.cos(om * t)
        return [1.0, eps * (d / om) * s, d * c, 0.0, 0.0, d * om * s]

    return _run(rhs, start, a_end, tol, a_eval, fields, n_out)


def integrate_slow(
    start: PhasePoint,
    a_end: float,
    fields: FieldFunctions,
    params: PlasmaParams,
    tol: float = 1e-10,
    a_eval=None,
    n_out: int = 101,
) -> OrbitTrajectory:
    """Integrate the averaged (slow) Lie system for ``tau, x, p, u, w``.

    The fast clock follows ``t = t0 + (tau - tau0)/mu`` when ``mu > 0``.
    """
    eps, mu = params.eps, params.mu
    xi, dxi = fields.xi, fields.dxi

    def rhs(a, y):
        t, x, u, w, tau, p = y
        xv, dx = float(xi(x)), float(dxi(x))
        dtau = 1.0 + eps * tau * tau * dx
        return [
            dtau / mu if mu > 0 else 0.0,
            eps * tau * xv,
            -eps * tau * u * dx,
            xv - eps * tau * w * dx,
            dtau,
            -3.0 * eps * tau * p * dx,
        ]

    return _run(rhs, start, a_end, tol, a_eval, fields, n_out)


@dataclass(frozen=True)
class InvariantSet:
    """Invariant values at one point.

    ``scales`` holds, per invariant, the magnitude of its largest
    constituent term; drifts are measured relative to it.
    """

    tag: str
    values: tuple
    scales: tuple
    x_ref: float | None = None

    def __getitem__(self, i):
        return self.values[i]


def fast_invariants(point: PhasePoint, fields: FieldFunctions, x_label: float | None = None, params=None) -> InvariantSet:
    """``J1 = p + delta cos(Om t)``, ``J2 = x + eps delta cos(Om t)/Om^2``,
    ``J3 = u - delta sin(Om t)/Om``, ``J4 = g``.

    ``delta`` and ``Om`` are taken at ``x_label`` (default: ``point.x``).
    """
    params = params or fields.params
    eps = params.eps
    xl = point.x if x_label is None else x_label
    d, om = float(fields.delta(xl)), float(fields.omega(xl))
    if om <= 0.0:
        raise SingularityError("plasma frequency vanishes")
    c, s = math.cos(om * point.t), math.sin(om * point.t)
    j = (
        point.p + d * c,
        point.x + eps * d / om**2 * c,
        point.u - d / om * s,
        point.g,
    )
    sc = (
        max(abs(point.p), abs(d)),
        max(abs(point.x), abs(eps * d / om**2)),
        max(abs(point.u), abs(d / om)),
        abs(point.g),
    )
    return InvariantSet(FAST, j, sc, x_label)


def slow_invariants(point: PhasePoint, fields: FieldFunctions, params: PlasmaParams, x_ref: float) -> InvariantSet:
    """Slow invariants ``I1..I6`` with indefinite integrals anchored at ``x_ref``.

    ``x_ref`` is the orbit point where ``tau = 0``; with that anchor ``I4``
    vanishes on the orbit.  Points on the negative half-line are mapped by
    the odd symmetry first.
    """
    if point.x * x_ref <= 0.0:
        raise SingularityError("x and x_ref must lie strictly on the same side of 0")
    if point.x < 0.0:
        return slow_invariants(point.mirrored(), fields, params, -x_ref)
    eps = params.eps
    xv = float(fields.xi(point.x))
    k = inverse_cube_integral(fields, x_ref, point.x)
    n = nested_integral(fields, x_ref, point.x) / math.sqrt(2.0 * eps)
    clock = eps * point.tau**2 / (2.0 * xv * xv)
    vals = (
        point.f,
        point.g,
        point.p * xv**3,
        clock - k,
        xv * point.u,
        xv * point.w - n,
    )
    scales = (
        abs(point.f),
        abs(point.g),
        abs(point.p * xv**3),
        max(abs(clock), abs(k)),
        abs(xv * point.u),
        max(abs(xv * point.w), abs(n)),
    )
    return InvariantSet(SLOW, vals, scales, x_ref)


def relative_drift(sets) -> np.ndarray:
    """Per-invariant max drift along an orbit, relative to the term scale."""
    v = np.array([s.values for s in sets], dtype=float)
    sc = np.array([s.scales for s in sets], dtype=float)
    denom = np.maximum(np.max(sc, axis=0), np.abs(v[0]))
    denom = np.where(denom > 0.0, denom, 1.0)
    return np.max(np.abs(v - v[0]), axis=0) / denom


def fast_period_average(traj: OrbitTrajectory, a_center: float, omega: float, name: str = "x", n: int = 256) -> float:
    """Average of one orbit variable over one fast period ``2 pi / omega`` in ``a``."""
    period = 2.0 * math.pi / omega
    a = np.linspace(a_center - 0.5 * period, a_center + 0.5 * period, n + 1)
    vals = traj.sol(a)[_VARS.index(name)]
    # trapezoid over a closed period
    return float(trapezoid(vals, a) / period)

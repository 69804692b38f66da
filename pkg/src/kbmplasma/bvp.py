"""Quasi-neutral potential problem and the primed (tau -> 0) state.

Solves ``eps^2 phi'' + n_i0(x) - exp(phi) = 0`` on ``[0, X_max]`` with
``phi'(0) = phi'(X_max) = 0`` by Newton iteration on second-order central
differences (ghost-point Neumann closure).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .errors import ConvergenceError, DiscretizationWarning, DomainError
from .profiles import LORENTZ, FieldFunctions, PlasmaParams, maxwellian_initial

DEFAULT_X_MAX = {LORENTZ: 40.0}
GAUSSIAN_X_MAX = 6.0


@dataclass(frozen=True)
class GridSpec:
    x_max: float | None = None
    n: int = 8000

    def resolve(self, fields: FieldFunctions) -> tuple[float, int]:
        x_max = self.x_max
        if x_max is None:
            kind = fields.profile.kind if fields.profile is not None else None
            x_max = DEFAULT_X_MAX.get(kind, GAUSSIAN_X_MAX)
        return float(x_max), int(self.n)


@dataclass
class PotentialSolution:
    x: np.ndarray
    phi: np.ndarray
    residual: float
    iterations: int
    eps: float
    history: list = field(default_factory=list)

    @property
    def C(self) -> float:
        return float(self.phi[0])

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    def dphi(self) -> np.ndarray:
        """Central-difference ``phi'`` on the grid; Neumann values at the ends."""
        h = self.x[1] - self.x[0]
        d = np.empty_like(self.phi)
        d[1:-1] = (self.phi[2:] - self.phi[:-2]) / (2.0 * h)
        d[0] = 0.0
        d[-1] = 0.0
        return d

    def end_slopes(self) -> tuple[float, float]:
        """One-sided second-order ``phi'`` at both ends."""
        h = self.x[1] - self.x[0]
        p = self.phi
        left = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h)
        right = (3.0 * p[-1] - 4.0 * p[-2] + p[-3]) / (2.0 * h)
        return float(left), float(right)

    def record(self) -> dict:
        return {
            "eps": self.eps,
            "x_max": self.x_max,
            "n": int(self.x.size - 1),
            "C": self.C,
            "residual_max": self.residual,
            "newton_iterations": self.iterations,
            "history": self.history,
        }


def _residual(phi, ni, eps2, h2):
    lap = np.empty_like(phi)
    lap[1:-1] = phi[2:] - 2.0 * phi[1:-1] + phi[:-2]
    lap[0] = 2.0 * (phi[1] - phi[0])
    lap[-1] = 2.0 * (phi[-2] - phi[-1])
    return eps2 * lap / h2 + ni - np.exp(phi)


def solve_quasineutral_potential(
    fields: FieldFunctions,
    params: PlasmaParams,
    grid_spec: GridSpec | None = None,
    tol: float = 1e-10,
    max_iter: int = 60,
    n_i0=None,
) -> PotentialSolution:
    """Newton solution of the quasi-neutral potential problem.

    ``n_i0`` overrides the profile's ion density (a callable of ``x``).
    The Lorentz far boundary sits at ``X_max = 40`` by default; the Neumann
    condition there carries an ``O(1/X_max^2)`` truncation error.
    """
    grid_spec = grid_spec or GridSpec()
    x_max, n = grid_spec.resolve(fields)
    x = np.linspace(0.0, x_max, n + 1)
    h = x[1] - x[0]
    dens = fields.n_i0 if n_i0 is None else n_i0
    ni = np.asarray(dens(x), dtype=float) * np.ones_like(x)
    if np.any(ni <= 0.0):
        raise DomainError("ion density must be positive on [0, X_max]")
    eps2, h2 = params.eps**2, h * h

    phi = np.log(ni)
    res = _residual(phi, ni, eps2, h2)
    rnorm = float(np.max(np.abs(res)))
    history = [rnorm]
    it = 0
    while rnorm >= tol:
        if it >= max_iter:
            raise ConvergenceError(f"Newton did not converge (residual {rnorm:.3e})", phi)
        it += 1
        # Jacobian: eps^2/h^2 * Lap - diag(exp(phi)), tridiagonal
        ab = np.zeros((3, phi.size))
        c = eps2 / h2
        ab[0, 1:] = c
        ab[0, 1] = 2.0 * c
        ab[2, :-1] = c
        ab[2, -2] = 2.0 * c
        ab[1, :] = -2.0 * c - np.exp(phi)
        step = solve_banded((1, 1), ab, -res)
        lam = 1.0
        for _ in range(41):
            trial = phi + lam * step
            tres = _residual(trial, ni, eps2, h2)
            tnorm = float(np.max(np.abs(tres)))
            if np.isfinite(tnorm) and tnorm < rnorm:
                break
            lam *= 0.5
        else:
            # no decrease possible: residual is at its rounding floor
            if rnorm < 1e3 * tol:
                warnings.warn(
                    f"residual plateau at {rnorm:.3e} above tol {tol:.1e}", DiscretizationWarning
                )
                break
            raise ConvergenceError(f"line search failed at residual {rnorm:.3e}", phi)
        phi, res, rnorm = trial, tres, tnorm
        history.append(rnorm)
    return PotentialSolution(x=x, phi=phi, residual=rnorm, iterations=it, eps=params.eps, history=history)


@dataclass(frozen=True)
class PrimedState:
    """Evaluators of the primed variables.

    ``p_prime(s) = -eps dphi/ds`` (odd in ``s``); ``shift(x') = x' + eps
    delta(x') / omega(x')^2``; ``p_prime_label(x') = p_prime(shift(x'))``.
    """

    potential: PotentialSolution
    fields: FieldFunctions
    params: PlasmaParams
    _spline: CubicSpline

    def shift(self, x_prime):
        x_prime = np.asarray(x_prime, dtype=float)
        return x_prime + self.params.eps * self.fields.delta(x_prime) / self.fields.omega(x_prime) ** 2

    def p_prime(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(np.abs(s) > self.potential.x_max):
            raise DomainError("s outside the solved potential domain")
        return -self.params.eps * np.sign(s) * self._spline(np.abs(s), 1)

    def p_prime_label(self, x_prime):
        return self.p_prime(self.shift(x_prime))

    def g_prime(self, x_prime, u_prime):
        mx = maxwellian_initial(self.fields.profile, self.params)
        return mx.g0(self.shift(x_prime), u_prime)

    def f_prime(self, x_prime, w_prime):
        mx = maxwellian_initial(self.fields.profile, self.params)
        if mx.f0 is None:
            raise DomainError("cold ions have no pointwise ion distribution")
        return mx.f0(self.shift(x_prime), w_prime)


def primed_state(potential: PotentialSolution, fields: FieldFunctions, params: PlasmaParams) -> PrimedState:
    """Compose the potential with the shift map ``s(x')``."""
    spline = CubicSpline(potential.x, potential.phi, bc_type=((1, 0.0), (1, 0.0)))
    return PrimedState(potential=potential, fields=fields, params=params, _spline=spline)


def xi_vs_p_prime(primed: PrimedState, x_primes) -> list[tuple[float, float, float, float]]:
    """Diagnostic rows ``(x', s, xi(x'), p'(x'))`` for the small-field regime."""
    rows = []
    for xp in x_primes:
        rows.append(
            (float(xp), float(primed.shift(xp)), float(primed.fields.xi(xp)), float(primed.p_prime_label(xp)))
        )
    return rows

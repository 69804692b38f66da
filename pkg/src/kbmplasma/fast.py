"""Fast electron dynamics reconstructed on the slow background.

Along the slow trajectory of label ``x'`` the slow clock is

    tau(x'') = sqrt((2/eps) xi(x'')**2 K(x', x'')),  t = tau / mu,

and the full field and electron velocity at ``x_bar`` carry oscillatory
integrals with phase ``Phi(x'') = Omega(x'') t(x'')``.  Those integrals are
evaluated panel by panel, one phase period per panel, with Gauss-Legendre
nodes on every panel; the substitution ``x'' = x' + s**2`` removes the
``1/tau`` endpoint singularity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterDomainError, QuadratureRefusal, RegimeWarning
from .profiles import FieldFunctions, PlasmaParams
from .slow import inverse_cube_integral, slow_map_inverse

LABEL_FROZEN = "label-frozen"
I3_SCALED = "i3-scaled"
DELTA_MODES = (LABEL_FROZEN, I3_SCALED)

_INNER_NODES = 20
_MIN_PANELS = 32


def clock_along_slow(x_prime: float, x_dprime: float, fields: FieldFunctions, params: PlasmaParams):
    """``(tau, t)`` at which the slow trajectory of ``x'`` reaches ``x''``."""
    if x_prime * x_dprime <= 0.0 or abs(x_dprime) < abs(x_prime):
        raise ParameterDomainError("x'' must lie beyond x' on the same half-line")
    if x_dprime == x_prime:
        return 0.0, 0.0
    k = abs(inverse_cube_integral(fields, x_prime, x_dprime))
    tau = math.sqrt(2.0 / params.eps * float(fields.xi(x_dprime)) ** 2 * k)
    t = tau / params.mu if params.mu > 0 else math.inf
    return tau, t


@dataclass(frozen=True)
class FastOptions:
    points_per_period: int = 16
    delta_mode: str = LABEL_FROZEN
    regime_threshold: float = 0.05
    max_grid: int = 1 << 16

    def __post_init__(self):
        if self.delta_mode not in DELTA_MODES:
            raise ParameterDomainError(f"unknown delta mode {self.delta_mode!r}")
        if self.points_per_period < 2:
            raise ParameterDomainError("points_per_period must be >= 2")


class _Trajectory:
    """Slow trajectory of one label, parametrised by ``s = sqrt(x'' - x')``."""

    def __init__(self, x_prime, fields, params, opts):
        self.xp = x_prime
        self.fields = fields
        self.params = params
        self.opts = opts
        self.xi_p = float(fields.xi(x_prime))
        self.delta_p = float(fields.delta(x_prime))
        self.ni_p = float(fields.n_i0(x_prime))
        self._gx, self._gw = np.polynomial.legendre.leggauss(_INNER_NODES)

    def _k_pieces(self, lo, hi):
        """``integral_{lo^2}^{hi^2} dz / xi(x'+z)^3`` for arrays of s-limits."""
        a, b = lo * lo, hi * hi
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        z = mid[:, None] + half[:, None] * self._gx[None, :]
        vals = np.asarray(self.fields.xi(self.xp + z), dtype=float) ** -3
        return half * (vals @ self._gw)

    def k_at(self, breaks, nodes_per_panel):
        """Cumulative ``K`` at panel breaks and at interior nodes."""
        k_breaks = np.concatenate([[0.0], np.cumsum(self._k_pieces(breaks[:-1], breaks[1:]))])
        return k_breaks

    def state(self, s, k):
        """tau, Omega, phase, delta and xi at nodes ``s`` with cumulative ``K``."""
        eps, mu = self.params.eps, self.params.mu
        x2 = self.xp + s * s
        xi2 = np.asarray(self.fields.xi(x2), dtype=float)
        tau = np.sqrt(2.0 / eps * xi2 * xi2 * k)
        ratio = self.xi_p / xi2
        om = np.sqrt(self.ni_p * ratio)
        phase = om * tau / mu
        if self.opts.delta_mode == I3_SCALED:
            d = self.delta_p * ratio**3
        else:
            d = np.full_like(s, self.delta_p)
        return tau, om, phase, d, xi2

    def phase_grid(self, smax):
        n = 512
        while True:
            s = np.linspace(0.0, smax, n + 1)
            k = self.k_at(s, 0)
            _, _, ph, _, _ = self.state(s, k)
            dph = np.abs(np.diff(ph))
            if np.max(dph) < 0.5 * math.pi:
                return s, ph
            n *= 2
            if n > self.opts.max_grid:
                raise QuadratureRefusal(
                    f"phase not resolved with {self.opts.max_grid} samples (max step {np.max(dph):.2f} rad)"
                )

    def integrals(self, x_bar):
        """``(I_p, I_u, min points per period, panels)`` from ``x'`` to ``x_bar``."""
        eps, mu = self.params.eps, self.params.mu
        smax = math.sqrt(x_bar - self.xp)
        if smax == 0.0:
            return 0.0, 0.0, math.inf, 0
        s_grid, ph = self.phase_grid(smax)
        # panel breaks: every crossing of a multiple of 2 pi, plus a uniform floor
        turns = np.floor(ph / (2.0 * math.pi))
        idx = np.nonzero(np.diff(turns))[0]
        cross = []
        for i in idx:
            for m in range(int(min(turns[i], turns[i + 1])) + 1, int(max(turns[i], turns[i + 1])) + 1):
                target = 2.0 * math.pi * m
                f = (target - ph[i]) / (ph[i + 1] - ph[i])
                cross.append(s_grid[i] + f * (s_grid[i + 1] - s_grid[i]))
        breaks = np.unique(np.concatenate([np.linspace(0.0, smax, _MIN_PANELS + 1), cross]))
        # nodes per panel from the phase advance on that panel
        ph_b = np.interp(breaks, s_grid, ph)
        span = np.abs(np.diff(ph_b)) / (2.0 * math.pi)
        ppp = self.opts.points_per_period
        counts = np.maximum(ppp, np.ceil(ppp * span).astype(int))
        k_breaks = self.k_at(breaks, counts)
        ip = iu = 0.0
        min_ppp = math.inf
        for j in np.unique(counts):
            sel = np.nonzero(counts == j)[0]
            gx, gw = np.polynomial.legendre.leggauss(int(j))
            lo, hi = breaks[sel], breaks[sel + 1]
            half = 0.5 * (hi - lo)
            s = 0.5 * (hi + lo)[:, None] + half[:, None] * gx[None, :]
            k = k_breaks[sel][:, None] + self._k_pieces(
                np.repeat(lo, j), s.ravel()
            ).reshape(s.shape)
            tau, om, phase, d, xi2 = self.state(s, k)
            jac = 2.0 * s / (eps * mu * tau)
            fp = d * om * xi2 * xi2 * np.sin(phase) * jac
            fu = d * np.cos(phase) * jac
            ip += float(np.sum((fp @ gw) * half))
            iu += float(np.sum((fu @ gw) * half))
            with np.errstate(divide="ignore"):
                local = np.where(span[sel] > 0, j / np.maximum(span[sel], 1e-300), np.inf)
            min_ppp = min(min_ppp, float(np.min(np.maximum(local, j))))
        return ip, iu, min_ppp, len(breaks) - 1


@dataclass
class FastPoint:
    x_bar: float
    tau: float
    x_prime: float
    p_full: float
    p_slow: float
    u: float
    n_e_av: float
    u_e_av: float
    min_points_per_period: float
    panels: int


def _prepare(x_prime, x_bar, fields, params, opts):
    if x_prime <= 0.0 or x_bar < x_prime:
        raise ParameterDomainError("need 0 < x' <= x_bar")
    if params.mu <= 0.0:
        raise ParameterDomainError("fast reconstruction needs mu > 0")
    d = float(fields.delta(x_prime))
    if abs(d * params.eps) > opts.regime_threshold:
        warnings.warn(
            f"|delta eps| = {abs(d * params.eps):.3g} exceeds {opts.regime_threshold}; x ~ x_bar assumption is weak",
            RegimeWarning,
            stacklevel=3,
        )
    return _Trajectory(x_prime, fields, params, opts)


def _p_prime(fields, x_prime, primed):
    return float(fields.xi(x_prime)) if primed is None else float(primed.p_prime_label(x_prime))


def fast_point(
    x_prime: float,
    x_bar: float,
    fields: FieldFunctions,
    params: PlasmaParams,
    primed=None,
    options: FastOptions | None = None,
    u_prime: float = 0.0,
) -> FastPoint:
    """All fast quantities at ``x_bar`` on the trajectory of label ``x_prime``."""
    opts = options or FastOptions()
    neg = x_prime < 0.0
    if neg:
        x_prime, x_bar, u_prime = -x_prime, -x_bar, -u_prime
    traj = _prepare(x_prime, x_bar, fields, params, opts)
    ip, iu, mppp, panels = traj.integrals(x_bar)
    xi_p, xi_b = traj.xi_p, float(fields.xi(x_bar))
    r = xi_p / xi_b
    tau, _ = clock_along_slow(x_prime, x_bar, fields, params) if x_bar > x_prime else (0.0, 0.0)
    p_slow = r**3 * _p_prime(fields, x_prime, primed)
    out = FastPoint(
        x_bar=x_bar,
        tau=tau,
        x_prime=x_prime,
        p_full=p_slow + ip / xi_b**3,
        p_slow=p_slow,
        u=r * u_prime + iu / xi_b,
        n_e_av=float(fields.n_e0(x_prime)) * r,
        u_e_av=iu / xi_p,
        min_points_per_period=mppp,
        panels=panels,
    )
    if neg:
        # p, u and u_e_av are odd; densities even
        out.x_bar, out.x_prime = -out.x_bar, -out.x_prime
        out.p_full, out.p_slow, out.u, out.u_e_av = -out.p_full, -out.p_slow, -out.u, -out.u_e_av
    return out


def fast_field(x_prime, x_bar, fields, params, primed=None, options=None) -> float:
    """Full (slow + oscillatory) electric field at ``x_bar``."""
    return fast_point(x_prime, x_bar, fields, params, primed, options).p_full


def fast_velocity(x_prime, x_bar, fields, params, primed=None, options=None, u_prime: float = 0.0) -> float:
    """Electron velocity at ``x_bar`` for label velocity ``u_prime``."""
    return fast_point(x_prime, x_bar, fields, params, primed, options, u_prime).u


def electron_diagnostics(x_prime, x_bar, fields, params, options=None):
    """Averaged electron density and velocity ``(n_e_av, u_e_av)``."""
    pt = fast_point(x_prime, x_bar, fields, params, None, options)
    return pt.n_e_av, pt.u_e_av


@dataclass
class FastReconstruction:
    """Fast quantities on a laboratory grid at one slow time."""

    tau: float
    points: list = field(default_factory=list)
    points_per_period: int = 16
    delta_mode: str = LABEL_FROZEN

    def column(self, name):
        return np.array([getattr(p, name) for p in self.points])

    @property
    def min_points_per_period(self) -> float:
        return min((p.min_points_per_period for p in self.points), default=math.inf)


def reconstruct(x_bars, tau, fields, params, primed=None, options=None) -> FastReconstruction:
    """Fast reconstruction at slow time ``tau`` over the grid ``x_bars``.

    Each grid point is traced back to its label by the inverse slow map and
    integrated along that label's trajectory.
    """
    opts = options or FastOptions()
    rec = FastReconstruction(tau=float(tau), points_per_period=opts.points_per_period, delta_mode=opts.delta_mode)
    for xb in x_bars:
        xb = float(xb)
        if xb == 0.0:
            raise ParameterDomainError("x_bar = 0 is singular; use a grid excluding the origin")
        xp = slow_map_inverse(xb, tau, fields, params)
        pt = fast_point(xp, xb, fields, params, primed, opts)
        pt.tau = float(tau)
        rec.points.append(pt)
    return rec


def oscillation_extrema(x, y, rel_threshold: float = 0.05):
    """Positions of local extrema of ``y(x)`` whose swing exceeds a fraction of the largest swing."""
    y = np.asarray(y)
    x = np.asarray(x)
    dy = np.diff(y)
    sgn = np.sign(dy)
    idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0] + 1
    if idx.size < 2:
        return np.array([])
    swings = np.abs(np.diff(y[idx]))
    keep = np.zeros(idx.size, dtype=bool)
    top = swings.max()
    good = swings > rel_threshold * top
    keep[:-1] |= good
    keep[1:] |= good
    return x[idx[keep]]

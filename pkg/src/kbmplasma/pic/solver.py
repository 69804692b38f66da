"""Electrostatic 1D1V two-species particle-in-cell reference solver.

The dimensionless two-clock system is collapsed onto the fast clock ``t``
(``tau = mu t``, ``d/dtau = (1/mu) d/dt``):

    electrons   dx/dt = eps u,       du/dt = -p
    ions        dx/dt = eps mu w,    dw/dt = mu p
    field       eps dp/dx = n_i - n_e

Charge is deposited by linear (cloud-in-cell) weighting on a node grid
symmetric about ``x = 0``.  The field is the antisymmetric Gauss integral

    p_j = (dx / 2 eps) sum_k sign(j - k) rho_k,

which equals the integral from the symmetry point (``p(0) = 0``) for a
mirror-symmetric charge and makes the discrete self-force vanish, so total
momentum is conserved to rounding.  Particles advance by kick-drift-kick
leapfrog.  Densities are normalised so that each species integrates to its
profile's mass on ``[-X_max, X_max]`` (velocity distributions are unit
normalised).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, fields as dc_fields

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import ndtri

from ..errors import CflViolation, ParameterDomainError
from ..profiles import DensityProfile, PlasmaParams
from . import kernels

COLD_ION_GAMMA = 0.01


def single_clock_system() -> str:
    """The equations advanced by :func:`run`, as text."""
    return (
        "electrons: dx/dt = eps*u, du/dt = -p\n"
        "ions:      dx/dt = eps*mu*w, dw/dt = mu*p\n"
        "field:     eps*dp/dx = n_i - n_e, p odd about x = 0\n"
        "clock:     tau = mu*t"
    )


@dataclass(frozen=True)
class PicConfig:
    """Run parameters.

    ``dt`` and ``t_end`` are on the fast clock.  ``diag_every`` is the
    number of steps between diagnostics records.  The default domain is
    wide because hot-tail electrons leave the bunch and turn around only
    in the weak far field of the small net charge they leave behind; at
    ``X_max = 120`` no particle is lost over the Gaussian ``tau = 4`` run.
    """

    params: PlasmaParams
    profile: DensityProfile
    x_max: float = 120.0
    n_cells: int = 4800
    n_particles: int = 100_000
    dt: float = 0.1
    t_end: float = 10.0
    seed: int = 0
    diag_every: int = 50
    cfl_cells: float = 1.0
    core_fraction: float = 0.5

    def __post_init__(self):
        om_max = math.sqrt(float(np.max(self.profile.n_i(self.sample_grid()))))
        if not self.dt * om_max < 0.2:
            raise ParameterDomainError(f"dt*Omega_max = {self.dt * om_max:.3f} must be < 0.2")
        if not self.dx < self.params.eps:
            raise ParameterDomainError(f"cell size {self.dx:.3g} must be below eps = {self.params.eps}")
        if self.n_particles < 10_000:
            raise ParameterDomainError("n_particles must be >= 1e4")
        if self.n_particles % 2:
            raise ParameterDomainError("n_particles must be even (mirror-paired quiet start)")
        if self.params.mu <= 0.0:
            raise ParameterDomainError("the kinetic run needs mu > 0")
        if self.diag_every < 1 or self.t_end <= 0.0:
            raise ParameterDomainError("diag_every >= 1 and t_end > 0 required")

    @property
    def dx(self) -> float:
        return 2.0 * self.x_max / self.n_cells

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def grid(self) -> np.ndarray:
        return np.linspace(-self.x_max, self.x_max, self.n_cells + 1)

    @property
    def sample_reach(self) -> float:
        """Largest ``|x|`` at which particles are loaded."""
        return min(self.x_max - self.dx, self.profile.x_limit)

    def sample_grid(self) -> np.ndarray:
        return np.linspace(-self.sample_reach, self.sample_reach, self.n_cells + 1)

    @classmethod
    def for_tau(cls, tau_end: float, params: PlasmaParams, profile: DensityProfile, n_diag: int = 8, **kw):
        """Config whose run ends at slow time ``tau_end`` with ``n_diag`` records after ``t = 0``."""
        dt = kw.pop("dt", 0.1)
        n_steps = int(math.ceil(tau_end / params.mu / dt / n_diag)) * n_diag
        return cls(params=params, profile=profile, dt=dt, t_end=n_steps * dt, diag_every=n_steps // n_diag, **kw)


@dataclass
class Species:
    x: np.ndarray
    v: np.ndarray
    weight: np.ndarray
    charge: float
    lost_weight: float = 0.0
    lost_count: int = 0

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weight)) + self.lost_weight


@dataclass
class PicState:
    """Particles, field and clock."""

    electrons: Species
    ions: Species
    p: np.ndarray
    t: float
    step: int
    losses: list = field(default_factory=list)


@dataclass
class Diagnostics:
    step: int
    t: float
    tau: float
    kinetic_e: float
    kinetic_i: float
    field_energy: float
    momentum: float
    ion_half_width: float
    ion_peak: float
    ion_slope: float
    ion_T: float
    gauss_residual: float
    continuity_residual: float
    lost_weight: float
    profiles: dict = field(default_factory=dict, repr=False)

    @property
    def energy(self) -> float:
        return self.kinetic_e + self.kinetic_i + self.field_energy


SCALARS = tuple(f.name for f in dc_fields(Diagnostics) if f.name != "profiles")


@dataclass
class PicSeries:
    config: PicConfig
    records: list = field(default_factory=list)
    state: PicState | None = None

    def column(self, name):
        if name == "energy":
            return np.array([r.energy for r in self.records])
        return np.array([getattr(r, name) for r in self.records])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(SCALARS + ("energy",))
            for r in self.records:
                wr.writerow([repr(getattr(r, k)) for k in SCALARS] + [repr(r.energy)])

    def profiles_to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            keys = None
            for r in self.records:
                if keys is None:
                    keys = list(r.profiles)
                    wr.writerow(["tau"] + keys)
                cols = [r.profiles[k] for k in keys]
                for row in zip(*cols):
                    wr.writerow([repr(r.tau)] + [repr(float(v)) for v in row])


def _stratified_positions(density, x_max: float, n_half: int, n_table: int = 40001):
    """Positive-half positions by inverse-CDF stratified sampling; returns (x, mass)."""
    xs = np.linspace(0.0, x_max, n_table)
    cdf = cumulative_trapezoid(density(xs), xs, initial=0.0)
    half_mass = cdf[-1]
    q = (np.arange(n_half) + 0.5) / n_half * half_mass
    return np.interp(q, cdf, xs), 2.0 * half_mass


def _stratified_normal(n: int, rng: np.random.Generator) -> np.ndarray:
    v = ndtri((np.arange(n) + 0.5) / n)
    rng.shuffle(v)
    return v


def initial_state(config: PicConfig) -> PicState:
    """Quiet, mirror-symmetric start with seeded velocity shuffles."""
    rng = np.random.default_rng(config.seed)
    half = config.n_particles // 2
    prof, params = config.profile, config.params
    # keep one cell clear of the boundary so linear weights stay on the grid
    reach = config.sample_reach

    xe, me = _stratified_positions(prof.n_e, reach, half)
    ue = _stratified_normal(half, rng)
    xi, mi = _stratified_positions(prof.n_i, reach, half)
    if params.gamma < COLD_ION_GAMMA:
        wi = np.zeros(half)
    else:
        wi = params.gamma * _stratified_normal(half, rng)

    def mirror(a, odd=True):
        return np.concatenate([a, -a if odd else a])

    electrons = Species(mirror(xe), mirror(ue), np.full(2 * half, me / (2 * half)), -1.0)
    ions = Species(mirror(xi), mirror(wi), np.full(2 * half, mi / (2 * half)), 1.0)
    state = PicState(electrons=electrons, ions=ions, p=np.zeros(config.n_cells + 1), t=0.0, step=0)
    state.p = solve_field(charge_density(state, config), config)
    return state


def charge_density(state: PicState, config: PicConfig) -> np.ndarray:
    x0, dx, nn = -config.x_max, config.dx, config.n_cells + 1
    ne = kernels.deposit_cic(state.electrons.x, state.electrons.weight, x0, dx, nn)
    ni = kernels.deposit_cic(state.ions.x, state.ions.weight, x0, dx, nn)
    return (ni - ne) / dx


def solve_field(rho: np.ndarray, config: PicConfig) -> np.ndarray:
    """Antisymmetric Gauss integral of the node charge density."""
    below = np.concatenate([[0.0], np.cumsum(rho)[:-1]])
    total = below[-1] + rho[-1]
    return (config.dx / (2.0 * config.params.eps)) * (2.0 * below + rho - total)


def gauss_residual(p: np.ndarray, rho: np.ndarray, config: PicConfig) -> float:
    """``max |eps (p_{j+1} - p_j)/dx - (rho_j + rho_{j+1})/2|``."""
    lhs = config.params.eps * np.diff(p) / config.dx
    return float(np.max(np.abs(lhs - 0.5 * (rho[1:] + rho[:-1]))))


def _drop_lost(sp: Species, config: PicConfig, step: int, t: float, name: str, log: list):
    bound = config.x_max - config.dx
    out = np.abs(sp.x) >= bound
    if np.any(out):
        lw = float(np.sum(sp.weight[out]))
        sp.lost_weight += lw
        sp.lost_count += int(np.count_nonzero(out))
        log.append({"step": step, "t": t, "species": name, "count": int(np.count_nonzero(out)), "weight": lw})
        keep = ~out
        sp.x, sp.v, sp.weight = sp.x[keep], sp.v[keep], sp.weight[keep]
        return keep
    return None


def _moments(sp: Species, config: PicConfig):
    x0, dx, nn = -config.x_max, config.dx, config.n_cells + 1
    m0 = kernels.deposit_cic(sp.x, sp.weight, x0, dx, nn)
    m1 = kernels.deposit_cic(sp.x, sp.weight * sp.v, x0, dx, nn)
    m2 = kernels.deposit_cic(sp.x, sp.weight * sp.v * sp.v, x0, dx, nn)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(m0 > 0, m1 / m0, 0.0)
        temp = np.where(m0 > 0, m2 / m0 - mean * mean, 0.0)
    return m0 / dx, mean, temp


def _ion_core(ions: Species, core_fraction: float):
    """Half-width, slope and temperature from the ion ensemble.

    The half-width is ``sqrt(2 ln 2)`` times the rms position; the slope is
    a least-squares fit ``w = c x`` over ``|x| < core_fraction * half_width``
    and the temperature is the weighted variance about that fit.
    """
    W = ions.weight
    sig = math.sqrt(float(np.sum(W * ions.x**2) / np.sum(W)))
    hw = math.sqrt(2.0 * math.log(2.0)) * sig
    core = np.abs(ions.x) < core_fraction * hw
    xc, wc, Wc = ions.x[core], ions.v[core], W[core]
    slope = float(np.sum(Wc * xc * wc) / np.sum(Wc * xc * xc))
    resid = wc - slope * xc
    temp = float(np.sum(Wc * resid**2) / np.sum(Wc))
    return hw, slope, temp


def diagnose(state: PicState, config: PicConfig, rho: np.ndarray, cont: float) -> Diagnostics:
    e, i = state.electrons, state.ions
    params = config.params
    ke = 0.5 * float(np.sum(e.weight * e.v**2))
    ki = 0.5 * float(np.sum(i.weight * i.v**2))
    fe = 0.5 * float(np.sum(state.p**2)) * config.dx
    mom = float(np.sum(e.weight * e.v)) + float(np.sum(i.weight * i.v)) / params.mu
    hw, slope, temp = _ion_core(i, config.core_fraction)
    n_e, u_e, T_e = _moments(e, config)
    n_i, w_i, T_i = _moments(i, config)
    peak = float(np.max(n_i[np.abs(config.grid()) < 0.5 * hw])) if hw > 0 else float("nan")
    gam2 = params.gamma**2 if params.gamma >= COLD_ION_GAMMA else 1.0
    return Diagnostics(
        step=state.step,
        t=state.t,
        tau=params.mu * state.t,
        kinetic_e=ke,
        kinetic_i=ki,
        field_energy=fe,
        momentum=mom,
        ion_half_width=hw,
        ion_peak=peak,
        ion_slope=slope,
        ion_T=temp / gam2,
        gauss_residual=gauss_residual(state.p, rho, config),
        continuity_residual=cont,
        lost_weight=e.lost_weight + i.lost_weight,
        profiles={
            "x": config.grid(),
            "n_e": n_e,
            "u_e": u_e,
            "T_e": T_e,
            "n_i": n_i,
            "w_i": w_i,
            "T_i": T_i / gam2,
            "p": state.p.copy(),
        },
    )


def _continuity_residual(xe0, xe1, We, xi0, xi1, Wi, config: PicConfig) -> float:
    """Residual of ``d rho/dt + dj/dx = 0`` for one step of charge-conserving deposition."""
    x0, dx, nn, dt = -config.x_max, config.dx, config.n_cells + 1, config.dt
    rho0 = (kernels.deposit_cic(xi0, Wi, x0, dx, nn) - kernels.deposit_cic(xe0, We, x0, dx, nn)) / dx
    rho1 = (kernels.deposit_cic(xi1, Wi, x0, dx, nn) - kernels.deposit_cic(xe1, We, x0, dx, nn)) / dx
    j = kernels.deposit_current(xi0, xi1, Wi, x0, dx, nn, dt) - kernels.deposit_current(xe0, xe1, We, x0, dx, nn, dt)
    jpad = np.concatenate([[0.0], j, [0.0]])
    return float(np.max(np.abs((rho1 - rho0) / dt + np.diff(jpad) / dx)))


def run(config: PicConfig, state: PicState | None = None, checkpoint_every: int = 0, checkpoint_path=None) -> PicSeries:
    """Advance to ``config.t_end``, recording diagnostics every ``diag_every`` steps.

    Passing a ``state`` (for instance from :func:`~kbmplasma.pic.checkpoint.load`)
    resumes that run; the continuation is bit-identical to an uninterrupted one.
    A particle moving more than ``cfl_cells`` cells in one step aborts the run
    with :class:`~kbmplasma.errors.CflViolation` after dumping a checkpoint.
    """
    from . import checkpoint as ckpt

    params = config.params
    eps, mu, dt, dx = params.eps, params.mu, config.dt, config.dx
    x0 = -config.x_max
    series = PicSeries(config=config)
    if state is None:
        state = initial_state(config)
        rho = charge_density(state, config)
        series.records.append(diagnose(state, config, rho, 0.0))
    e, i = state.electrons, state.ions
    pe = kernels.gather_cic(e.x, state.p, x0, dx)
    pi = kernels.gather_cic(i.x, state.p, x0, dx)
    limit = config.cfl_cells * dx
    while state.step < config.n_steps:
        e.v = e.v - 0.5 * dt * pe
        i.v = i.v + 0.5 * dt * mu * pi
        xe_new = e.x + dt * eps * e.v
        xi_new = i.x + dt * eps * mu * i.v
        move = max(float(np.max(np.abs(xe_new - e.x), initial=0.0)), float(np.max(np.abs(xi_new - i.x), initial=0.0)))
        if move > limit:
            path = ckpt.dump_path(checkpoint_path, state.step)
            ckpt.save(path, state, config)
            raise CflViolation(f"particle moved {move / dx:.2f} cells at step {state.step}", dump_path=path)
        diag_now = (state.step + 1) % config.diag_every == 0 or state.step + 1 == config.n_steps
        old = (e.x, i.x, e.weight, i.weight)
        e.x, i.x = xe_new, xi_new
        state.step += 1
        state.t = state.step * dt
        cont = 0.0
        ke_ = _drop_lost(e, config, state.step, state.t, "electrons", state.losses)
        ki_ = _drop_lost(i, config, state.step, state.t, "ions", state.losses)
        if diag_now:
            xe0 = old[0] if ke_ is None else old[0][ke_]
            xi0 = old[1] if ki_ is None else old[1][ki_]
            cont = _continuity_residual(xe0, e.x, e.weight, xi0, i.x, i.weight, config)
        rho = charge_density(state, config)
        state.p = solve_field(rho, config)
        pe = kernels.gather_cic(e.x, state.p, x0, dx)
        pi = kernels.gather_cic(i.x, state.p, x0, dx)
        e.v = e.v - 0.5 * dt * pe
        i.v = i.v + 0.5 * dt * mu * pi
        if diag_now:
            series.records.append(diagnose(state, config, rho, cont))
        if checkpoint_every and checkpoint_path is not None and state.step % checkpoint_every == 0:
            ckpt.save(checkpoint_path, state, config)
    series.state = state
    return series

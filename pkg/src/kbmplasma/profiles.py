"""Initial density profiles and the scalar field functions derived from them.

All quantities are dimensionless.  Every profile is even in ``x``; the ion
profile is the electron profile stretched by the width ratio ``b``:
``n_i(x) = b * n_e(b x)``.  Evaluators accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator
from scipy.special import erf

from .errors import DomainError, ParameterDomainError

GAUSSIAN = "gaussian"
LORENTZ = "lorentz"
TABULATED = "tabulated"
KINDS = (GAUSSIAN, LORENTZ, TABULATED)

# exp(-x^2) underflows the double range a little beyond this
GAUSSIAN_X_CAP = 26.0

_SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class PlasmaParams:
    """Dimensionless small parameters and shape constants.

    Parameters
    ----------
    eps : float
        Debye radius over bunch length.
    mu : float
        Square root of the electron/ion mass ratio (times charge number).
        ``mu = 0`` is admitted for the immobile-ion limit.
    gamma : float
        Ion thermal speed over ion sound speed.
    b : float
        Ion/electron profile width ratio.
    Ti0 : float
        Initial ion temperature; temperatures are reported relative to it.
    """

    eps: float
    mu: float
    gamma: float
    b: float = 1.0
    Ti0: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ParameterDomainError(f"eps must lie in (0, 1), got {self.eps}")
        if not 0.0 <= self.mu < 1.0:
            raise ParameterDomainError(f"mu must lie in [0, 1), got {self.mu}")
        if self.gamma < 0.0:
            raise ParameterDomainError(f"gamma must be >= 0, got {self.gamma}")
        if self.b <= 0.0:
            raise ParameterDomainError(f"b must be > 0, got {self.b}")
        if self.Ti0 <= 0.0:
            raise ParameterDomainError(f"Ti0 must be > 0, got {self.Ti0}")

    @property
    def nu2(self) -> float:
        """Squared expansion rate of the Gaussian self-similar solution."""
        return 2.0 * self.eps**2 * (1.0 + self.b**2 * self.gamma**2)

    @property
    def nu(self) -> float:
        return float(np.sqrt(self.nu2))

    def replace(self, **changes) -> "PlasmaParams":
        values = dict(eps=self.eps, mu=self.mu, gamma=self.gamma, b=self.b, Ti0=self.Ti0)
        values.update(changes)
        return PlasmaParams(**values)


def _lorentz_shape(x):
    return 1.0 / (np.pi * (1.0 + x * x))


def _lorentz_logd(x):
    return -2.0 * x / (1.0 + x * x)


def _lorentz_logd_prime(x):
    x2 = x * x
    return -2.0 * (1.0 - x2) / (1.0 + x2) ** 2


def _gauss_shape(x):
    return np.exp(-x * x) / _SQRT_PI


@dataclass(frozen=True)
class DensityProfile:
    """Even initial electron and ion densities.

    ``table`` holds ``(x, n)`` samples on ``x >= 0`` for the tabulated kind;
    it is mirrored to negative ``x`` and interpolated with a monotone cubic.
    """

    kind: str
    b: float = 1.0
    table: tuple | None = None
    ion_table: tuple | None = None
    _interp: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterDomainError(f"unknown profile kind {self.kind!r}")
        if self.b <= 0.0:
            raise ParameterDomainError(f"b must be > 0, got {self.b}")
        if self.kind == TABULATED:
            if self.table is None:
                raise ParameterDomainError("tabulated profile needs a table")
            self._interp["e"] = _build_table(*self.table)
            if self.ion_table is not None:
                self._interp["i"] = _build_table(*self.ion_table)

    # the x cap is the only place a Gaussian profile can fail
    def check_domain(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == GAUSSIAN:
            if np.any(np.abs(x) > GAUSSIAN_X_CAP / max(self.b, 1.0)):
                raise DomainError(
                    f"|x| exceeds the Gaussian evaluation cap {GAUSSIAN_X_CAP / max(self.b, 1.0):g}"
                )
        elif self.kind == TABULATED:
            lim = self.x_limit
            if np.any(np.abs(x) > lim):
                raise DomainError(f"|x| exceeds tabulated range {lim:g}")
        return x

    @property
    def x_limit(self) -> float:
        if self.kind == GAUSSIAN:
            return GAUSSIAN_X_CAP / max(self.b, 1.0)
        if self.kind == LORENTZ:
            return np.inf
        lim = self._interp["e"].x[-1]
        if "i" in self._interp:
            return min(lim, self._interp["i"].x[-1])
        return lim / max(self.b, 1.0)

    def n_e(self, x):
        x = self.check_domain(x)
        if self.kind == GAUSSIAN:
            return _gauss_shape(x)
        if self.kind == LORENTZ:
            return _lorentz_shape(x)
        return self._interp["e"](x)

    def n_i(self, x):
        x = self.check_domain(x)
        b = self.b
        if self.kind == GAUSSIAN:
            return b * _gauss_shape(b * x)
        if self.kind == LORENTZ:
            return b * _lorentz_shape(b * x)
        if "i" in self._interp:
            return self._interp["i"](x)
        return b * self._interp["e"](b * x)

    def logd_e(self, x):
        """``d/dx ln n_e``."""
        x = self.check_domain(x)
        if self.kind == GAUSSIAN:
            return -2.0 * x
        if self.kind == LORENTZ:
            return _lorentz_logd(x)
        s = self._interp["e"]
        return s.derivative()(x) / s(x)

    def logd_i(self, x):
        x = self.check_domain(x)
        b = self.b
        if self.kind == GAUSSIAN:
            return -2.0 * b * b * x
        if self.kind == LORENTZ:
            return b * _lorentz_logd(b * x)
        if "i" in self._interp:
            s = self._interp["i"]
            return s.derivative()(x) / s(x)
        s = self._interp["e"]
        return b * s.derivative()(b * x) / s(b * x)

    def logd_e_prime(self, x):
        x = self.check_domain(x)
        if self.kind == GAUSSIAN:
            return np.full_like(x, -2.0)
        if self.kind == LORENTZ:
            return _lorentz_logd_prime(x)
        s = self._interp["e"]
        n, d1, d2 = s(x), s.derivative()(x), s.derivative(2)(x)
        return d2 / n - (d1 / n) ** 2

    def logd_i_prime(self, x):
        x = self.check_domain(x)
        b = self.b
        if self.kind == GAUSSIAN:
            return np.full_like(x, -2.0 * b * b)
        if self.kind == LORENTZ:
            return b * b * _lorentz_logd_prime(b * x)
        if "i" in self._interp:
            s = self._interp["i"]
            y = x
            scale = 1.0
        else:
            s = self._interp["e"]
            y = b * x
            scale = b * b
        n, d1, d2 = s(y), s.derivative()(y), s.derivative(2)(y)
        return scale * (d2 / n - (d1 / n) ** 2)


def _build_table(xs, ns) -> PchipInterpolator:
    xs = np.asarray(xs, dtype=float)
    ns = np.asarray(ns, dtype=float)
    if xs.ndim != 1 or xs.shape != ns.shape or xs.size < 3:
        raise ParameterDomainError("table needs matching 1-D columns of length >= 3")
    if np.any(np.diff(xs) <= 0):
        raise ParameterDomainError("table abscissae must be strictly increasing")
    if np.any(ns <= 0):
        raise ParameterDomainError("table densities must be positive")
    if xs[0] != 0.0:
        raise ParameterDomainError("table must start at x = 0 (profiles are even)")
    full_x = np.concatenate([-xs[:0:-1], xs])
    full_n = np.concatenate([ns[:0:-1], ns])
    return PchipInterpolator(full_x, full_n, extrapolate=False)


def read_table(path) -> tuple:
    """Read a two-column ``x,n`` table with a header line."""
    text = Path(path).read_text().splitlines()
    if not text or text[0].replace(" ", "") != "x,n":
        raise ParameterDomainError(f"{path}: expected header line 'x,n'")
    data = np.loadtxt(text[1:], delimiter=",", ndmin=2)
    return tuple(data[:, 0]), tuple(data[:, 1])


def make_profile(kind: str, b: float = 1.0, table=None, ion_table=None) -> DensityProfile:
    """Construct a density profile of the given kind and width ratio."""
    if b <= 0:
        raise ParameterDomainError(f"b must be > 0, got {b}")
    if isinstance(table, (str, Path)):
        table = read_table(table)
    if isinstance(ion_table, (str, Path)):
        ion_table = read_table(ion_table)
    return DensityProfile(kind=kind.lower(), b=float(b), table=table, ion_table=ion_table)


def _quad_p0(profile, eps, x):
    def one(xv):
        if xv == 0.0:
            return 0.0
        val, _ = integrate.quad(
            lambda z: profile.n_i(z) - profile.n_e(z), 0.0, xv, epsabs=1e-14, epsrel=1e-12, limit=400
        )
        return val / eps

    x = np.asarray(x, dtype=float)
    return np.vectorize(one, otypes=[float])(x) if x.ndim else one(float(x))


def initial_field(profile: DensityProfile, params: PlasmaParams) -> Callable:
    """Return ``p0(x) = (1/eps) * integral_0^x (n_i - n_e) dz``."""
    eps, b = params.eps, profile.b

    if profile.kind == GAUSSIAN:

        def p0(x):
            x = profile.check_domain(x)
            return (erf(b * x) - erf(x)) / (2.0 * eps)

    elif profile.kind == LORENTZ:

        def p0(x):
            x = np.asarray(x, dtype=float)
            return (np.arctan(b * x) - np.arctan(x)) / (np.pi * eps)

    else:

        def p0(x):
            profile.check_domain(x)
            return _quad_p0(profile, eps, x)

    return p0


def quadrature_p0(profile: DensityProfile, params: PlasmaParams, x):
    """Adaptive quadrature of the defining integral of ``p0`` (any kind)."""
    return _quad_p0(profile, params.eps, x)


def xi_delta(profile: DensityProfile, params: PlasmaParams, p0=None):
    """Return evaluators ``(xi, dxi, delta)``.

    ``xi = -eps (n_e'/n_e + gamma^2 n_i'/n_i)`` and
    ``delta = -p0 - eps n_e'/n_e``.
    """
    eps, g2 = params.eps, params.gamma**2
    if p0 is None:
        p0 = initial_field(profile, params)

    def xi(x):
        return -eps * (profile.logd_e(x) + g2 * profile.logd_i(x))

    def dxi(x):
        return -eps * (profile.logd_e_prime(x) + g2 * profile.logd_i_prime(x))

    def delta(x):
        return -p0(x) - eps * profile.logd_e(x)

    return xi, dxi, delta


@dataclass(frozen=True)
class FieldFunctions:
    """Profile-derived scalar functions of ``x``.

    Every attribute is a pure callable.  ``omega`` is the local plasma
    frequency, ``omega**2 = n_i0``.
    """

    n_e0: Callable
    n_i0: Callable
    p0: Callable
    xi: Callable
    dxi: Callable
    delta: Callable
    omega: Callable
    profile: DensityProfile | None = None
    params: PlasmaParams | None = None

    @property
    def x_limit(self) -> float:
        return np.inf if self.profile is None else self.profile.x_limit


def field_functions(profile: DensityProfile, params: PlasmaParams) -> FieldFunctions:
    """Bundle all profile-derived evaluators for ``profile`` at ``params``."""
    if profile.b != params.b:
        params = params.replace(b=profile.b)
    p0 = initial_field(profile, params)
    xi, dxi, delta = xi_delta(profile, params, p0)

    def omega(x):
        return np.sqrt(profile.n_i(x))

    return FieldFunctions(
        n_e0=profile.n_e,
        n_i0=profile.n_i,
        p0=p0,
        xi=xi,
        dxi=dxi,
        delta=delta,
        omega=omega,
        profile=profile,
        params=params,
    )


@dataclass(frozen=True)
class MaxwellianInitial:
    """Initial distribution evaluators.

    ``f0`` is ``None`` when ``cold_ions`` is set: at ``gamma = 0`` the ion
    distribution is a delta function in ``w`` and has no pointwise value.
    """

    g0: Callable
    f0: Callable | None
    cold_ions: bool = False


def maxwellian_initial(profile: DensityProfile, params: PlasmaParams) -> MaxwellianInitial:
    """``g0 = n_e0(x) exp(-u^2/2)``, ``f0 = n_i0(x) exp(-w^2 / 2 gamma^2)``.

    No ``1/sqrt(2 pi)`` velocity normalisation is applied.
    """

    def g0(x, u):
        return profile.n_e(x) * np.exp(-0.5 * np.asarray(u, dtype=float) ** 2)

    if params.gamma == 0.0:
        return MaxwellianInitial(g0=g0, f0=None, cold_ions=True)

    two_g2 = 2.0 * params.gamma**2

    def f0(x, w):
        return profile.n_i(x) * np.exp(-np.asarray(w, dtype=float) ** 2 / two_g2)

    return MaxwellianInitial(g0=g0, f0=f0, cold_ions=False)

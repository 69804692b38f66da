import math

import numpy as np
import pytest

from kbmplasma.bvp import GridSpec, primed_state, solve_quasineutral_potential, xi_vs_p_prime
from kbmplasma.errors import ConvergenceError, DomainError
from kbmplasma.profiles import PlasmaParams, field_functions, make_profile


def _ones(x):
    return np.ones_like(np.asarray(x, dtype=float))


def test_uniform_density_gives_zero_potential(lorentz_fields, lorentz_params):
    sol = solve_quasineutral_potential(lorentz_fields, lorentz_params, GridSpec(10.0, 1000), n_i0=_ones)
    assert np.max(np.abs(sol.phi)) < 1e-10
    assert sol.iterations == 0


def test_manufactured_solution():
    # phi = a cos(pi x / L) solves eps^2 phi'' + n - exp(phi) = 0 for
    # n = exp(phi) + eps^2 (pi/L)^2 phi, with Neumann ends
    eps, L, a = 0.1, 5.0, 0.3
    params = PlasmaParams(eps=eps, mu=0.02, gamma=0.0)
    f = field_functions(make_profile("lorentz"), params)
    k = math.pi / L

    def phi(x):
        return a * np.cos(k * np.asarray(x))

    def n(x):
        return np.exp(phi(x)) + eps**2 * k**2 * phi(x)

    errs = []
    for N in (400, 800):
        sol = solve_quasineutral_potential(f, params, GridSpec(L, N), n_i0=n)
        errs.append(np.max(np.abs(sol.phi - phi(sol.x))))
    assert errs[1] < 1e-5
    assert 3.5 < errs[0] / errs[1] < 4.5  # second order


def test_lorentz_quasineutral_asymptotics():
    dev = []
    for eps in (0.1, 0.05):
        p = PlasmaParams(eps=eps, mu=0.02, gamma=0.001, b=1.0661)
        f = field_functions(make_profile("lorentz", 1.0661), p)
        sol = solve_quasineutral_potential(f, p)
        m = sol.x <= 5.0
        dev.append(np.max(np.abs(sol.phi[m] - np.log(f.n_i0(sol.x[m])))))
    assert 3.0 <= dev[0] / dev[1] <= 5.0


def test_residual_and_record(lorentz_fields, lorentz_params):
    sol = solve_quasineutral_potential(lorentz_fields, lorentz_params, GridSpec(None, 2000))
    rec = sol.record()
    assert rec["x_max"] == 40.0 and rec["residual_max"] < 1e-10
    assert rec["history"][-1] == sol.residual and sol.C == sol.phi[0]
    left, right = sol.end_slopes()
    assert abs(left) < 1e-3 and abs(right) < 1e-3


def test_convergence_error_with_no_iterations(lorentz_fields, lorentz_params):
    with pytest.raises(ConvergenceError) as info:
        solve_quasineutral_potential(lorentz_fields, lorentz_params, GridSpec(None, 2000), max_iter=0)
    assert info.value.last_iterate is not None


def test_primed_state(lorentz_fields, lorentz_params):
    sol = solve_quasineutral_potential(lorentz_fields, lorentz_params, GridSpec(None, 4000))
    ps = primed_state(sol, lorentz_fields, lorentz_params)
    s = np.array([0.3, 1.0, 2.0])
    # p' = -eps dphi/ds, compared with a central difference of the grid solution
    idx = np.searchsorted(sol.x, s)
    h = sol.x[1] - sol.x[0]
    fd = -lorentz_params.eps * (sol.phi[idx + 1] - sol.phi[idx - 1]) / (2 * h)
    np.testing.assert_allclose(ps.p_prime(sol.x[idx]), fd, rtol=1e-4)
    np.testing.assert_allclose(ps.p_prime(-s), -ps.p_prime(s), rtol=0, atol=0)
    xp = 1.0
    shift = xp + 0.1 * float(lorentz_fields.delta(xp)) / float(lorentz_fields.n_i0(xp))
    assert float(ps.shift(xp)) == pytest.approx(shift, rel=1e-14)
    assert float(ps.p_prime_label(xp)) == pytest.approx(float(ps.p_prime(shift)), rel=1e-14)
    with pytest.raises(DomainError):
        ps.p_prime(50.0)
    rows = xi_vs_p_prime(ps, [0.5, 1.0])
    assert len(rows) == 2 and rows[1][0] == 1.0
    # small-field regime: p' close to xi for the nearly quasi-neutral Lorentz case
    assert rows[1][3] == pytest.approx(rows[1][2], rel=0.1)


def test_cold_ion_primed_distribution(lorentz_fields, lorentz_params):
    cold = lorentz_params.replace(gamma=0.0)
    f = field_functions(make_profile("lorentz", 1.0661), cold)
    sol = solve_quasineutral_potential(f, cold, GridSpec(None, 1000))
    ps = primed_state(sol, f, cold)
    assert ps.g_prime(0.5, 0.0) > 0
    with pytest.raises(DomainError):
        ps.f_prime(0.5, 0.0)

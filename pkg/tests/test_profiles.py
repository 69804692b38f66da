import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from kbmplasma.errors import DomainError, ParameterDomainError
from kbmplasma.profiles import (
    PlasmaParams,
    field_functions,
    initial_field,
    make_profile,
    maxwellian_initial,
    quadrature_p0,
    read_table,
)


@pytest.mark.parametrize(
    "kw",
    [dict(eps=0.0, mu=0.1, gamma=0.1), dict(eps=1.0, mu=0.1, gamma=0.1), dict(eps=0.1, mu=1.0, gamma=0.1),
     dict(eps=0.1, mu=0.1, gamma=-1.0), dict(eps=0.1, mu=0.1, gamma=0.1, b=0.0)],
)
def test_params_domain(kw):
    with pytest.raises(ParameterDomainError):
        PlasmaParams(**kw)


def test_nu2_definition():
    p = PlasmaParams(eps=0.1, mu=0.02, gamma=0.1, b=1.0)
    assert p.nu2 == pytest.approx(2 * 0.01 * 1.01, rel=1e-15)
    q = p.replace(b=2.0)
    assert q.nu2 == pytest.approx(2 * 0.01 * (1 + 4 * 0.01), rel=1e-15)


@pytest.mark.parametrize("kind", ["gaussian", "lorentz"])
@pytest.mark.parametrize("b", [1.0, 1.0661, 0.8])
def test_densities_normalised_and_even(kind, b):
    prof = make_profile(kind, b)
    for fn in (prof.n_e, prof.n_i):
        # Lorentz tails are integrated to infinity; Gaussians are negligible beyond |x| = 20
        lim = np.inf if kind == "lorentz" else 20.0
        total, _ = integrate.quad(fn, -lim, lim)
        assert total == pytest.approx(1.0, rel=1e-9)
        x = np.linspace(0.1, 5, 9)
        np.testing.assert_allclose(fn(x), fn(-x), rtol=0, atol=0)


def test_closed_forms_against_literal_expressions():
    x = np.linspace(-3, 3, 13)
    g = make_profile("gaussian", 1.01)
    np.testing.assert_allclose(g.n_i(x), 1.01 * np.exp(-(1.01 * x) ** 2) / math.sqrt(math.pi), rtol=1e-14)
    lo = make_profile("lorentz", 1.0661)
    np.testing.assert_allclose(lo.n_i(x), 1.0661 / (math.pi * (1 + (1.0661 * x) ** 2)), rtol=1e-14)


@pytest.mark.parametrize("kind,b", [("gaussian", 1.01), ("lorentz", 1.0661), ("gaussian", 0.7)])
def test_initial_field_matches_quadrature(kind, b):
    params = PlasmaParams(eps=0.1, mu=0.02, gamma=0.1, b=b)
    prof = make_profile(kind, b)
    x = np.array([-2.0, -0.3, 0.0, 0.5, 1.7, 4.0])
    expected = np.array([integrate.quad(lambda z: prof.n_i(z) - prof.n_e(z), 0, xv, epsabs=1e-14, epsrel=1e-13)[0] / 0.1 for xv in x])
    np.testing.assert_allclose(initial_field(prof, params)(x), expected, rtol=1e-10, atol=1e-14)
    np.testing.assert_allclose(quadrature_p0(prof, params, x), expected, rtol=1e-10, atol=1e-14)


def test_xi_delta_gaussian_closed_form():
    params = PlasmaParams(eps=0.1, mu=0.02, gamma=0.1, b=1.01)
    f = field_functions(make_profile("gaussian", 1.01), params)
    x = np.linspace(-2, 2, 11)
    np.testing.assert_allclose(f.xi(x), 2 * 0.1 * x * (1 + 1.01**2 * 0.01), rtol=1e-13, atol=1e-16)
    np.testing.assert_allclose(f.delta(x), -f.p0(x) + 2 * 0.1 * x, rtol=1e-13, atol=1e-16)
    np.testing.assert_allclose(f.omega(x) ** 2, f.n_i0(x), rtol=1e-14)


def test_xi_lorentz_closed_form(lorentz_fields):
    x = np.linspace(-3, 3, 13)
    b, g = 1.0661, 0.001
    expected = 2 * 0.1 * x * (1 / (1 + x * x) + g * g * b * b / (1 + b * b * x * x))
    np.testing.assert_allclose(lorentz_fields.xi(x), expected, rtol=1e-13, atol=1e-17)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 4.0), st.sampled_from(["gaussian", "lorentz"]))
def test_dxi_is_derivative_of_xi(x, kind):
    params = PlasmaParams(eps=0.1, mu=0.02, gamma=0.3, b=1.2)
    f = field_functions(make_profile(kind, 1.2), params)
    h = 1e-5
    fd = (f.xi(x + h) - f.xi(x - h)) / (2 * h)
    assert float(f.dxi(x)) == pytest.approx(float(fd), rel=1e-6, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 5.0))
def test_fields_parity(x):
    params = PlasmaParams(eps=0.1, mu=0.02, gamma=0.1, b=1.05)
    f = field_functions(make_profile("lorentz", 1.05), params)
    for odd in (f.p0, f.xi, f.delta):
        assert float(odd(-x)) == pytest.approx(-float(odd(x)), abs=1e-15)
    for even in (f.n_e0, f.n_i0, f.dxi, f.omega):
        assert float(even(-x)) == pytest.approx(float(even(x)), abs=1e-15)


def test_gaussian_cap_raises():
    prof = make_profile("gaussian", 1.0)
    with pytest.raises(DomainError):
        prof.n_e(30.0)


def test_tabulated_profile_reproduces_gaussian(tmp_path):
    xs = np.linspace(0, 6, 601)
    path = tmp_path / "n.csv"
    path.write_text("x,n\n" + "\n".join(f"{float(a)!r},{math.exp(-a * a) / math.sqrt(math.pi)!r}" for a in xs))
    table = read_table(path)
    prof = make_profile("tabulated", 1.0, table=table)
    x = np.array([-1.3, 0.0, 0.4, 2.2])
    np.testing.assert_allclose(prof.n_e(x), np.exp(-x * x) / math.sqrt(math.pi), rtol=2e-5)
    with pytest.raises(DomainError):
        prof.n_e(7.0)


@pytest.mark.parametrize(
    "xs,ns", [((0, 1, 1), (1, 1, 1)), ((0, 1, 2), (1, -1, 1)), ((1, 2, 3), (1, 1, 1)), ((0, 1), (1, 1))]
)
def test_tabulated_validation(xs, ns):
    with pytest.raises(ParameterDomainError):
        make_profile("tabulated", table=(xs, ns))


def test_maxwellian_normalisation_and_cold_ions():
    params = PlasmaParams(eps=0.1, mu=0.02, gamma=0.1)
    prof = make_profile("gaussian")
    mx = maxwellian_initial(prof, params)
    # no 1/sqrt(2 pi) velocity factor: the u-integral is sqrt(2 pi) n_e
    val, _ = integrate.quad(lambda u: mx.g0(0.3, u), -np.inf, np.inf)
    assert val == pytest.approx(math.sqrt(2 * math.pi) * prof.n_e(0.3), rel=1e-10)
    val, _ = integrate.quad(lambda w: mx.f0(0.3, w), -np.inf, np.inf)
    assert val == pytest.approx(math.sqrt(2 * math.pi) * 0.1 * prof.n_i(0.3), rel=1e-10)
    cold = maxwellian_initial(prof, params.replace(gamma=0.0))
    assert cold.cold_ions and cold.f0 is None

import math

import numpy as np
import pytest

from kbmplasma.lieflow import PhasePoint
from kbmplasma.profiles import PlasmaParams, field_functions, make_profile
from kbmplasma.symmetry import (
    Generator,
    GeneratorCoordinates,
    approximate_generator,
    determining_residual_fast,
    determining_residual_slow,
    electron_plasma_split,
    invariant_solution_state,
    quasineutral_split,
    residual_scaling_study,
)

PT = PhasePoint(t=1.3, tau=0.7, x=0.8, u=0.4, w=0.2, p=0.1)


def test_zero_generator_has_zero_residual(gauss_params):
    g = Generator()
    assert determining_residual_fast(g, PT, gauss_params).fast_norm == 0.0
    assert determining_residual_slow(g, PT, gauss_params).slow_norm == 0.0


@pytest.mark.parametrize("delta,omega", [(0.3, 0.8), (-0.05, 1.4)])
def test_electron_plasma_generator_is_exact(gauss_params, delta, omega):
    g = electron_plasma_split(delta, omega, gauss_params.eps)
    for pt in (PT, PhasePoint(t=4.0, tau=2.0, x=-1.1, u=-0.7, w=0.0, p=0.3)):
        assert determining_residual_fast(g, pt, gauss_params).fast_norm < 1e-9


@pytest.mark.parametrize("beta", [0.2, -1.0])
def test_quasineutral_generator_is_exact(gauss_params, beta):
    g = quasineutral_split(beta, gauss_params)
    assert determining_residual_slow(g, PT, gauss_params).slow_norm < 1e-9


def test_perturbed_exact_generator_is_detected(gauss_params):
    g = electron_plasma_split(0.3, 0.8, gauss_params.eps)
    bad = Generator(fast=lambda pt: g.fast(pt) + GeneratorCoordinates(xi3=1e-3))
    assert determining_residual_fast(bad, PT, gauss_params).fast_norm > 1e-5


def test_coordinates_algebra():
    a = GeneratorCoordinates(xi1=1.0, eta2=2.0)
    b = GeneratorCoordinates(xi1=0.5, xi3=1.0)
    c = a + b
    np.testing.assert_array_equal(c.as_array()[:3], [1.5, 0.0, 1.0])


def test_approximate_generator_finite(gauss_fields, gauss_params):
    c = approximate_generator(PT, gauss_fields, gauss_params)
    assert np.all(np.isfinite(c.as_array()))


@pytest.mark.parametrize("kind", ["gaussian", "lorentz"])
def test_residual_scaling(kind):
    p = PlasmaParams(eps=0.1, mu=math.sqrt(1 / 2000), gamma=0.1, b=1.0)
    st = residual_scaling_study(lambda q: field_functions(make_profile(kind, 1.0), q), p, 20, seed=1)
    assert st.fast_median <= 0.35 and st.slow_median <= 0.35
    assert len(st.rows) == 20 * (2 * 2 + 2 * 4)


def test_invariant_solution_state(gauss_fields, gauss_params):
    pt = invariant_solution_state(0.0, 3.0, 1.0, 0.0, 0.0, gauss_fields, gauss_params)
    assert pt.x == pytest.approx(math.sqrt(1 + gauss_params.nu2 * 9), rel=1e-10)

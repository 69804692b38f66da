import math

import pytest

from kbmplasma.profiles import PlasmaParams, field_functions, make_profile

MU = math.sqrt(1.0 / 2000.0)


@pytest.fixture
def gauss_params():
    return PlasmaParams(eps=0.1, mu=MU, gamma=0.1, b=1.0)


@pytest.fixture
def gauss_fields(gauss_params):
    return field_functions(make_profile("gaussian", 1.0), gauss_params)


@pytest.fixture
def lorentz_params():
    return PlasmaParams(eps=0.1, mu=MU, gamma=0.001, b=1.0661)


@pytest.fixture
def lorentz_fields(lorentz_params):
    return field_functions(make_profile("lorentz", 1.0661), lorentz_params)


@pytest.fixture(scope="session")
def repo_root():
    from pathlib import Path

    return Path(__file__).resolve().parent.parent

import json

import numpy as np

from kbmplasma.config import RunConfig
from kbmplasma.profiles import PlasmaParams
from kbmplasma.verify import closed_form_grid, diagnostic_errors, run_verify, slow_map_errors


def test_closed_form_grid_size():
    g = closed_form_grid(200)
    assert len(g) >= 200 and min(t for _, t in g) == 0.0 and max(x for x, _ in g) == 3.0


def test_slow_map_and_diagnostics_errors_small():
    p = PlasmaParams(eps=0.1, mu=0.02, gamma=0.1)
    assert np.max(slow_map_errors(p, 50)) < 1e-6
    ev, et4, et2 = diagnostic_errors(p, 50)
    assert np.max(ev) < 1e-5 and np.max(et2) < 1e-5
    assert np.max(et4) > 0.1  # the S^-4 form differs from the computed temperature


def test_report_passes_and_is_written(tmp_path):
    cfg = RunConfig.model_validate({"verify": {"n_orbits": 4, "n_points": 10, "grid_points": 36}})
    rep = run_verify(cfg, tmp_path)
    assert rep["passed"], [c for c in rep["checks"] if not c["passed"]]
    on_disk = json.loads((tmp_path / "verify_report.json").read_text())
    assert on_disk["seed"] == 0 and len(on_disk["checks"]) == 8


def test_tightened_tolerance_fails_named_check(tmp_path):
    cfg = RunConfig.model_validate(
        {"verify": {"n_orbits": 4, "n_points": 10, "grid_points": 36}, "tolerances": {"fast_drift": 1e-18}}
    )
    rep = run_verify(cfg, tmp_path)
    failed = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert not rep["passed"] and failed == ["fast_invariant_drift"]

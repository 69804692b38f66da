import json

import pytest
from pydantic import ValidationError

from kbmplasma.cli import main
from kbmplasma.config import RunConfig, config_dict, load_config, loads_config, resolved_toml
from kbmplasma.figures import read_csv


def test_defaults_and_round_trip():
    cfg = RunConfig()
    again = loads_config(resolved_toml(cfg))
    assert config_dict(again) == config_dict(cfg)


@pytest.mark.parametrize(
    "text",
    [
        "bogus = 1",
        "[params]\nepsilon = 0.1",
        "schema_version = 2",
        "[params]\neps = -0.1",
        "[figures.fig9]\ntaus=[0.0]",
        "scenario = 'dance'",
    ],
)
def test_invalid_configs_rejected(text):
    with pytest.raises(ValidationError):
        loads_config(text)


def test_shipped_configs_load(repo_root):
    for name in ("default.toml", "figures.toml"):
        load_config(repo_root / "configs" / name)


def test_cli_profiles_writes_resolved_config(tmp_path):
    assert main(["profiles", "--out", str(tmp_path), "--x", "-1", "1", "5", "--profile", "lorentz"]) == 0
    resolved = load_config(tmp_path / "resolved_config.toml")
    assert resolved.profile.kind == "lorentz" and resolved.scenario == "profiles"
    data = read_csv(tmp_path / "profiles.csv")
    assert list(data["x"]) == [-1.0, -0.5, 0.0, 0.5, 1.0]


def test_cli_resolved_config_reproduces_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["slow", "--out", str(a), "--taus", "0", "3", "--x", "0.1", "2", "7", "--gamma", "0.2"]) == 0
    assert main(["slow", "--config", str(a / "resolved_config.toml"), "--out", str(b)]) == 0
    assert (a / "slow.csv").read_bytes() == (b / "slow.csv").read_bytes()


def test_cli_fast_and_bvp(tmp_path):
    assert main(["fast", "--out", str(tmp_path), "--taus", "2", "--x", "0.2", "1.0", "5", "--profile", "lorentz", "--b", "1.0661", "--gamma", "0.001"]) == 0
    assert len(read_csv(tmp_path / "fast.csv")["x_bar"]) == 5
    assert main(["bvp", "--out", str(tmp_path), "--profile", "lorentz", "--grid-n", "1000"]) == 0
    rec = json.loads((tmp_path / "bvp_convergence.json").read_text())
    assert rec["residual_max"] < 1e-10


def test_cli_domain_error_exit_code(tmp_path, capsys):
    assert main(["fast", "--out", str(tmp_path), "--taus", "2", "--x", "-1", "1", "3"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["profiles", "--out", str(tmp_path), "--eps", "-1"]) == 2


def test_cli_unknown_config_key_exit_code(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[slow]\nunknown = 3\n")
    assert main(["slow", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_cli_verify_symmetry(tmp_path):
    assert main(["verify", "symmetry", "--out", str(tmp_path), "--seed", "4"]) == 0
    lines = (tmp_path / "symmetry_residuals.csv").read_text().splitlines()
    assert lines[0] == "point,equation,residual,eps,mu" and len(lines) > 1


def test_cli_pic_and_resume(tmp_path):
    cfg = tmp_path / "pic.toml"
    cfg.write_text(
        "[pic]\nx_max = 60.0\nn_cells = 2400\nn_particles = 20000\ntau_end = 0.1\nn_diag = 2\ncheckpoint_every = 10\n"
    )
    assert main(["pic", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "pic_compare.csv").exists() and (tmp_path / "pic.ckpt").exists()
    assert main(["pic", "--config", str(cfg), "--out", str(tmp_path / "r"), "--resume", str(tmp_path / "pic.ckpt")]) == 0

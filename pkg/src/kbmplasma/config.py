"""Run configuration: a versioned TOML schema validated by pydantic.

Every block rejects unknown keys.  :func:`resolved_toml` renders the fully
defaulted configuration; re-running it reproduces the original outputs.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import tomli_w
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .errors import ParameterDomainError
from .profiles import DensityProfile, PlasmaParams, make_profile, read_table

SCHEMA_VERSION = 1
SCENARIOS = ("profiles", "slow", "fast", "bvp", "pic", "verify", "figures")
FIGURE_IDS = tuple(range(1, 8))


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class ParamsBlock(_Block):
    eps: float = 0.1
    mu: float = math.sqrt(1.0 / 2000.0)
    gamma: float = 0.1
    b: float = 1.0
    Ti0: float = 1.0

    def build(self) -> PlasmaParams:
        return PlasmaParams(eps=self.eps, mu=self.mu, gamma=self.gamma, b=self.b, Ti0=self.Ti0)


class ProfileBlock(_Block):
    kind: Literal["gaussian", "lorentz", "tabulated"] = "gaussian"
    table: Optional[str] = None
    ion_table: Optional[str] = None

    def build(self, b: float, base: Path | None = None) -> DensityProfile:
        def load(p):
            if p is None:
                return None
            path = Path(p)
            if base is not None and not path.is_absolute():
                path = base / path
            return read_table(path)

        return make_profile(self.kind, b=b, table=load(self.table), ion_table=load(self.ion_table))


class GridBlock(_Block):
    start: float
    stop: float
    num: int = Field(gt=1)

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


class ToleranceBlock(_Block):
    slow_map: float = 1e-13
    lie: float = 1e-10
    bvp: float = 1e-10
    closed_form: float = 1e-6
    diagnostics: float = 1e-5
    fast_drift: float = 1e-8
    slow_drift: float = 1e-7
    residual_ratio: float = 0.35
    bvp_trivial: float = 1e-10
    points_per_period: int = 16


class SlowBlock(_Block):
    taus: list[float] = [0.0, 2.0, 8.0, 12.0, 18.0]
    x: GridBlock = GridBlock(start=0.1, stop=3.0, num=30)
    coordinate: Literal["label", "lab"] = "label"
    primed: Literal["xi", "bvp"] = "xi"


class FastBlock(_Block):
    taus: list[float] = [4.0, 10.0, 18.0]
    x: GridBlock = GridBlock(start=0.02, stop=5.0, num=250)
    delta_mode: Literal["label-frozen", "i3-scaled"] = "label-frozen"
    points_per_period: int = 16


class BvpBlock(_Block):
    x_max: Optional[float] = None
    n: int = 8000
    max_iter: int = 60


class PicBlock(_Block):
    x_max: float = 120.0
    n_cells: int = 4800
    n_particles: int = 100_000
    dt: float = 0.1
    tau_end: float = 4.0
    n_diag: int = 8
    checkpoint_every: int = 0


class VerifyBlock(_Block):
    n_orbits: int = 20
    n_points: int = 50
    a_end: float = 10.0
    grid_points: int = 200


class FigureBlock(_Block):
    params: ParamsBlock
    profile: ProfileBlock
    taus: list[float]
    x: GridBlock
    delta_mode: Literal["label-frozen", "i3-scaled"] = "label-frozen"
    points_per_period: int = 16


class RunConfig(_Block):
    schema_version: int = SCHEMA_VERSION
    scenario: Literal["profiles", "slow", "fast", "bvp", "pic", "verify", "figures"] = "slow"
    seed: int = 0
    out: str = "out"
    params: ParamsBlock = ParamsBlock()
    profile: ProfileBlock = ProfileBlock()
    tolerances: ToleranceBlock = ToleranceBlock()
    slow: SlowBlock = SlowBlock()
    fast: FastBlock = FastBlock()
    bvp: BvpBlock = BvpBlock()
    pic: PicBlock = PicBlock()
    verify: VerifyBlock = VerifyBlock()
    figures: dict[str, FigureBlock] = {}

    @field_validator("schema_version")
    @classmethod
    def _version(cls, v):
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v} (expected {SCHEMA_VERSION})")
        return v

    @field_validator("figures")
    @classmethod
    def _figure_keys(cls, v):
        for key in v:
            if key not in {f"fig{i}" for i in FIGURE_IDS}:
                raise ValueError(f"unknown figure id {key!r}")
        return v

    @model_validator(mode="after")
    def _physics(self):
        try:
            self.params.build()
        except ParameterDomainError as exc:
            raise ValueError(str(exc)) from None
        return self

    def plasma(self) -> PlasmaParams:
        return self.params.build()

    def density(self, base: Path | None = None) -> DensityProfile:
        return self.profile.build(self.params.b, base)


def _strip_none(obj):
    if isinstance(obj, dict):
        return {k: _strip_none(v) for k, v in obj.items() if v is not None}
    if isinstance(obj, list):
        return [_strip_none(v) for v in obj]
    return obj


def load_config(path) -> RunConfig:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return RunConfig.model_validate(data)


def loads_config(text: str) -> RunConfig:
    return RunConfig.model_validate(tomllib.loads(text))


def config_dict(cfg: RunConfig) -> dict:
    return _strip_none(cfg.model_dump(mode="python"))


def resolved_toml(cfg: RunConfig) -> str:
    """Fully defaulted configuration as TOML."""
    return tomli_w.dumps(config_dict(cfg))


def write_resolved(cfg: RunConfig, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "resolved_config.toml"
    path.write_text(resolved_toml(cfg), encoding="utf-8", newline="\n")
    return path

"""Run configuration: one flat JSON object, overridable from the command line."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .surface import SurfaceParams

_CAVATAPPI = SurfaceParams.cavatappi()


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; unset fields take the cavatappi defaults."""

    command: str = "geodesic"
    # surface
    a: float = _CAVATAPPI.a
    b: float = _CAVATAPPI.b
    c: float = _CAVATAPPI.c
    d: float = _CAVATAPPI.d
    m: int = _CAVATAPPI.m
    legendre_exact: bool = False
    # launch
    r0: float = 0.0
    phi0: float = 0.0
    beta: float = 0.0
    energy: float = 0.5
    ur0: float | None = None
    uphi0: float | None = None
    lambda_end: float = 100.0
    rtol: float = 1e-10
    atol: float = 1e-12
    # potential / curvature profiles
    ell: float = 1.0
    n_grid: int = 1025
    # mesh
    n_chi: int = 64
    n_phi: int = 64
    revolutions: float = 2.5
    # sweep
    beta_min: float = math.pi / 128
    beta_max: float = math.pi / 2
    n_beta: int = 64
    sweep_mode: str = "energy"
    workers: int | None = None
    # area
    phi_span: float = 2.0 * math.pi
    # output
    out: str | None = None

    def params(self) -> SurfaceParams:
        c = 5.0 / (2.0 * math.pi) if self.legendre_exact else self.c
        return SurfaceParams(self.a, self.b, c, self.d, self.m)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_json(Path(path).read_text())

    def dump(self, path) -> None:
        Path(path).write_text(self.to_json())

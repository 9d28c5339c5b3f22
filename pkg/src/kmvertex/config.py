"""Run configuration with layered sources: defaults < config file < environment < flags."""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .report import FORMATS
from .roots import RootSystemError, parse_algebra

ENV_PREFIX = "KMVERTEX_"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    algebra: str = "A1"
    level: int = 4
    modes: int = 2
    sites: int = 3
    lmax: int = 3
    grid: int = 0  # sphere nodes; 0 means lmax + 2
    window: int = 3  # cocycle window bound
    momentum_window: int = 2
    tol: float = 1e-10
    sphere_tol: float = 1e-8
    eps: str = "1,0.1,0.01"
    surface: str = "torus"
    format: str = "table"
    out: str = ""
    timestamp: bool = True

    @property
    def grid_size(self) -> int:
        return self.grid or self.lmax + 2

    @property
    def eps_values(self) -> tuple[float, ...]:
        return tuple(float(x) for x in self.eps.split(",") if x.strip())

    def validate(self) -> "RunConfig":
        try:
            parse_algebra(self.algebra)
        except RootSystemError as exc:
            raise ConfigError(str(exc)) from exc
        for name in ("level", "modes", "sites", "lmax", "window", "momentum_window"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.grid and self.grid < self.lmax + 2:
            raise ConfigError(f"sphere grid needs at least lmax + 2 = {self.lmax + 2} nodes")
        if self.modes > self.level:
            raise ConfigError(f"modes ({self.modes}) may not exceed level ({self.level})")
        if not (self.tol > 0 and self.sphere_tol > 0):
            raise ConfigError("tolerances must be positive")
        try:
            vals = self.eps_values
        except ValueError as exc:
            raise ConfigError(f"cannot parse eps list {self.eps!r}") from exc
        if not vals or any(v <= 0 for v in vals):
            raise ConfigError("regulators must be positive")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.surface not in ("torus", "sphere"):
            raise ConfigError(f"unknown surface {self.surface!r}")
        return self

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")
        return d


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, raw: str):
    if name not in _TYPES:
        raise ConfigError(f"unknown configuration key {name!r}")
    kind = _TYPES[name]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value {raw!r} for {name}") from exc
    return raw.strip()


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _coerce(key, val)
    return out


def from_env(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for key, val in environ.items():
        if key.startswith(ENV_PREFIX):
            name = key[len(ENV_PREFIX):].lower()
            if name in _TYPES:
                out[name] = _coerce(name, val)
    return out


def load(config_path: str | None = None, flags: dict | None = None, environ=None) -> RunConfig:
    values: dict = {}
    if config_path:
        p = Path(config_path)
        if not p.is_file():
            raise ConfigError(f"config file {config_path} not found")
        values.update(parse_config_text(p.read_text()))
    values.update(from_env(environ))
    values.update({k: v for k, v in (flags or {}).items() if v is not None})
    return RunConfig(**values).validate()

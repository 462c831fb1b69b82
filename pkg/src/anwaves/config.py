"""Run configuration: schema, file parsing, flag precedence, validation.

Config files are flat ``key = value`` text ('#' comments allowed);
command-line flags override file values.  Unknown keys and type
mismatches are hard errors, and every parameter is validated against the
preconditions of the module that consumes it before any compute starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

__all__ = ["RunConfig", "ConfigError", "parse_config", "build_config"]


class ConfigError(ValueError):
    """Invalid configuration; message names the offending key."""


def _parse_degrees(text: str) -> list:
    return [int(tok) for tok in str(text).replace(" ", "").split(",") if tok != ""]


def _parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    """Parameters of one scenario run; defaults match the desk-scale checks."""

    scenario: str = ""
    degrees: list = field(default_factory=lambda: [1])
    # evolution-grid parameters
    r_max: float = 25.0
    nodes: int = 1251
    cfl: float = 0.5
    t_final: float = 20.0
    boundary: str = "padding"
    sample_every: int = 10
    # perturbation family
    eps: float = 1e-2
    r0: float = 1.0
    sigma: float = 0.25
    r_local: float = 2.0
    # channel experiment
    a: float = 2.0
    t_channel: float = 8.0
    ensemble: int = 50
    # residual sampling
    samples: int = 100
    # bookkeeping
    out_dir: str = "out"
    seed: int = 20250810
    emit_csv: bool = True
    emit_json: bool = True
    emit_snapshots: bool = False

    def validate(self) -> "RunConfig":
        if any(n < 0 for n in self.degrees):
            raise ConfigError(f"degrees must be nonnegative, got {self.degrees} (key: degrees)")
        if self.r_max <= 0:
            raise ConfigError("r_max must be positive (key: r_max)")
        if self.nodes < 16:
            raise ConfigError("nodes must be at least 16 (key: nodes)")
        if not 0 < self.cfl <= 0.5:
            raise ConfigError("cfl must lie in (0, 0.5] (key: cfl)")
        if self.t_final <= 0:
            raise ConfigError("t_final must be positive (key: t_final)")
        if self.boundary not in ("padding", "sponge"):
            raise ConfigError(f"unknown boundary {self.boundary!r} (key: boundary)")
        if self.sample_every < 1:
            raise ConfigError("sample_every must be >= 1 (key: sample_every)")
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive (key: sigma)")
        if self.a <= 0:
            raise ConfigError("a must be positive (key: a)")
        if self.t_channel <= 0:
            raise ConfigError("t_channel must be positive (key: t_channel)")
        if self.ensemble < 1:
            raise ConfigError("ensemble must be >= 1 (key: ensemble)")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1 (key: samples)")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative (key: seed)")
        return self

    def echo(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_PARSERS = {
    "scenario": str,
    "degrees": _parse_degrees,
    "r_max": float,
    "nodes": int,
    "cfl": float,
    "t_final": float,
    "boundary": str,
    "sample_every": int,
    "eps": float,
    "r0": float,
    "sigma": float,
    "r_local": float,
    "a": float,
    "t_channel": float,
    "ensemble": int,
    "samples": int,
    "out_dir": str,
    "seed": int,
    "emit_csv": _parse_bool,
    "emit_json": _parse_bool,
    "emit_snapshots": _parse_bool,
}


def parse_config(path: str | Path) -> dict:
    """Read a flat ``key = value`` file into a dict of typed values."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](val)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    return values


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults <- config file <- CLI flags, then validate."""
    cfg = RunConfig()
    for source in (file_values or {}, overrides or {}):
        for key, val in source.items():
            if val is None:
                continue
            if key not in _PARSERS:
                raise ConfigError(f"unknown key {key!r}")
            setattr(cfg, key, _PARSERS[key](val) if not isinstance(val, (list, bool)) else val)
    return cfg.validate()

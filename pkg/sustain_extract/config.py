"""Settings (YAML) and run configuration (JSON) with Pydantic validation."""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from sustain_extract.core.enums import MarginMode
from sustain_extract.core.errors import ConfigError
from sustain_extract.kernel.oracle import OracleConfig
from sustain_extract.kernel.solver import MAX_RESOURCES, SolverConfig
from sustain_extract.models.demand import DemandSystem
from sustain_extract.models.economy import EconomySpec
from sustain_extract.models.resource import ResourceSpec

THREADS_ENV = "SUSTAIN_EXTRACT_THREADS"


def _default_data_dir() -> Path:
    """Return the default data directory: ~/.sustain-extract"""
    return Path.home() / ".sustain-extract"


# ── Application settings ──


class LogConfig(BaseModel):
    dir: str = str(_default_data_dir() / "logs")
    level: str = "INFO"


class SweepSettings(BaseModel):
    threads: Optional[int] = Field(default=None, ge=1)   # None: one per CPU


class OracleSettings(BaseModel):
    max_gap: float = Field(default=0.02, ge=0)   # relative C̄ gap accepted by oracle-check


class AppSettings(BaseModel):
    log: LogConfig = Field(default_factory=LogConfig)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    oracle: OracleSettings = Field(default_factory=OracleSettings)

    def sweep_threads(self) -> int:
        """Thread cap for sweeps; the environment variable wins over the file."""
        raw = os.environ.get(THREADS_ENV)
        if raw:
            try:
                value = int(raw)
            except ValueError as exc:
                raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
            if value < 1:
                raise ConfigError(f"{THREADS_ENV} must be >= 1, got {value}")
            return value
        return self.sweep.threads or os.cpu_count() or 1


_config: AppSettings | None = None


def load_config(config_path: str | Path | None = None) -> AppSettings:
    """Load settings from YAML. Falls back to defaults if no file is found."""
    global _config
    if _config is not None:
        return _config

    paths_to_try = []
    if config_path:
        paths_to_try.append(Path(config_path))
    paths_to_try.extend([
        Path("settings.yaml"),
        Path("settings.yml"),
        _default_data_dir() / "settings.yaml",
        _default_data_dir() / "settings.yml",
    ])

    for p in paths_to_try:
        if p.exists():
            with open(p) as f:
                data = yaml.safe_load(f) or {}
            try:
                _config = AppSettings(**data)
            except ValidationError as exc:
                raise ConfigError(f"invalid settings file {p}: {exc}") from exc
            return _config

    _config = AppSettings()
    return _config


def get_config() -> AppSettings:
    """Get the current settings, loading defaults if needed."""
    if _config is None:
        return load_config()
    return _config


def reset_config() -> None:
    """Reset settings (for testing)."""
    global _config
    _config = None


# ── Run configuration ──

_AXIS = re.compile(
    r"^(interest_rate|capital0|dt|price_impact_scale"
    r"|stock0\[\d+\]|scale\[\d+\]|intercepts\[\d+\]"
    r"|exponents\[\d+\]\[\d+\]|slopes\[\d+\]\[\d+\])$"
)


class AuditOptions(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    margin_mode: MarginMode = MarginMode.INVERSE


class SweepAxis(BaseModel):
    """One swept scalar, e.g. ``interest_rate`` or ``exponents[0][0]``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    parameter: str
    values: List[float] = Field(min_length=1)

    @field_validator("parameter")
    @classmethod
    def _check_parameter(cls, v: str) -> str:
        if not _AXIS.match(v):
            raise ValueError(f"unknown sweep parameter {v!r}")
        return v


class SweepConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    axes: List[SweepAxis] = Field(min_length=1)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    economy: EconomySpec
    resources: List[ResourceSpec] = Field(min_length=1)
    demand: DemandSystem
    solver: SolverConfig = Field(default_factory=SolverConfig)
    oracle: Optional[OracleConfig] = None
    sweep: Optional[SweepConfig] = None
    audit: AuditOptions = Field(default_factory=AuditOptions)
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _check_sizes(self) -> "RunConfig":
        n = len(self.resources)
        if n != self.demand.n:
            raise ValueError(f"{n} resources but demand system has n={self.demand.n}")
        if n > MAX_RESOURCES:
            raise ValueError(f"at most {MAX_RESOURCES} resources are supported, got {n}")
        targets = self.economy.terminal.targets(n)
        if len(targets) != n:
            raise ValueError(f"{len(targets)} target stocks for {n} resources")
        if self.oracle is not None and self.oracle.bounds is not None:
            if len(self.oracle.bounds) != n:
                raise ValueError(f"{len(self.oracle.bounds)} oracle bounds for {n} resources")
        return self


def load_run_config(path: str | Path) -> RunConfig:
    """Read and validate a run configuration; any failure is a ConfigError."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return RunConfig.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"invalid run config {path}: {exc}") from exc

"""Shared test fixtures."""

from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

from sustain_extract.config import RunConfig, load_config, reset_config
from sustain_extract.logging_config import teardown_logging
from sustain_extract.models import DemandSystem, EconomySpec, ResourceSpec

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Point settings and logs into tmp_path for each test."""
    reset_config()
    monkeypatch.delenv("SUSTAIN_EXTRACT_THREADS", raising=False)

    settings_file = tmp_path / "settings.yaml"
    settings_file.write_text(
        f"log:\n  dir: {tmp_path / 'logs'}\n  level: DEBUG\n"
        f"sweep:\n  threads: 2\n"
        f"oracle:\n  max_gap: 0.02\n"
    )

    cwd = os.getcwd()
    os.chdir(tmp_path)
    load_config(settings_file)
    yield tmp_path

    teardown_logging()
    os.chdir(cwd)
    reset_config()


def load_fixture(name: str) -> dict:
    return json.loads((FIXTURES / name).read_text())


def single_resource(stock0: float = 100.0, **growth) -> list[ResourceSpec]:
    return [ResourceSpec(name="oil", stock0=stock0, growth=growth or {"kind": "zero"})]


def isoelastic(*own: float, cross: list[list[float]] | None = None, scale: float = 1.0, s: float = 1.0):
    n = len(cross) if cross else len(own)
    exponents = cross or [[own[j] if j == k else 0.0 for k in range(n)] for j in range(n)]
    return DemandSystem(
        kind="isoelastic", scale=[scale] * n, exponents=exponents, price_impact_scale=s
    )


def linear(intercepts: list[float], slopes: list[list[float]], s: float = 1.0) -> DemandSystem:
    return DemandSystem(kind="linear", intercepts=intercepts, slopes=slopes, price_impact_scale=s)


def economy(horizon: int = 20, rate=0.05, capital0: float = 0.0, **terminal) -> EconomySpec:
    return EconomySpec(
        horizon_steps=horizon,
        dt=1.0,
        interest_rate=rate,
        capital0=capital0,
        terminal=terminal or {"kind": "exhaust", "tolerance": 1e-8},
    )


@pytest.fixture
def benchmark_run() -> RunConfig:
    """Single nonrenewable, isoelastic eta = -2, r = 0.05, 20 steps, exhaust."""
    return RunConfig(
        economy=economy(),
        resources=single_resource(),
        demand=isoelastic(-2.0),
    )


@pytest.fixture
def benchmark_config_file(tmp_path, benchmark_run) -> Path:
    path = tmp_path / "run.json"
    path.write_text(benchmark_run.model_dump_json(exclude_none=True))
    return path


@pytest.fixture
def oracle_fixture() -> dict:
    return load_fixture("oracle_t3.json")

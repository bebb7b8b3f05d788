"""CLI entry point for sustain-extract."""

from __future__ import annotations

import json
import logging
import shutil
import sys
from functools import wraps
from pathlib import Path
from typing import Callable, Optional

import click

from sustain_extract import __version__
from sustain_extract.core.enums import ExitCode
from sustain_extract.core.errors import SustainExtractError

logger = logging.getLogger(__name__)

BANNER = """\
╔══════════════════════════════════════╗
║  SUSTAIN-EXTRACT                     ║
║  Workspace Initialization            ║
╚══════════════════════════════════════╝"""

SETTINGS_TEMPLATE = "settings.cp.yaml"
RUN_TEMPLATE = "run.cp.json"


def _find_template(name: str) -> Path:
    return Path(__file__).parent / name


def _bootstrap(ctx: click.Context) -> None:
    from sustain_extract.config import load_config
    from sustain_extract.logging_config import setup_logging

    load_config(ctx.obj.get("settings") if ctx.obj else None)
    setup_logging()


def _fail(command: str, exc: SustainExtractError) -> None:
    from sustain_extract.logging_config import log_run_record

    payload = exc.as_dict()
    click.echo(json.dumps(payload), err=True)
    logger.error("%s failed: %s", command, exc)
    log_run_record(command, payload, int(exc.exit_code))
    sys.exit(int(exc.exit_code))


def _command(name: str) -> Callable:
    """Bootstrap settings and logging; map package errors to exit codes."""

    def decorate(fn: Callable) -> Callable:
        @wraps(fn)
        def wrapper(*args, **kwargs):
            ctx = click.get_current_context()
            try:
                _bootstrap(ctx)
                return fn(*args, **kwargs)
            except SustainExtractError as exc:
                _fail(name, exc)

        return wrapper

    return decorate


@click.group()
@click.option(
    "--settings",
    type=click.Path(dir_okay=False),
    default=None,
    help="Settings YAML (default: ./settings.yaml or ~/.sustain-extract/settings.yaml).",
)
@click.pass_context
def cli(ctx: click.Context, settings: Optional[str]) -> None:
    """sustain-extract: constant-consumption extraction paths and rule audits."""
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@_command("solve")
def solve(config_path: str, out_dir: Optional[str]) -> None:
    """Solve for the constant-consumption path; writes trajectory, residuals and summary."""
    from sustain_extract.config import load_run_config
    from sustain_extract.logging_config import log_run_record
    from sustain_extract.services.run_service import RunService, resolve_out_dir

    run = load_run_config(config_path)
    out = resolve_out_dir(run, out_dir)
    _, summary = RunService(run, out).solve_and_write()
    log_run_record("solve", summary)
    click.echo(f"C̄ = {summary['consumption_level']:.10g} after {summary['iterations']} iterations")
    click.echo(f"Wrote {out}/trajectory.csv, residuals.csv, summary.json")


@cli.command()
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False))
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@_command("audit")
def audit(data_path: str, config_path: str, out_dir: Optional[str]) -> None:
    """Audit an observed time series against the extraction rules."""
    from sustain_extract.config import load_run_config
    from sustain_extract.logging_config import log_run_record
    from sustain_extract.services.audit_service import AuditService
    from sustain_extract.services.report_service import ReportService
    from sustain_extract.services.run_service import resolve_out_dir

    run = load_run_config(config_path)
    out = resolve_out_dir(run, out_dir)
    trajectory, report = AuditService(run).audit(data_path)
    reports = ReportService(out)
    reports.write_residuals(report)
    summary = {
        "command": "audit",
        "data": str(data_path),
        "steps": trajectory.steps,
        "resources": trajectory.labels,
        "margin_mode": run.audit.margin_mode.value,
        "residuals": report.summary(),
    }
    reports.write_json(summary, "summary.json")
    log_run_record("audit", summary)
    click.echo(f"Max |hotelling| = {summary['residuals']['max_abs_hotelling']:.3e}")
    click.echo(f"Wrote {out}/residuals.csv, summary.json")


@cli.command("oracle-check")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@click.option("--max-gap", type=float, default=None, help="Accepted relative C̄ gap.")
@_command("oracle-check")
def oracle_check(config_path: str, out_dir: Optional[str], max_gap: Optional[float]) -> None:
    """Compare the solver with brute-force enumeration on a small economy."""
    from sustain_extract.config import get_config, load_run_config
    from sustain_extract.logging_config import log_run_record
    from sustain_extract.services.run_service import RunService, resolve_out_dir

    run = load_run_config(config_path)
    out = resolve_out_dir(run, out_dir)
    bound = get_config().oracle.max_gap if max_gap is None else max_gap
    gap, code, summary = RunService(run, out).oracle_check(bound)
    log_run_record("oracle-check", summary, int(code))
    click.echo(
        f"C̄ solver {gap.cbar_solver:.10g} vs oracle {gap.cbar_oracle:.10g} "
        f"(gap {gap.relative_gap:.3e}, bound {bound:g})"
    )
    click.echo(f"Wrote {out}/gap_report.json, oracle_trajectory.csv")
    if code != ExitCode.OK:
        sys.exit(int(code))


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@_command("sweep")
def sweep(config_path: str, out_dir: Optional[str]) -> None:
    """Solve every cell of the configured parameter grid."""
    from sustain_extract.config import get_config, load_run_config
    from sustain_extract.logging_config import log_run_record
    from sustain_extract.services.run_service import resolve_out_dir
    from sustain_extract.services.sweep_service import SweepService

    run = load_run_config(config_path)
    out = resolve_out_dir(run, out_dir)
    service = SweepService(run, out, threads=get_config().sweep_threads())
    wide = service.execute_and_write()
    failed = int((wide["status"] != "ok").sum())
    log_run_record("sweep", {"cells": len(wide), "failed": failed})
    click.echo(f"Swept {len(wide)} cells ({failed} failed)")
    click.echo(f"Wrote {out}/sweep.csv, sweep_long.csv")


@cli.command()
@click.option("--force", is_flag=True, help="Overwrite existing files.")
def init(force: bool) -> None:
    """Initialize settings and a sample run config in ~/.sustain-extract/."""
    from sustain_extract.config import _default_data_dir

    data_dir = _default_data_dir()
    click.echo(BANNER)
    click.echo()

    data_dir.mkdir(parents=True, exist_ok=True)
    click.echo(f"  [ok] Directory ready: {data_dir}")

    for template, dest_name in [(SETTINGS_TEMPLATE, "settings.yaml"), (RUN_TEMPLATE, "run.json")]:
        dest = data_dir / dest_name
        if dest.exists() and not force:
            click.echo(f"  [--] Already exists: {dest}")
            click.echo("       Use --force to overwrite.")
        else:
            shutil.copy2(_find_template(template), dest)
            click.echo(f"  [ok] Created: {dest}")

    logs = data_dir / "logs"
    logs.mkdir(parents=True, exist_ok=True)
    click.echo(f"  [ok] Subdirectory ready: {logs}")

    click.echo()
    click.echo(f"  -> Edit {data_dir / 'run.json'} to describe your economy.")
    click.echo(f"  -> Then run `sustain-extract solve --config {data_dir / 'run.json'}`.")


@cli.command()
def version() -> None:
    """Show version information."""
    click.echo(f"sustain-extract v{__version__}")


def main() -> None:
    """Console entry point; click usage errors exit with the config-error code."""
    try:
        code = cli.main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(int(ExitCode.CONFIG_ERROR))
    except click.Abort:
        click.echo("Aborted!", err=True)
        sys.exit(int(ExitCode.CONFIG_ERROR))
    sys.exit(code if isinstance(code, int) else 0)

"""Centralized logging configuration for sustain-extract."""

from __future__ import annotations

import json
import logging
import logging.handlers
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict

from sustain_extract.config import get_config

_APP_LOG_FORMAT = "%(asctime)s %(levelname)-8s [%(name)s] %(message)s"
_APP_LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
_RUN_LOGGER_NAME = "sustain_extract.runs"
_HANDLER_TAG = "_sustain_extract_handler"


def _drop_own_handlers(logger: logging.Logger) -> None:
    for handler in list(logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            logger.removeHandler(handler)
            handler.close()


def setup_logging(log_dir: Path | None = None) -> None:
    """Configure logging for the application.

    Safe to call more than once; handlers installed by an earlier call are
    replaced.
    """
    settings = get_config()
    base_dir = Path(log_dir or settings.log.dir)
    base_dir.mkdir(parents=True, exist_ok=True)
    level = logging.getLevelName(settings.log.level.upper())
    if not isinstance(level, int):
        level = logging.INFO

    root = logging.getLogger()
    root.setLevel(level)
    _drop_own_handlers(root)

    # Daily rotating file handler for all application logs
    app_handler = logging.handlers.TimedRotatingFileHandler(
        filename=str(base_dir / "sustain_extract.log"),
        when="midnight",
        interval=1,
        backupCount=14,
        encoding="utf-8",
    )
    app_handler.setLevel(level)
    app_handler.setFormatter(
        logging.Formatter(_APP_LOG_FORMAT, datefmt=_APP_LOG_DATE_FORMAT)
    )
    setattr(app_handler, _HANDLER_TAG, True)
    root.addHandler(app_handler)

    # Run records: JSON Lines, size-rotated
    run_logger = logging.getLogger(_RUN_LOGGER_NAME)
    run_logger.propagate = False
    run_logger.setLevel(logging.INFO)
    _drop_own_handlers(run_logger)
    run_handler = logging.handlers.RotatingFileHandler(
        filename=str(base_dir / "runs.jsonl"),
        maxBytes=10 * 1024 * 1024,  # 10 MB
        backupCount=5,
        encoding="utf-8",
    )
    run_handler.setFormatter(logging.Formatter("%(message)s"))
    setattr(run_handler, _HANDLER_TAG, True)
    run_logger.addHandler(run_handler)


def log_run_record(
    command: str,
    summary: Dict[str, Any],
    exit_code: int = 0,
) -> None:
    """Append one CLI invocation to the run log as a JSON Lines entry."""
    run_logger = logging.getLogger(_RUN_LOGGER_NAME)
    entry = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "exit_code": exit_code,
        "summary": summary,
    }
    try:
        run_logger.info(json.dumps(entry, ensure_ascii=False, default=str))
    except (TypeError, ValueError):
        run_logger.info(json.dumps({"command": command, "error": "serialization_failed"}))


def teardown_logging() -> None:
    """Remove and close the handlers installed by setup_logging()."""
    _drop_own_handlers(logging.getLogger())
    _drop_own_handlers(logging.getLogger(_RUN_LOGGER_NAME))

"""
Logging configuration for the localization and navigation harness.

Project role:
  Provide a single place to configure file-based logging (no print-based ops logs).
"""

from __future__ import annotations

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
_HANDLER_NAME = "locnav-file"
_CONSOLE_NAME = "locnav-console"


def configure_logging(
    *,
    log_file_path: str = "logs/locnav.log",
    level: str | int = logging.INFO,
    console: bool = False,
) -> None:
    """
    Configure root logging with a rotating file handler.

    Calling it again does not add duplicate handlers; batch workers call it
    once per process.

    Params:
      log_file_path: Path to the log file (created if missing).
      level: Root level name or number.
      console: Also log to stderr (the CLI's --verbose flag).
    """

    log_path = Path(log_file_path)
    log_path.parent.mkdir(parents=True, exist_ok=True)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    names = {h.get_name() for h in root_logger.handlers}

    formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")

    if _HANDLER_NAME not in names:
        file_handler = RotatingFileHandler(
            filename=str(log_path),
            maxBytes=2_000_000,
            backupCount=5,
            encoding="utf-8",
        )
        file_handler.set_name(_HANDLER_NAME)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    if console and _CONSOLE_NAME not in names:
        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.set_name(_CONSOLE_NAME)
        stream_handler.setFormatter(formatter)
        root_logger.addHandler(stream_handler)

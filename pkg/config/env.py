"""
Environment loading and access helpers.

Project role:
  Centralize .env loading and typed access to runtime settings (log file,
  log level, default output directory, batch parallelism). Scenario
  parameters never come from the environment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from dotenv import load_dotenv


def load_environment() -> None:
    """Load environment variables from a local `.env` file if present."""

    # `override=False` ensures real environment variables win over `.env`.
    load_dotenv(override=False)


def get_required_env(name: str) -> str:
    """
    Get a required environment variable.

    Params:
      name: Environment variable name.

    Returns:
      The environment variable value.

    Raises:
      RuntimeError: If the variable is missing or empty.
    """

    value = os.getenv(name)
    if value is None or not value.strip():
        raise RuntimeError(f"Missing required environment variable: {name}")
    return value


def get_optional_env(name: str, default: str) -> str:
    """
    Get an optional environment variable with a default.

    Params:
      name: Environment variable name.
      default: Default if missing/empty.

    Returns:
      The environment variable value or the default.
    """

    value = os.getenv(name)
    if value is None or not value.strip():
        return default
    return value


def get_optional_float_env(name: str, default: float) -> float:
    """Like get_optional_env, parsed as float; invalid values fall back to the default."""

    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError:
        return default


def get_optional_int_env(name: str, default: int) -> int:
    """Like get_optional_env, parsed as int; invalid values fall back to the default."""

    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


@dataclass(frozen=True)
class RuntimeSettings:
    """Process-level settings for the command-line harness."""

    log_file: str
    log_level: str
    output_dir: str
    jobs: int


def get_runtime_settings(
    *,
    log_file_default: str = "logs/locnav.log",
    log_level_default: str = "INFO",
    output_dir_default: str = "runs",
    jobs_default: int = 1,
) -> RuntimeSettings:
    """
    Read runtime settings from environment variables.

    Environment variables:
      LOCNAV_LOG_FILE (optional)
      LOCNAV_LOG_LEVEL (optional)
      LOCNAV_OUTPUT_DIR (optional)
      LOCNAV_JOBS (optional, clamped to >= 1)
    """

    return RuntimeSettings(
        log_file=get_optional_env("LOCNAV_LOG_FILE", log_file_default),
        log_level=get_optional_env("LOCNAV_LOG_LEVEL", log_level_default).upper(),
        output_dir=get_optional_env("LOCNAV_OUTPUT_DIR", output_dir_default),
        jobs=max(1, get_optional_int_env("LOCNAV_JOBS", jobs_default)),
    )

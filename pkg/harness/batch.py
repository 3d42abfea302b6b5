"""
Batch runner.

Project role:
  Runs many independent scenarios, one process each, every run writing to
  its own sub-directory of the batch output, and summarizes them in
  ``batch.json``.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from config.env import get_runtime_settings
from harness.runner import SimulationRuntimeError, run_scenario
from harness.scenario import ScenarioValidationError, load_scenario
from observability.logging_config import configure_logging

logger = logging.getLogger(__name__)


def find_scenarios(directory: str | Path) -> list[Path]:
    """Scenario files (``*.json``) directly inside ``directory``, sorted by name."""
    return sorted(p for p in Path(directory).glob("*.json") if p.is_file())


def _init_worker() -> None:
    """Give each worker process the same file logging as the parent."""
    settings = get_runtime_settings()
    configure_logging(log_file_path=settings.log_file, level=settings.log_level)


def _run_one(path: Path, out_dir: Path) -> dict:
    entry: dict = {"scenario": str(path), "out": str(out_dir)}
    try:
        scenario = load_scenario(path)
        result = run_scenario(scenario, path.parent, out_dir)
    except ScenarioValidationError as exc:
        entry.update(status="invalid", problems=exc.problems)
        return entry
    except SimulationRuntimeError as exc:
        entry.update(status="failed", step=exc.step, error=str(exc))
        return entry
    entry.update(
        status="ok",
        name=scenario.name,
        seed=scenario.seed,
        metrics=result.metrics.model_dump(mode="json"),
    )
    return entry


def run_batch(paths: list[Path], out_dir: str | Path, jobs: int = 1) -> list[dict]:
    """
    Run each scenario into ``out_dir/<scenario stem>`` and write ``batch.json``.

    Params:
        paths: Scenario files.
        out_dir: Batch output directory.
        jobs: Worker processes; 1 runs in-process.

    Returns:
        One summary entry per scenario in input order, with a ``status`` of
        "ok", "invalid" or "failed".
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    targets = [out / p.stem for p in paths]
    if jobs <= 1 or len(paths) <= 1:
        entries = [_run_one(p, t) for p, t in zip(paths, targets)]
    else:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker) as pool:
            entries = list(pool.map(_run_one, paths, targets))

    failed = sum(1 for e in entries if e["status"] != "ok")
    logger.info("Batch finished: %d scenarios, %d not ok", len(entries), failed)
    (out / "batch.json").write_text(json.dumps(entries, indent=2) + "\n", encoding="utf-8")
    return entries

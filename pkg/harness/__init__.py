"""Scenario harness: scenario files, the run loop, metrics and artifacts."""

from harness.metrics import EstimatorMetrics, MetricsReport, compute_ate, compute_metrics, heading_mae
from harness.records import RUN_COLUMNS, RunRecord, StepRow, read_run_csv, write_run_csv
from harness.render import render_svg
from harness.runner import RunResult, SimulationRuntimeError, run_scenario, write_run_artifacts
from harness.scenario import Scenario, ScenarioValidationError, load_scenario, validate_scenario

__all__ = [
    "EstimatorMetrics",
    "MetricsReport",
    "RUN_COLUMNS",
    "RunRecord",
    "RunResult",
    "Scenario",
    "ScenarioValidationError",
    "SimulationRuntimeError",
    "StepRow",
    "compute_ate",
    "compute_metrics",
    "heading_mae",
    "load_scenario",
    "read_run_csv",
    "render_svg",
    "run_scenario",
    "validate_scenario",
    "write_run_artifacts",
    "write_run_csv",
]

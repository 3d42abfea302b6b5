"""
Trajectory error metrics.

Project role:
  Absolute trajectory error (no alignment: truth and estimates share the
  map frame), heading error, final-pose error and localized-step ratio for
  every estimator of a run.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field

from geometry.pose import normalize_angles
from harness.records import ESTIMATORS, RunRecord


def _as_poses(values: np.ndarray | list) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.ndim != 2 or array.shape[1] < 2:
        raise ValueError("pose sequences must have shape (n, 2) or (n, 3)")
    return array


def compute_ate(truth: np.ndarray | list, estimate: np.ndarray | list) -> float:
    """
    Root-mean-square planar position error.

    Params:
        truth: (n, 2+) poses.
        estimate: (n, 2+) poses.

    Returns:
        RMSE in meters.

    Raises:
        ValueError: On unequal lengths or empty sequences.
    """
    t, e = _as_poses(truth), _as_poses(estimate)
    if t.shape[0] != e.shape[0]:
        raise ValueError(f"length mismatch: {t.shape[0]} truth poses vs {e.shape[0]} estimates")
    if t.shape[0] == 0:
        raise ValueError("pose sequences must not be empty")
    sq = np.sum((t[:, :2] - e[:, :2]) ** 2, axis=1)
    return float(np.sqrt(np.mean(sq)))


def heading_mae(truth: np.ndarray, estimate: np.ndarray) -> float:
    """Mean absolute wrapped heading difference (rad)."""
    diff = normalize_angles(np.asarray(estimate)[:, 2] - np.asarray(truth)[:, 2])
    return float(np.mean(np.abs(diff)))


class EstimatorMetrics(BaseModel):
    ate_rmse: float = Field(ge=0)
    heading_mae: float = Field(ge=0)
    final_position_error: float = Field(ge=0)
    final_heading_error: float = Field(ge=0)
    localized_pct: float = Field(ge=0, le=100)


class MetricsReport(BaseModel):
    """Summary written to metrics.json."""

    steps: int = 0
    goal_reached: bool = False
    halts: int = 0
    collisions: int = 0
    localized_threshold: float = 0.2
    estimators: dict[str, EstimatorMetrics] = Field(default_factory=dict)


def compute_metrics(
    record: RunRecord,
    *,
    goal_reached: bool = False,
    halts: int = 0,
    collisions: int = 0,
    localized_threshold: float = 0.2,
) -> MetricsReport:
    """Metrics for every estimator present on all steps of ``record``."""
    report = MetricsReport(
        steps=len(record),
        goal_reached=goal_reached,
        halts=halts,
        collisions=collisions,
        localized_threshold=localized_threshold,
    )
    truth = record.trajectory("true")
    if truth is None:
        return report
    for name in ESTIMATORS:
        est = record.trajectory(name)
        if est is None:
            continue
        errors = np.hypot(est[:, 0] - truth[:, 0], est[:, 1] - truth[:, 1])
        final_heading = abs(float(normalize_angles(np.array([est[-1, 2] - truth[-1, 2]]))[0]))
        report.estimators[name] = EstimatorMetrics(
            ate_rmse=compute_ate(truth, est),
            heading_mae=heading_mae(truth, est),
            final_position_error=float(errors[-1]),
            final_heading_error=final_heading,
            localized_pct=100.0 * float(np.mean(errors < localized_threshold)),
        )
    return report

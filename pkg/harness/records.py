"""
Per-step run records.

Project role:
  Collects one row per simulation step and writes the run CSV with a fixed
  column order. Estimators that are disabled emit empty fields.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from geometry.pose import Pose2D

RUN_COLUMNS: tuple[str, ...] = (
    "step", "time_s",
    "true_x", "true_y", "true_theta",
    "odo_x", "odo_y", "odo_theta",
    "mcl_x", "mcl_y", "mcl_theta",
    "ndt_x", "ndt_y", "ndt_theta",
    "fused_x", "fused_y", "fused_theta",
    "nav_mode", "cov_trace",
)
ESTIMATORS: tuple[str, ...] = ("odo", "mcl", "ndt", "fused")
FLOAT_FORMAT = "%.6f"


@dataclass(frozen=True)
class StepRow:
    step: int
    time_s: float
    truth: Pose2D
    odometry: Pose2D
    mcl: Pose2D | None = None
    ndt: Pose2D | None = None
    fused: Pose2D | None = None
    nav_mode: str = ""
    cov_trace: float | None = None


@dataclass
class RunRecord:
    """Ordered step rows of one run."""

    rows: list[StepRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, row: StepRow) -> None:
        if self.rows and row.step <= self.rows[-1].step:
            raise ValueError(f"step {row.step} does not follow step {self.rows[-1].step}")
        self.rows.append(row)

    def to_frame(self) -> pd.DataFrame:
        """Rows as a DataFrame with exactly RUN_COLUMNS; absent poses are NaN."""
        records = []
        for row in self.rows:
            record: dict[str, object] = {"step": row.step, "time_s": row.time_s}
            for prefix, pose in (
                ("true", row.truth), ("odo", row.odometry), ("mcl", row.mcl),
                ("ndt", row.ndt), ("fused", row.fused),
            ):
                values = (pose.x, pose.y, pose.theta) if pose is not None else (np.nan,) * 3
                record.update(zip((f"{prefix}_x", f"{prefix}_y", f"{prefix}_theta"), values))
            record["nav_mode"] = row.nav_mode
            record["cov_trace"] = np.nan if row.cov_trace is None else row.cov_trace
            records.append(record)
        frame = pd.DataFrame.from_records(records, columns=list(RUN_COLUMNS))
        return frame.astype({"step": "int64"})

    def trajectory(self, name: str) -> np.ndarray | None:
        """(n, 3) poses of ``"true"`` or an estimator, None when it never reported."""
        attr = {"true": "truth", "odo": "odometry", "mcl": "mcl", "ndt": "ndt", "fused": "fused"}[name]
        poses = [getattr(row, attr) for row in self.rows]
        if not poses or any(p is None for p in poses):
            return None
        return np.array([p.as_array() for p in poses])

    def as_dicts(self) -> list[dict]:
        return [asdict(row) for row in self.rows]


def write_run_csv(record: RunRecord, path: str | Path) -> None:
    """Write the CSV; bytes depend only on the row values."""
    record.to_frame().to_csv(
        path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n"
    )


def read_run_csv(path: str | Path) -> pd.DataFrame:
    """Read a run CSV back, keeping ``nav_mode`` as text."""
    frame = pd.read_csv(path, dtype={"nav_mode": "string"}, keep_default_na=True)
    missing = [c for c in RUN_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"run CSV is missing columns: {', '.join(missing)}")
    return frame

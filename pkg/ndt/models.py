"""
Data models for 2D Normal Distributions Transform matching.

Project role:
  Per-cell Gaussian summaries of a reference point cloud and the result of
  an alignment run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from geometry.pose import Pose2D

DEFAULT_CELL_SIZE = 1.0
DEFAULT_MAX_ITERATIONS = 30
DEFAULT_TOLERANCE = 1e-4
MIN_POINTS_PER_CELL = 3
MIN_EIGENVALUE_RATIO = 1e-3
# Absolute covariance floor (m^2); keeps degenerate cells (collinear or
# coincident points) at a usable width.
DEFAULT_MIN_VARIANCE = 0.01

CellIndex = tuple[int, int]


class SparseReferenceError(ValueError):
    """No cell of the reference cloud reaches the minimum point count."""


class NdtNumericalError(RuntimeError):
    """
    Non-finite score or derivatives during alignment.

    Attributes:
        iteration: Iteration at which the failure was detected.
    """

    def __init__(self, message: str, iteration: int) -> None:
        super().__init__(f"numerical failure at iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True, eq=False)
class NdtCell:
    """
    Gaussian summary of the points in one cell.

    Attributes:
        mean: 2-vector (m).
        covariance: Regularized symmetric positive definite 2x2 matrix (m^2).
        inverse: Inverse of ``covariance``.
        point_count: Number of reference points in the cell.
    """

    mean: np.ndarray
    covariance: np.ndarray
    inverse: np.ndarray
    point_count: int


@dataclass(frozen=True, eq=False)
class NdtCellGrid:
    """Sparse map from cell index to NdtCell; only populated cells are stored."""

    cell_size: float
    cells: dict[CellIndex, NdtCell]

    def __len__(self) -> int:
        return len(self.cells)

    def cell_index(self, x: float, y: float) -> CellIndex:
        return (int(np.floor(x / self.cell_size)), int(np.floor(y / self.cell_size)))


@dataclass(frozen=True)
class NdtScore:
    """Objective value with analytic derivatives w.r.t. (tx, ty, phi)."""

    score: float
    gradient: np.ndarray
    hessian: np.ndarray
    matched: int


@dataclass(frozen=True)
class NdtResult:
    """
    Alignment outcome.

    Attributes:
        transform: Pose mapping scan points into the reference frame.
        score: Final objective value.
        iterations: Newton iterations performed.
        converged: True when the last accepted step norm fell below tolerance.
        message: Stop reason.
    """

    transform: Pose2D
    score: float
    iterations: int
    converged: bool
    message: str = ""

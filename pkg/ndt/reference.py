"""
Building NDT reference grids.

Project role:
  Partitions a 2D point cloud into square cells and summarizes each
  populated cell by a regularized Gaussian. Also converts the occupancy map
  and LiDAR scans into point clouds for scan-to-map matching.
"""

from __future__ import annotations

import logging

import numpy as np

from geometry.grid import OccupancyGrid, occupied_points
from geometry.scan import LidarScan
from ndt.models import (
    DEFAULT_CELL_SIZE,
    DEFAULT_MIN_VARIANCE,
    MIN_EIGENVALUE_RATIO,
    MIN_POINTS_PER_CELL,
    NdtCell,
    NdtCellGrid,
    SparseReferenceError,
)

logger = logging.getLogger(__name__)


def regularize_covariance(cov: np.ndarray, min_variance: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Clamp the eigenvalues of a 2x2 covariance.

    The smallest eigenvalue is raised to at least MIN_EIGENVALUE_RATIO times
    the largest and to at least ``min_variance``.

    Returns:
        ``(covariance, inverse)``, both symmetric.
    """
    eigvals, eigvecs = np.linalg.eigh((cov + cov.T) / 2.0)
    floor = max(float(eigvals.max()) * MIN_EIGENVALUE_RATIO, min_variance)
    eigvals = np.maximum(eigvals, floor)
    covariance = eigvecs @ np.diag(eigvals) @ eigvecs.T
    inverse = eigvecs @ np.diag(1.0 / eigvals) @ eigvecs.T
    return (covariance + covariance.T) / 2.0, (inverse + inverse.T) / 2.0


def build_ndt(
    reference_points: np.ndarray,
    cell_size: float = DEFAULT_CELL_SIZE,
    min_variance: float = DEFAULT_MIN_VARIANCE,
) -> NdtCellGrid:
    """
    Summarize a reference cloud as per-cell Gaussians.

    Params:
        reference_points: (n, 2) points in meters.
        cell_size: Cell edge length in meters.
        min_variance: Absolute eigenvalue floor (m^2).

    Returns:
        NdtCellGrid holding cells with at least MIN_POINTS_PER_CELL points.

    Raises:
        SparseReferenceError: If no cell reaches the minimum point count.
    """
    if not cell_size > 0:
        raise ValueError("cell_size must be positive")
    points = np.asarray(reference_points, dtype=float).reshape(-1, 2)
    if points.shape[0] < MIN_POINTS_PER_CELL:
        raise SparseReferenceError("reference too sparse: fewer than 3 points")

    keys = np.floor(points / cell_size).astype(np.int64)
    unique_keys, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    cells: dict[tuple[int, int], NdtCell] = {}
    for group, key in enumerate(unique_keys):
        members = points[inverse == group]
        if members.shape[0] < MIN_POINTS_PER_CELL:
            continue
        mean = members.mean(axis=0)
        raw = np.cov(members, rowvar=False)
        covariance, inv = regularize_covariance(raw, min_variance)
        cells[(int(key[0]), int(key[1]))] = NdtCell(
            mean=mean, covariance=covariance, inverse=inv, point_count=int(members.shape[0])
        )
    if not cells:
        raise SparseReferenceError("reference too sparse: no cell holds 3 points")
    logger.debug("Built NDT grid: %d cells from %d points", len(cells), points.shape[0])
    return NdtCellGrid(cell_size=cell_size, cells=cells)


def build_map_ndt(grid: OccupancyGrid, cell_size: float = DEFAULT_CELL_SIZE) -> NdtCellGrid:
    """NDT grid over the wall-surface cell centers of an occupancy map."""
    return build_ndt(occupied_points(grid, surface_only=True), cell_size)


def scan_to_points(scan: LidarScan, stride: int = 1) -> np.ndarray:
    """Robot-frame endpoints of the beams that returned (range < range_max)."""
    idx = np.arange(0, len(scan), max(1, stride))
    idx = idx[scan.ranges[idx] < scan.range_max]
    angles = scan.angles[idx]
    r = scan.ranges[idx]
    return np.column_stack([r * np.cos(angles), r * np.sin(angles)])

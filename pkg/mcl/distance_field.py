"""
Distance-to-nearest-obstacle field for the likelihood sensor model.

Project role:
  Precomputed once per map so each beam endpoint costs one array lookup.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt

from geometry.grid import OccupancyGrid, world_to_grid_array
from mcl.models import DEFAULT_DISTANCE_CAP


@dataclass(frozen=True, eq=False)
class DistanceField:
    """
    Per-cell Euclidean distance (m) from the cell center to the nearest
    OCCUPIED cell center, capped at ``cap``.
    """

    grid: OccupancyGrid
    distances: np.ndarray
    cap: float

    def lookup(self, points: np.ndarray) -> np.ndarray:
        """
        Distance at world points; points outside the map read ``cap``.

        Params:
            points: Array of shape (..., 2).

        Returns:
            Array of shape (...,).
        """
        ix, iy, inside = world_to_grid_array(self.grid, points)
        values = self.distances[iy, ix]
        return np.where(inside, values, self.cap)


def precompute_distance_field(grid: OccupancyGrid, cap: float = DEFAULT_DISTANCE_CAP) -> DistanceField:
    """
    Compute the capped Euclidean distance transform of the map.

    Params:
        grid: Reference map; only OCCUPIED cells count as obstacles.
        cap: Upper bound stored for cells far from (or without) any obstacle.

    Returns:
        DistanceField with a read-only ``(height, width)`` array in meters.
    """
    if not cap > 0:
        raise ValueError("cap must be positive")
    occupied = grid.occupied_mask
    if not occupied.any():
        distances = np.full(occupied.shape, cap, dtype=float)
    else:
        distances = distance_transform_edt(~occupied, sampling=grid.resolution)
        distances = np.minimum(distances, cap)
    distances.setflags(write=False)
    return DistanceField(grid=grid, distances=distances, cap=cap)

"""
Occupancy grid map and world/grid coordinate conversion.

Project role:
  The reference layout map shared by the simulator, the localizers and the
  planner. Cells are stored row-major as ``cells[iy, ix]`` with row 0 at the
  map origin, so cell ``(ix, iy)`` covers
  ``[ix*res, (ix+1)*res) x [iy*res, (iy+1)*res)`` in the map frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from geometry.pose import Pose2D

Cell = tuple[int, int]
Point = tuple[float, float]


class CellState(IntEnum):
    """Tri-level occupancy of one grid cell."""

    FREE = 0
    OCCUPIED = 1
    UNKNOWN = 2


class OutOfMapError(ValueError):
    """Raised when a query point lies outside the map bounds."""


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """
    Immutable occupancy grid.

    Attributes:
        width: Number of columns (cells along map x).
        height: Number of rows (cells along map y).
        resolution: Cell edge length in meters.
        origin: World pose of the outer corner of cell (0, 0).
        cells: ``int8`` array of shape (height, width) holding CellState values.

    Raises:
        ValueError: On non-positive dimensions/resolution or a shape mismatch.
    """

    width: int
    height: int
    resolution: float
    origin: Pose2D
    cells: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be at least 1")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        cells = np.array(self.cells, dtype=np.int8, copy=True)
        if cells.shape != (self.height, self.width):
            raise ValueError(
                f"cells shape {cells.shape} does not match (height, width)=({self.height}, {self.width})"
            )
        if cells.size and (cells.min() < 0 or cells.max() > CellState.UNKNOWN):
            raise ValueError("cells must hold CellState values")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def filled(
        cls,
        width: int,
        height: int,
        resolution: float,
        state: CellState = CellState.FREE,
        origin: Pose2D | None = None,
    ) -> OccupancyGrid:
        """Build a grid with every cell in ``state``."""
        return cls(
            width=width,
            height=height,
            resolution=resolution,
            origin=origin or Pose2D(0.0, 0.0, 0.0),
            cells=np.full((height, width), int(state), dtype=np.int8),
        )

    @property
    def extent(self) -> tuple[float, float]:
        """Map size in meters along the map frame axes."""
        return (self.width * self.resolution, self.height * self.resolution)

    @property
    def blocking_mask(self) -> np.ndarray:
        """Cells that stop a ray (OCCUPIED or UNKNOWN)."""
        return self.cells != CellState.FREE

    @property
    def occupied_mask(self) -> np.ndarray:
        return self.cells == CellState.OCCUPIED

    @property
    def free_mask(self) -> np.ndarray:
        return self.cells == CellState.FREE

    def in_bounds(self, cell: Cell) -> bool:
        ix, iy = cell
        return 0 <= ix < self.width and 0 <= iy < self.height

    def state(self, cell: Cell) -> CellState:
        ix, iy = cell
        return CellState(int(self.cells[iy, ix]))

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and self.cells[cell[1], cell[0]] == CellState.FREE

    def is_blocking(self, cell: Cell) -> bool:
        """True for an in-bounds OCCUPIED or UNKNOWN cell."""
        return self.in_bounds(cell) and self.cells[cell[1], cell[0]] != CellState.FREE

    def free_cells(self) -> np.ndarray:
        """Return an (n, 2) array of (ix, iy) indices of FREE cells."""
        iy, ix = np.nonzero(self.free_mask)
        return np.column_stack([ix, iy])

    def occupied_cells(self) -> np.ndarray:
        """Return an (n, 2) array of (ix, iy) indices of OCCUPIED cells."""
        iy, ix = np.nonzero(self.occupied_mask)
        return np.column_stack([ix, iy])

    def with_cells(self, mask: np.ndarray, state: CellState) -> OccupancyGrid:
        """Return a copy with every masked cell set to ``state``."""
        cells = np.array(self.cells, copy=True)
        cells[mask] = int(state)
        return OccupancyGrid(self.width, self.height, self.resolution, self.origin, cells)

    def disc_mask(self, center: Point, radius: float) -> np.ndarray:
        """Cells whose centers lie within ``radius`` (inclusive) of ``center``."""
        lx, ly = to_map_frame(self, center)
        xs = (np.arange(self.width) + 0.5) * self.resolution
        ys = (np.arange(self.height) + 0.5) * self.resolution
        dx = xs[np.newaxis, :] - lx
        dy = ys[:, np.newaxis] - ly
        return dx * dx + dy * dy <= radius * radius

    def stamp_disc(self, center: Point, radius: float, state: CellState) -> OccupancyGrid:
        return self.with_cells(self.disc_mask(center, radius), state)


def to_map_frame(grid: OccupancyGrid, point: Point) -> Point:
    """Express a world point in the map frame (origin corner, map axes)."""
    dx = point[0] - grid.origin.x
    dy = point[1] - grid.origin.y
    if grid.origin.theta == 0.0:
        return (dx, dy)
    c, s = math.cos(grid.origin.theta), math.sin(grid.origin.theta)
    return (c * dx + s * dy, -s * dx + c * dy)


def from_map_frame(grid: OccupancyGrid, point: Point) -> Point:
    """Inverse of ``to_map_frame``."""
    if grid.origin.theta == 0.0:
        return (point[0] + grid.origin.x, point[1] + grid.origin.y)
    c, s = math.cos(grid.origin.theta), math.sin(grid.origin.theta)
    return (
        grid.origin.x + c * point[0] - s * point[1],
        grid.origin.y + s * point[0] + c * point[1],
    )


def world_to_grid(grid: OccupancyGrid, point: Point) -> Cell | None:
    """
    Return the cell containing a world point.

    Params:
        grid: Map to index into.
        point: World coordinates in meters.

    Returns:
        ``(ix, iy)`` of the containing cell, or None when the point lies
        outside the map. Out-of-bounds is a normal result, not an error.
    """
    lx, ly = to_map_frame(grid, point)
    ix = math.floor(lx / grid.resolution)
    iy = math.floor(ly / grid.resolution)
    if 0 <= ix < grid.width and 0 <= iy < grid.height:
        return (ix, iy)
    return None


def grid_to_world(grid: OccupancyGrid, cell: Cell) -> Point:
    """Return the world coordinates of a cell center."""
    ix, iy = cell
    return from_map_frame(grid, ((ix + 0.5) * grid.resolution, (iy + 0.5) * grid.resolution))


def cell_centers(grid: OccupancyGrid, cells: np.ndarray) -> np.ndarray:
    """Vectorized grid_to_world over an (n, 2) array of (ix, iy)."""
    local = (np.asarray(cells, dtype=float) + 0.5) * grid.resolution
    if grid.origin.theta == 0.0:
        return local + np.array([grid.origin.x, grid.origin.y])
    c, s = math.cos(grid.origin.theta), math.sin(grid.origin.theta)
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + np.array([grid.origin.x, grid.origin.y])


def world_to_grid_array(grid: OccupancyGrid, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorized world_to_grid.

    Returns:
        ``(ix, iy, inside)`` integer index arrays and a boolean in-bounds mask.
        Indices of outside points are clipped into range and must be masked.
    """
    pts = np.asarray(points, dtype=float)
    dx = pts[..., 0] - grid.origin.x
    dy = pts[..., 1] - grid.origin.y
    if grid.origin.theta != 0.0:
        c, s = math.cos(grid.origin.theta), math.sin(grid.origin.theta)
        dx, dy = c * dx + s * dy, -s * dx + c * dy
    ix = np.floor(dx / grid.resolution).astype(np.int64)
    iy = np.floor(dy / grid.resolution).astype(np.int64)
    inside = (ix >= 0) & (ix < grid.width) & (iy >= 0) & (iy < grid.height)
    return np.clip(ix, 0, grid.width - 1), np.clip(iy, 0, grid.height - 1), inside


def occupied_points(grid: OccupancyGrid, surface_only: bool = True) -> np.ndarray:
    """
    Convert the map to a 2D point cloud of OCCUPIED cell centers.

    Params:
        grid: Reference map.
        surface_only: Keep only cells with at least one 4-neighbor that is not
            OCCUPIED (the wall faces a range sensor can actually see).

    Returns:
        (n, 2) array of world coordinates.
    """
    if not surface_only:
        return cell_centers(grid, grid.occupied_cells())
    occupied = grid.occupied_mask
    padded = np.pad(occupied, 1, constant_values=False)
    interior = padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    iy, ix = np.nonzero(occupied & ~interior)
    return cell_centers(grid, np.column_stack([ix, iy]))

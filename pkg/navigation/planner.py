"""
Grid path planning.

Project role:
  A* over the 8-connected occupancy grid with OCCUPIED/UNKNOWN, inflated
  and blocked cells excluded. Dijkstra over the same neighborhood serves as
  the reference planner for halt decisions and tests.

Moves cost 1 (axial) or sqrt(2) (diagonal) in cell units. Diagonal moves
may not cut the corner of an excluded cell. Reported costs are recomputed
from the move counts so equal-cost paths report identical floats.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt

from geometry.grid import Cell, OccupancyGrid, OutOfMapError, Point, grid_to_world, world_to_grid
from navigation.models import EndpointBlockedError

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
_MOVES: tuple[tuple[int, int], ...] = (
    (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1),
)


@dataclass(frozen=True)
class PlannedPath:
    """
    A found path.

    Attributes:
        cells: Grid cells from start to goal, consecutive cells 8-neighbors.
        points: World coordinates of the cell centers.
        cost: Path cost in cell units.
    """

    cells: tuple[Cell, ...]
    points: tuple[Point, ...]
    cost: float


def octile_distance(a: Cell, b: Cell) -> float:
    """Admissible heuristic for 8-connected grids with unit/sqrt(2) moves."""
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    return (dx + dy) + (SQRT2 - 2.0) * min(dx, dy)


def path_cost(cells: Iterable[Cell]) -> float:
    """Cost of a cell path: 1 per axial move, sqrt(2) per diagonal move."""
    axial = diagonal = 0
    seq = list(cells)
    for (ax, ay), (bx, by) in zip(seq, seq[1:]):
        if abs(ax - bx) + abs(ay - by) == 2:
            diagonal += 1
        else:
            axial += 1
    return axial + diagonal * SQRT2


def inflate(grid: OccupancyGrid, radius: float) -> np.ndarray:
    """
    Exclusion mask of cells within ``radius`` of a blocking cell.

    Distances are between cell centers; blocking cells themselves are
    always excluded.
    """
    blocking = grid.blocking_mask
    if not blocking.any():
        return np.zeros_like(blocking, dtype=bool)
    if radius <= 0:
        return blocking.copy()
    return distance_transform_edt(~blocking, sampling=grid.resolution) <= radius + 1e-9


def blocked_mask(grid: OccupancyGrid, blocked_cells: Iterable[Cell] | np.ndarray | None) -> np.ndarray:
    """Normalize a set of cells (or a boolean mask) into a (height, width) mask."""
    mask = np.zeros((grid.height, grid.width), dtype=bool)
    if blocked_cells is None:
        return mask
    if isinstance(blocked_cells, np.ndarray) and blocked_cells.dtype == bool:
        if blocked_cells.shape != mask.shape:
            raise ValueError("blocked mask shape does not match the grid")
        return blocked_cells.copy()
    for ix, iy in blocked_cells:
        if grid.in_bounds((ix, iy)):
            mask[iy, ix] = True
    return mask


def _neighbors(excluded: np.ndarray, cell: Cell) -> Iterator[tuple[Cell, bool]]:
    height, width = excluded.shape
    x, y = cell
    for dx, dy in _MOVES:
        nx, ny = x + dx, y + dy
        if not (0 <= nx < width and 0 <= ny < height) or excluded[ny, nx]:
            continue
        diagonal = dx != 0 and dy != 0
        if diagonal and (excluded[y, nx] or excluded[ny, x]):
            continue
        yield (nx, ny), diagonal


def _reconstruct(parents: dict[Cell, Cell], goal: Cell) -> list[Cell]:
    path = [goal]
    while path[-1] in parents:
        path.append(parents[path[-1]])
    path.reverse()
    return path


def astar(excluded: np.ndarray, start: Cell, goal: Cell) -> list[Cell] | None:
    """A* on an exclusion mask; returns the cell path or None."""
    if start == goal:
        return [start]
    counter = itertools.count()
    g_score: dict[Cell, float] = {start: 0.0}
    parents: dict[Cell, Cell] = {}
    closed: set[Cell] = set()
    frontier = [(octile_distance(start, goal), next(counter), start)]
    while frontier:
        _, _, current = heapq.heappop(frontier)
        if current in closed:
            continue
        if current == goal:
            return _reconstruct(parents, goal)
        closed.add(current)
        base = g_score[current]
        for nxt, diagonal in _neighbors(excluded, current):
            if nxt in closed:
                continue
            candidate = base + (SQRT2 if diagonal else 1.0)
            if candidate < g_score.get(nxt, math.inf):
                g_score[nxt] = candidate
                parents[nxt] = current
                heapq.heappush(frontier, (candidate + octile_distance(nxt, goal), next(counter), nxt))
    return None


def dijkstra_cost(excluded: np.ndarray, start: Cell, goal: Cell) -> float | None:
    """Reference shortest-path cost (cell units), or None when unreachable."""
    counter = itertools.count()
    dist: dict[Cell, float] = {start: 0.0}
    parents: dict[Cell, Cell] = {}
    done: set[Cell] = set()
    frontier = [(0.0, next(counter), start)]
    while frontier:
        d, _, current = heapq.heappop(frontier)
        if current in done:
            continue
        if current == goal:
            return path_cost(_reconstruct(parents, goal))
        done.add(current)
        for nxt, diagonal in _neighbors(excluded, current):
            candidate = d + (SQRT2 if diagonal else 1.0)
            if candidate < dist.get(nxt, math.inf):
                dist[nxt] = candidate
                parents[nxt] = current
                heapq.heappush(frontier, (candidate, next(counter), nxt))
    return None


def planning_mask(
    grid: OccupancyGrid,
    blocked_cells: Iterable[Cell] | np.ndarray | None,
    inflation_radius: float,
) -> np.ndarray:
    """Cells the planner may not enter: blocking, inflated and blocked."""
    return inflate(grid, inflation_radius) | blocked_mask(grid, blocked_cells)


def _endpoint_cell(grid: OccupancyGrid, point: Point, name: str) -> Cell:
    cell = world_to_grid(grid, point)
    if cell is None:
        raise OutOfMapError(f"{name} {point} lies outside the map")
    return cell


def plan_path(
    grid: OccupancyGrid,
    blocked_cells: Iterable[Cell] | np.ndarray | None,
    start: Point,
    goal: Point,
    inflation_radius: float,
    start_clearance: float = 0.0,
) -> PlannedPath | None:
    """
    Plan a shortest 8-connected path between two world points.

    Params:
        grid: Reference map.
        blocked_cells: Extra excluded cells (set of (ix, iy) or a bool mask).
        start: Start position (m).
        goal: Goal position (m).
        inflation_radius: Clearance around blocking cells (m).
        start_clearance: Re-admit inflated or blocked (never OCCUPIED or
            UNKNOWN) cells within this distance of the start, so a robot
            that drifted into the clearance band can still leave it.

    Returns:
        PlannedPath, or None when the goal is unreachable.

    Raises:
        OutOfMapError: If an endpoint lies outside the map.
        EndpointBlockedError: If an endpoint lies in an excluded cell.
    """
    start_cell = _endpoint_cell(grid, start, "start")
    goal_cell = _endpoint_cell(grid, goal, "goal")
    excluded = planning_mask(grid, blocked_cells, inflation_radius)
    if start_clearance > 0:
        excluded &= ~(grid.disc_mask(start, start_clearance) & ~grid.blocking_mask)
    if excluded[start_cell[1], start_cell[0]]:
        raise EndpointBlockedError("start", f"cell {start_cell}")
    if excluded[goal_cell[1], goal_cell[0]]:
        raise EndpointBlockedError("goal", f"cell {goal_cell}")

    cells = astar(excluded, start_cell, goal_cell)
    if cells is None:
        logger.info("No path from %s to %s", start_cell, goal_cell)
        return None
    points = tuple(grid_to_world(grid, c) for c in cells)
    cost = path_cost(cells)
    logger.debug("Planned %d cells from %s to %s (cost %.2f)", len(cells), start_cell, goal_cell, cost)
    return PlannedPath(cells=tuple(cells), points=points, cost=cost)

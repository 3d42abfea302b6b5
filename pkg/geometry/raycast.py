"""
Grid-traversal raycasting.

Project role:
  Expected-range computation for the simulated LiDAR. Walks the cells a ray
  crosses in order (Amanatides-Woo stepping) and stops at the first blocking
  cell, so the result is exact up to floating point rather than sampled.
"""

from __future__ import annotations

import math

from geometry.grid import OccupancyGrid, OutOfMapError, Point, to_map_frame


def raycast(grid: OccupancyGrid, start: Point, bearing: float, range_max: float) -> float:
    """
    Distance from ``start`` along ``bearing`` to the first blocking cell boundary.

    UNKNOWN cells block like OCCUPIED ones. A ray that leaves the map, or
    travels ``range_max`` without a hit, returns ``range_max``.

    Params:
        grid: Map to trace through.
        start: World position of the sensor; must lie inside the map.
        bearing: World-frame ray direction in radians.
        range_max: Maximum range in meters.

    Returns:
        Distance in meters, always in [0, range_max].

    Raises:
        OutOfMapError: If ``start`` is outside the map.
    """
    lx, ly = to_map_frame(grid, start)
    res = grid.resolution
    gx, gy = lx / res, ly / res
    ix, iy = math.floor(gx), math.floor(gy)
    if not (0 <= ix < grid.width and 0 <= iy < grid.height):
        raise OutOfMapError(f"raycast start {start} lies outside the map")
    if range_max <= 0:
        return range_max

    angle = bearing - grid.origin.theta
    dx, dy = math.cos(angle), math.sin(angle)
    max_t = range_max / res

    if dx > 0:
        step_x, t_max_x, t_delta_x = 1, (ix + 1 - gx) / dx, 1.0 / dx
    elif dx < 0:
        step_x, t_max_x, t_delta_x = -1, (gx - ix) / -dx, -1.0 / dx
    else:
        step_x, t_max_x, t_delta_x = 0, math.inf, math.inf
    if dy > 0:
        step_y, t_max_y, t_delta_y = 1, (iy + 1 - gy) / dy, 1.0 / dy
    elif dy < 0:
        step_y, t_max_y, t_delta_y = -1, (gy - iy) / -dy, -1.0 / dy
    else:
        step_y, t_max_y, t_delta_y = 0, math.inf, math.inf

    t = 0.0
    while True:
        if grid.is_blocking((ix, iy)):
            return min(t * res, range_max)
        if t_max_x < t_max_y:
            t = t_max_x
            ix += step_x
            t_max_x += t_delta_x
        else:
            t = t_max_y
            iy += step_y
            t_max_y += t_delta_y
        if t >= max_t:
            return range_max
        if not (0 <= ix < grid.width and 0 <= iy < grid.height):
            return range_max

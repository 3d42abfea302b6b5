"""
Waypoint navigation with detection-zone rerouting.

Project role:
  Builds routes from planned paths, advances along them, and when a
  waypoint's detection zone contains an unmapped obstacle, excludes the
  obstacle's surroundings from the planning grid and replans. No path
  means the robot halts until one becomes available.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import replace

import numpy as np
from scipy.ndimage import distance_transform_edt

from geometry.grid import OccupancyGrid, Point, world_to_grid_array
from geometry.pose import Pose2D
from geometry.scan import LidarScan
from mcl.distance_field import DistanceField, precompute_distance_field
from navigation.models import (
    BlockedZone,
    EndpointBlockedError,
    NavigationParams,
    NavMode,
    NavState,
    ObstaclePoint,
    Route,
    Waypoint,
)
from navigation.obstacles import ObstacleMemory, check_zones, classify_obstacles, filter_mapped
from navigation.planner import plan_path

logger = logging.getLogger(__name__)

HALF_DIAGONAL = math.sqrt(0.5)


def route_from_path(path: Sequence[Point], zone_radius: float, max_spacing: float) -> Route:
    """
    Downsample a cell-center path into waypoints.

    The start cell is dropped (the robot stands on it) unless it is the only
    cell; the final cell is always kept. Spacing never exceeds
    ``max_spacing`` except where a single path step is already longer.
    """
    pts = [tuple(map(float, p)) for p in path]
    if not pts:
        return Route()
    if len(pts) == 1:
        return Route((Waypoint(pts[0], zone_radius),), max_spacing=max_spacing)
    longest_step = max(math.dist(a, b) for a, b in zip(pts, pts[1:]))
    limit = max(max_spacing, longest_step)

    kept: list[Point] = []
    anchor_index = 0
    for i in range(1, len(pts)):
        if math.dist(pts[anchor_index], pts[i]) > limit:
            anchor_index = i - 1 if i - 1 > anchor_index else i
            kept.append(pts[anchor_index])
    if not kept or kept[-1] != pts[-1]:
        kept.append(pts[-1])
    return Route(tuple(Waypoint(p, zone_radius) for p in kept), max_spacing=limit)


def obstacle_exclusion(grid: OccupancyGrid, points: np.ndarray, radius: float) -> np.ndarray:
    """
    Cells that may lie within ``radius`` of any obstacle point.

    Distances are measured between cell centers and widened by half a cell
    diagonal, so every cell center left out is farther than ``radius`` from
    every point. With ``radius`` equal to the zone radius, no waypoint placed
    on a remaining cell has an obstacle inside its detection zone.
    """
    mask = np.zeros((grid.height, grid.width), dtype=bool)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        return mask
    ix, iy, inside = world_to_grid_array(grid, pts)
    mask[iy[inside], ix[inside]] = True
    if not mask.any():
        return mask
    return distance_transform_edt(~mask, sampling=grid.resolution) <= radius + grid.resolution * HALF_DIAGONAL


def plan_route(
    grid: OccupancyGrid,
    start: Point,
    goal: Point,
    params: NavigationParams,
    obstacle_points: np.ndarray | None = None,
    blocked_zones: tuple[BlockedZone, ...] = (),
) -> NavState:
    """
    Plan from ``start`` to ``goal`` around the given obstacle points.

    Mode is FOLLOWING for a path with no obstacle exclusions, REROUTING for
    a path that avoids remembered obstacles and HALTED when no path exists.
    """
    points = np.zeros((0, 2)) if obstacle_points is None else np.asarray(obstacle_points, dtype=float)
    blocked = obstacle_exclusion(grid, points, params.zone_radius)
    if blocked.any():
        # Let a robot already inside an exclusion leave it, but never
        # through the obstacle footprint itself.
        footprint = obstacle_exclusion(grid, points, params.robot_radius + grid.resolution)
        blocked &= ~(grid.disc_mask(start, params.zone_radius) & ~footprint)
    path = plan_path(
        grid, blocked, start, goal, params.inflation_radius, start_clearance=params.robot_radius
    )
    if path is None:
        return NavState(NavMode.HALTED, Route(), blocked_zones)
    route = route_from_path(path.points, params.zone_radius, params.max_spacing)
    mode = NavMode.REROUTING if points.shape[0] else NavMode.FOLLOWING
    return NavState(mode, route, blocked_zones)


def reroute(
    nav: NavState,
    grid: OccupancyGrid,
    obstacles: list[ObstaclePoint],
    robot_pose: Pose2D,
    goal: Point,
    params: NavigationParams,
) -> NavState:
    """
    Replan around the current obstacles.

    The detection zones of the BLOCKED waypoints of the current route are
    recorded for rendering; the exclusion stamped into the planning grid is
    every cell whose zone would contain an obstacle.
    """
    route = check_zones(nav.active_route, obstacles)
    zones = tuple(
        BlockedZone(route.waypoints[i].position, route.waypoints[i].zone_radius)
        for i in route.blocked_indices(from_current=False)
    )
    points = np.array([o.position for o in obstacles], dtype=float).reshape(-1, 2)
    new_state = plan_route(grid, robot_pose.position, goal, params, points, zones or nav.blocked_zones)
    if new_state.mode is not nav.mode:
        logger.info("Navigation mode %s -> %s", nav.mode.value, new_state.mode.value)
    return new_state


def advance(nav: NavState, robot_pose: Pose2D, arrival_tolerance: float) -> tuple[NavState, Waypoint | None]:
    """
    Move the route index past every waypoint the robot is within tolerance of.

    Returns:
        Updated state and the waypoint now being pursued (None once
        ARRIVED or when not following a route).
    """
    if nav.mode not in (NavMode.FOLLOWING, NavMode.REROUTING) or not nav.active_route.waypoints:
        return nav, nav.target
    route = nav.active_route
    index = route.current_index
    last = len(route) - 1
    while robot_pose.distance_to(route.waypoints[index].position) <= arrival_tolerance:
        if index == last:
            logger.info("Navigation mode %s -> %s", nav.mode.value, NavMode.ARRIVED.value)
            return replace(nav, mode=NavMode.ARRIVED, active_route=route.with_index(index)), None
        index += 1
    if index != route.current_index:
        nav = replace(nav, active_route=route.with_index(index))
    return nav, nav.active_route.waypoints[index]


class Navigator:
    """
    Per-run navigation driver.

    Owns the obstacle memory and re-checks the detection zones on every scan.

    Params:
        grid: Reference map used for planning.
        goal: Goal position (m).
        params: Navigation tunables.
        distance_field: Distance field of ``grid``; computed when omitted.
    """

    def __init__(
        self,
        grid: OccupancyGrid,
        goal: Point,
        params: NavigationParams | None = None,
        distance_field: DistanceField | None = None,
    ) -> None:
        self.grid = grid
        self.goal = (float(goal[0]), float(goal[1]))
        self.params = params or NavigationParams()
        self.distance_field = distance_field or precompute_distance_field(grid)
        self.memory = ObstacleMemory(self.params.decay_steps)
        self.state = NavState(NavMode.HALTED)
        self.halts = 0
        self.transitions: list[dict] = []
        self._planned_version = -1
        self._last_mode: NavMode | None = None

    def start(self, pose: Pose2D, step: int = 0) -> NavState:
        """Plan the initial route from ``pose``."""
        self._set_state(plan_route(self.grid, pose.position, self.goal, self.params), step)
        self._planned_version = self.memory.version
        return self.state

    def step(self, pose: Pose2D, scan: LidarScan, step: int) -> tuple[NavState, Waypoint | None]:
        """
        Process one scan at the (estimated) robot pose.

        Returns:
            Navigation state and the waypoint to pursue, if any.
        """
        observed = filter_mapped(
            classify_obstacles(scan, pose), self.distance_field, self.params.mapped_tolerance
        )
        self.memory.update(observed, scan, pose, step)
        if self.state.mode is NavMode.ARRIVED:
            return self.state, None

        obstacles = self.memory.obstacles
        route = check_zones(self.state.active_route, obstacles)
        self.state = replace(self.state, active_route=route)

        memory_changed = self.memory.version != self._planned_version
        needs_plan = bool(route.blocked_indices()) or (
            memory_changed and self.state.mode in (NavMode.HALTED, NavMode.REROUTING)
        )
        if needs_plan:
            try:
                replanned = reroute(self.state, self.grid, obstacles, pose, self.goal, self.params)
            except EndpointBlockedError as exc:
                logger.warning("Replanning impossible, halting: %s", exc)
                replanned = NavState(NavMode.HALTED, Route(), self.state.blocked_zones)
            self._set_state(replanned, step)
            self._planned_version = self.memory.version

        nav, target = advance(self.state, pose, self.params.arrival_tolerance)
        self._set_state(nav, step)
        return self.state, target

    def _set_state(self, new_state: NavState, step: int) -> None:
        if new_state.mode is not self._last_mode:
            if new_state.mode is NavMode.HALTED:
                self.halts += 1
            self.transitions.append({"step": step, "mode": new_state.mode.value})
            self._last_mode = new_state.mode
        self.state = new_state

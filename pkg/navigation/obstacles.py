"""
Obstacle classification, detection-zone checks and obstacle memory.

Project role:
  Turns each scan into world-frame obstacle points, discards returns that
  coincide with mapped walls, and marks waypoints whose detection zone
  contains an unmapped obstacle as BLOCKED.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from geometry.pose import Pose2D, normalize_angles
from geometry.scan import LidarScan
from mcl.distance_field import DistanceField
from navigation.models import HeightClass, ObstaclePoint, Route, WaypointStatus

logger = logging.getLogger(__name__)

# Quantization used to de-duplicate remembered points (m).
MEMORY_CELL = 0.05
# A beam must pass this far beyond a remembered point to clear it (m).
CONTRADICTION_MARGIN = 0.1


@dataclass(frozen=True)
class GroundFilterConfig:
    """
    Height threshold for separating ground returns.

    A planar scan has no height channel, so every return is NON_GROUND; the
    threshold only applies when per-beam heights are supplied.
    """

    min_obstacle_height: float = 0.05


def classify_obstacles(
    scan: LidarScan,
    robot_pose: Pose2D,
    ground_filter: GroundFilterConfig | None = None,
    heights: np.ndarray | None = None,
) -> list[ObstaclePoint]:
    """
    Project scan returns into the world and classify them.

    Params:
        scan: Current scan.
        robot_pose: Sensor pose used for the projection.
        ground_filter: Height threshold config.
        heights: Optional per-beam heights (m), one per beam.

    Returns:
        One ObstaclePoint per beam with range < range_max.
    """
    hits = np.nonzero(scan.hit_mask)[0]
    if hits.size == 0:
        return []
    points = scan.endpoints(robot_pose, hits_only=True)
    if heights is None:
        classes = [HeightClass.NON_GROUND] * hits.size
    else:
        threshold = (ground_filter or GroundFilterConfig()).min_obstacle_height
        beam_heights = np.asarray(heights, dtype=float)[hits]
        classes = [
            HeightClass.NON_GROUND if h >= threshold else HeightClass.GROUND for h in beam_heights
        ]
    return [
        ObstaclePoint(position=(float(p[0]), float(p[1])), height_class=c)
        for p, c in zip(points, classes)
    ]


def filter_mapped(
    obstacles: list[ObstaclePoint],
    distance_field: DistanceField,
    tolerance: float,
) -> list[ObstaclePoint]:
    """Drop obstacles within ``tolerance`` of mapped structure; keep the unmapped ones."""
    if not obstacles:
        return []
    points = np.array([o.position for o in obstacles], dtype=float)
    keep = distance_field.lookup(points) > tolerance
    return [o for o, k in zip(obstacles, keep) if k]


def check_zones(route: Route, obstacles: list[ObstaclePoint]) -> Route:
    """
    Recompute every waypoint status from the given obstacles.

    A waypoint is BLOCKED iff a NON_GROUND obstacle lies strictly inside
    its zone radius (planar distance).
    """
    if not route.waypoints:
        return route
    solid = np.array(
        [o.position for o in obstacles if o.height_class is HeightClass.NON_GROUND], dtype=float
    ).reshape(-1, 2)
    updated = []
    for wp in route.waypoints:
        blocked = False
        if solid.shape[0]:
            d = np.hypot(solid[:, 0] - wp.position[0], solid[:, 1] - wp.position[1])
            blocked = bool((d < wp.zone_radius).any())
        status = WaypointStatus.BLOCKED if blocked else WaypointStatus.FREE
        updated.append(wp if wp.status is status else replace(wp, status=status))
    return replace(route, waypoints=tuple(updated))


class ObstacleMemory:
    """
    Unmapped obstacle points remembered across scans.

    A point is forgotten when a later beam along its bearing reads farther
    than the point (the space is seen through), or, when ``decay_steps`` is
    set, after that many steps without being observed again.
    """

    def __init__(self, decay_steps: int | None = None) -> None:
        self.decay_steps = decay_steps
        self._points: dict[tuple[int, int], tuple[tuple[float, float], int]] = {}
        self.version = 0

    def __len__(self) -> int:
        return len(self._points)

    @property
    def obstacles(self) -> list[ObstaclePoint]:
        return [ObstaclePoint(position=pos) for key, (pos, _) in sorted(self._points.items())]

    def points(self) -> np.ndarray:
        return np.array([pos for _, (pos, _) in sorted(self._points.items())], dtype=float).reshape(-1, 2)

    def clear(self) -> None:
        if self._points:
            self._points.clear()
            self.version += 1

    def update(self, observed: list[ObstaclePoint], scan: LidarScan, robot_pose: Pose2D, step: int) -> None:
        """Forget contradicted or stale points, then add the newly observed ones."""
        before = set(self._points)
        self._drop_contradicted(scan, robot_pose)
        if self.decay_steps is not None:
            stale = [k for k, (_, seen) in self._points.items() if step - seen > self.decay_steps]
            for key in stale:
                del self._points[key]
        for obstacle in observed:
            if obstacle.height_class is not HeightClass.NON_GROUND:
                continue
            x, y = obstacle.position
            key = (int(np.floor(x / MEMORY_CELL)), int(np.floor(y / MEMORY_CELL)))
            self._points[key] = ((x, y), step)
        if set(self._points) != before:
            self.version += 1
            logger.debug("Obstacle memory now holds %d points", len(self._points))

    def _drop_contradicted(self, scan: LidarScan, robot_pose: Pose2D) -> None:
        if not self._points or len(scan) == 0:
            return
        keys = list(self._points)
        pts = np.array([self._points[k][0] for k in keys], dtype=float)
        dx = pts[:, 0] - robot_pose.x
        dy = pts[:, 1] - robot_pose.y
        dist = np.hypot(dx, dy)
        rel = normalize_angles(np.arctan2(dy, dx) - robot_pose.theta - scan.angle_min)
        rel = np.where(rel < 0, rel + 2 * np.pi, rel)
        beam = np.rint(rel / scan.angle_increment).astype(np.int64)
        if len(scan) * scan.angle_increment >= 2 * np.pi - 1e-9:
            beam = beam % len(scan)
        covered = (beam >= 0) & (beam < len(scan))
        beam = np.clip(beam, 0, len(scan) - 1)
        seen_through = covered & (dist < scan.range_max) & (scan.ranges[beam] > dist + CONTRADICTION_MARGIN)
        for key, drop in zip(keys, seen_through):
            if drop:
                del self._points[key]

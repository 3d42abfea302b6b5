"""
Navigation data models.

Project role:
  Waypoints with cylindrical detection zones (a disc in 2D), routes,
  classified obstacle returns and the navigation mode machine state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

Point = tuple[float, float]

DEFAULT_ROBOT_RADIUS = 0.2
DEFAULT_ZONE_RADIUS = DEFAULT_ROBOT_RADIUS + 0.3
DEFAULT_INFLATION_RADIUS = DEFAULT_ROBOT_RADIUS
DEFAULT_ARRIVAL_TOLERANCE = 0.15
DEFAULT_MAX_SPACING = 0.5
DEFAULT_MAPPED_TOLERANCE = 0.15


class WaypointStatus(str, Enum):
    FREE = "FREE"
    BLOCKED = "BLOCKED"


class HeightClass(str, Enum):
    GROUND = "GROUND"
    NON_GROUND = "NON_GROUND"


class NavMode(str, Enum):
    FOLLOWING = "FOLLOWING"
    REROUTING = "REROUTING"
    HALTED = "HALTED"
    ARRIVED = "ARRIVED"


class EndpointBlockedError(ValueError):
    """
    A planning endpoint lies in an excluded cell.

    Attributes:
        endpoint: "start" or "goal".
    """

    def __init__(self, endpoint: str, detail: str = "") -> None:
        message = f"{endpoint} lies in an excluded cell"
        super().__init__(f"{message}: {detail}" if detail else message)
        self.endpoint = endpoint


@dataclass(frozen=True)
class Waypoint:
    position: Point
    zone_radius: float = DEFAULT_ZONE_RADIUS
    status: WaypointStatus = WaypointStatus.FREE

    def __post_init__(self) -> None:
        if not self.zone_radius > 0:
            raise ValueError("zone_radius must be positive")


@dataclass(frozen=True)
class Route:
    """
    Ordered waypoints and the index of the one being pursued.

    An empty route is allowed (used while HALTED).

    Raises:
        ValueError: If current_index is out of bounds or two consecutive
            waypoints are farther apart than ``max_spacing``.
    """

    waypoints: tuple[Waypoint, ...] = ()
    current_index: int = 0
    max_spacing: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        upper = max(len(self.waypoints) - 1, 0)
        if not 0 <= self.current_index <= upper:
            raise ValueError(f"current_index {self.current_index} out of bounds [0, {upper}]")
        if self.max_spacing is not None:
            for i in range(1, len(self.waypoints)):
                a, b = self.waypoints[i - 1].position, self.waypoints[i].position
                if math.dist(a, b) > self.max_spacing + 1e-9:
                    raise ValueError(f"waypoints {i - 1} and {i} exceed max_spacing {self.max_spacing}")

    def __len__(self) -> int:
        return len(self.waypoints)

    @property
    def current(self) -> Waypoint | None:
        return self.waypoints[self.current_index] if self.waypoints else None

    @property
    def is_final(self) -> bool:
        return self.current_index == len(self.waypoints) - 1

    def blocked_indices(self, from_current: bool = True) -> list[int]:
        start = self.current_index if from_current else 0
        return [
            i for i in range(start, len(self.waypoints))
            if self.waypoints[i].status is WaypointStatus.BLOCKED
        ]

    def with_index(self, index: int) -> Route:
        return replace(self, current_index=index)


@dataclass(frozen=True)
class ObstaclePoint:
    position: Point
    height_class: HeightClass = HeightClass.NON_GROUND


@dataclass(frozen=True)
class BlockedZone:
    """Detection zone of a waypoint found BLOCKED when a reroute was triggered."""

    center: Point
    radius: float


@dataclass(frozen=True)
class NavState:
    """
    Mode machine state.

    HALTED holds exactly when the latest planning attempt found no path;
    ARRIVED holds once the final waypoint was reached.
    """

    mode: NavMode
    active_route: Route = field(default_factory=Route)
    blocked_zones: tuple[BlockedZone, ...] = ()

    @property
    def target(self) -> Waypoint | None:
        if self.mode in (NavMode.HALTED, NavMode.ARRIVED):
            return None
        return self.active_route.current


@dataclass(frozen=True)
class NavigationParams:
    """
    Tunables of the waypoint navigator.

    Attributes:
        zone_radius: Detection zone radius around each waypoint (m).
        inflation_radius: Clearance stamped around mapped structure (m).
        robot_radius: Footprint radius (m).
        arrival_tolerance: Distance at which a waypoint counts as reached (m).
        max_spacing: Upper bound on waypoint spacing along a route (m).
        mapped_tolerance: Returns closer than this to mapped structure are
            treated as known walls (m).
        decay_steps: Forget remembered obstacles not seen for this many
            steps; None keeps them until a scan contradicts them.
    """

    zone_radius: float = DEFAULT_ZONE_RADIUS
    inflation_radius: float = DEFAULT_INFLATION_RADIUS
    robot_radius: float = DEFAULT_ROBOT_RADIUS
    arrival_tolerance: float = DEFAULT_ARRIVAL_TOLERANCE
    max_spacing: float = DEFAULT_MAX_SPACING
    mapped_tolerance: float = DEFAULT_MAPPED_TOLERANCE
    decay_steps: int | None = None

    def __post_init__(self) -> None:
        for name in ("zone_radius", "arrival_tolerance", "max_spacing"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("inflation_radius", "robot_radius", "mapped_tolerance"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.decay_steps is not None and self.decay_steps < 1:
            raise ValueError("decay_steps must be >= 1 when set")

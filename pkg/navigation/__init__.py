"""Waypoint navigation, detection zones and grid path planning."""

from navigation.controller import PursuitParams, pursuit_control
from navigation.models import (
    BlockedZone,
    EndpointBlockedError,
    HeightClass,
    NavigationParams,
    NavMode,
    NavState,
    ObstaclePoint,
    Route,
    Waypoint,
    WaypointStatus,
)
from navigation.navigator import Navigator, advance, plan_route, reroute, route_from_path
from navigation.obstacles import (
    GroundFilterConfig,
    ObstacleMemory,
    check_zones,
    classify_obstacles,
    filter_mapped,
)
from navigation.planner import PlannedPath, dijkstra_cost, inflate, path_cost, plan_path

__all__ = [
    "BlockedZone",
    "EndpointBlockedError",
    "GroundFilterConfig",
    "HeightClass",
    "NavMode",
    "NavState",
    "NavigationParams",
    "Navigator",
    "ObstacleMemory",
    "ObstaclePoint",
    "PlannedPath",
    "PursuitParams",
    "Route",
    "Waypoint",
    "WaypointStatus",
    "advance",
    "check_zones",
    "classify_obstacles",
    "dijkstra_cost",
    "filter_mapped",
    "inflate",
    "path_cost",
    "plan_path",
    "plan_route",
    "pursuit_control",
    "reroute",
    "route_from_path",
]

"""
Tests for navigation/navigator.py and navigation/obstacles.py -- detection
zones, rerouting, halting and waypoint progression.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from geometry.grid import CellState, OccupancyGrid
from geometry.pose import Pose2D
from geometry.scan import LidarScan
from mcl.distance_field import precompute_distance_field
from navigation.controller import PursuitParams, pursuit_control
from navigation.models import (
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
from navigation.obstacles import ObstacleMemory, check_zones, classify_obstacles, filter_mapped
from simulation.models import NoiseModel, ScanConfig
from simulation.sensors import synth_scan
from simulation.worlds import open_world

PARAMS = NavigationParams()


def _route(*points, radius: float = 0.5) -> Route:
    return Route(tuple(Waypoint(p, radius) for p in points))


def _ring(center, radius: float, count: int = 240) -> list[ObstaclePoint]:
    angles = 2.0 * math.pi * np.arange(count) / count
    return [
        ObstaclePoint((center[0] + radius * math.cos(a), center[1] + radius * math.sin(a)))
        for a in angles
    ]


@pytest.fixture()
def one_sided_corridor() -> OccupancyGrid:
    """8 m x 3 m corridor with a mapped block closing its upper half at x = 4."""
    grid = open_world(8.0, 3.0, resolution=0.1)
    mask = np.zeros((grid.height, grid.width), dtype=bool)
    mask[18:, 38:42] = True
    return grid.with_cells(mask, CellState.OCCUPIED)


class TestClassifyObstacles:
    """Tests for classify_obstacles()."""

    def test_no_returns(self):
        scan = LidarScan(0.0, math.pi / 2, 5.0, np.full(4, 5.0))
        assert classify_obstacles(scan, Pose2D(0, 0, 0)) == []

    def test_forward_beam(self):
        scan = LidarScan(0.0, math.pi / 2, 5.0, np.array([1.0, 5.0, 5.0, 5.0]))
        (obstacle,) = classify_obstacles(scan, Pose2D(0, 0, 0))
        assert obstacle.position == pytest.approx((1.0, 0.0))
        assert obstacle.height_class is HeightClass.NON_GROUND

    def test_rotated_robot(self):
        scan = LidarScan(0.0, math.pi / 2, 5.0, np.array([2.0, 5.0, 5.0, 5.0]))
        (obstacle,) = classify_obstacles(scan, Pose2D(1, 1, math.pi / 2))
        assert obstacle.position == pytest.approx((1.0, 3.0))

    def test_height_channel(self):
        scan = LidarScan(0.0, math.pi / 2, 5.0, np.array([1.0, 2.0, 5.0, 5.0]))
        obstacles = classify_obstacles(scan, Pose2D(0, 0, 0), heights=np.array([0.01, 0.5, 0.0, 0.0]))
        assert [o.height_class for o in obstacles] == [HeightClass.GROUND, HeightClass.NON_GROUND]


class TestCheckZones:
    """Tests for check_zones()."""

    def test_no_obstacles(self):
        route = check_zones(_route((0, 0), (1, 0)), [])
        assert all(w.status is WaypointStatus.FREE for w in route.waypoints)

    def test_obstacle_on_waypoint(self):
        route = check_zones(_route((0, 0), (1, 0)), [ObstaclePoint((1.0, 0.0))])
        assert [w.status for w in route.waypoints] == [WaypointStatus.FREE, WaypointStatus.BLOCKED]

    def test_boundary_is_exclusive(self):
        route = _route((0, 0), (3, 0))
        assert check_zones(route, [ObstaclePoint((1.5, 0.0))]).blocked_indices() == []
        assert check_zones(route, [ObstaclePoint((0.0, 0.5))]).blocked_indices() == []
        assert check_zones(route, [ObstaclePoint((0.0, 0.4999))]).blocked_indices() == [0]

    def test_ground_points_ignored(self):
        route = check_zones(_route((0, 0)), [ObstaclePoint((0.0, 0.0), HeightClass.GROUND)])
        assert route.blocked_indices() == []

    def test_statuses_recomputed(self):
        blocked = check_zones(_route((0, 0)), [ObstaclePoint((0.1, 0.0))])
        assert check_zones(blocked, []).waypoints[0].status is WaypointStatus.FREE
        assert check_zones(blocked, [ObstaclePoint((0.1, 0.0))]) == blocked


class TestFilterMapped:
    """Tests for filter_mapped()."""

    def test_drops_wall_returns(self, room):
        field = precompute_distance_field(room)
        kept = filter_mapped([ObstaclePoint((0.1, 3.0)), ObstaclePoint((3.0, 3.0))], field, 0.15)
        assert [o.position for o in kept] == [(3.0, 3.0)]


class TestRouteFromPath:
    """Tests for route_from_path()."""

    def test_spacing_and_endpoints(self):
        path = [(0.05 + 0.1 * i, 1.0) for i in range(31)]
        route = route_from_path(path, 0.5, 0.5)
        positions = [w.position for w in route.waypoints]
        assert positions[-1] == pytest.approx(path[-1])
        assert positions[0] != path[0]
        steps = [math.dist(a, b) for a, b in zip([path[0], *positions], positions)]
        assert max(steps) <= 0.5 + 1e-9

    def test_single_cell(self):
        route = route_from_path([(1.0, 1.0)], 0.5, 0.5)
        assert [w.position for w in route.waypoints] == [(1.0, 1.0)]

    def test_empty(self):
        assert len(route_from_path([], 0.5, 0.5)) == 0

    def test_route_rejects_wide_spacing(self):
        with pytest.raises(ValueError, match="max_spacing"):
            Route((Waypoint((0, 0)), Waypoint((1, 0))), max_spacing=0.5)


class TestAdvance:
    """Tests for advance()."""

    def test_final_waypoint_arrives(self):
        nav = NavState(NavMode.FOLLOWING, _route((0, 0), (1, 0)).with_index(1))
        nav, target = advance(nav, Pose2D(1.05, 0.0, 0.0), 0.15)
        assert nav.mode is NavMode.ARRIVED
        assert target is None

    def test_far_robot_keeps_index(self):
        nav = NavState(NavMode.FOLLOWING, _route((0, 0), (1, 0), (2, 0)))
        out, target = advance(nav, Pose2D(-1.0, 0.0, 0.0), 0.15)
        assert out.active_route.current_index == 0
        assert target.position == (0, 0)

    def test_passes_two_waypoints(self):
        nav = NavState(NavMode.REROUTING, _route((0, 0), (0.1, 0), (2, 0)))
        out, target = advance(nav, Pose2D(0.05, 0.0, 0.0), 0.15)
        assert out.active_route.current_index == 2
        assert target.position == (2, 0)
        assert out.mode is NavMode.REROUTING

    def test_halted_is_untouched(self):
        nav = NavState(NavMode.HALTED)
        assert advance(nav, Pose2D(0, 0, 0), 0.15) == (nav, None)


class TestReroute:
    """Tests for plan_route() and reroute()."""

    def test_initial_route_is_following(self, one_sided_corridor):
        nav = plan_route(one_sided_corridor, (1.0, 1.5), (7.0, 1.5), PARAMS)
        assert nav.mode is NavMode.FOLLOWING
        assert nav.active_route.waypoints[-1].position == pytest.approx((7.05, 1.55))

    def test_detour_takes_open_side(self, one_sided_corridor):
        goal = (7.0, 1.5)
        nav = plan_route(one_sided_corridor, (1.0, 1.5), goal, PARAMS)
        obstacles = _ring((4.0, 1.5), 0.15, count=24)
        out = reroute(nav, one_sided_corridor, obstacles, Pose2D(1.0, 1.5, 0.0), goal, PARAMS)
        assert out.mode is NavMode.REROUTING
        assert out.blocked_zones
        near_obstacle = [w.position for w in out.active_route.waypoints if 3.5 <= w.position[0] <= 4.5]
        assert near_obstacle
        assert all(y < 1.5 for _, y in near_obstacle)
        assert check_zones(out.active_route, obstacles).blocked_indices(from_current=False) == []

    def test_enclosure_halts_then_recovers(self):
        room = open_world(6.0, 6.0, resolution=0.1)
        nav = plan_route(room, (3.0, 3.0), (5.0, 5.0), PARAMS)
        robot = Pose2D(3.0, 3.0, 0.0)
        halted = reroute(nav, room, _ring((3.0, 3.0), 0.8), robot, (5.0, 5.0), PARAMS)
        assert halted.mode is NavMode.HALTED
        assert halted.target is None
        resumed = reroute(halted, room, [], robot, (5.0, 5.0), PARAMS)
        assert resumed.mode is NavMode.FOLLOWING
        assert len(resumed.active_route) > 0


class TestObstacleMemory:
    """Tests for ObstacleMemory."""

    def test_remembers_and_deduplicates(self):
        memory = ObstacleMemory()
        scan = LidarScan(0.0, math.pi / 2, 5.0, np.full(4, 5.0))
        memory.update([ObstaclePoint((1.01, 0.01)), ObstaclePoint((1.02, 0.02))], scan, Pose2D(9, 9, 0), 0)
        assert len(memory) == 1
        assert memory.version == 1

    def test_seen_through_point_is_forgotten(self):
        memory = ObstacleMemory()
        blocked = LidarScan(0.0, math.pi / 2, 5.0, np.array([1.0, 5.0, 5.0, 5.0]))
        memory.update([ObstaclePoint((1.0, 0.0))], blocked, Pose2D(0, 0, 0), 0)
        clear = LidarScan(0.0, math.pi / 2, 5.0, np.full(4, 5.0))
        memory.update([], clear, Pose2D(0, 0, 0), 1)
        assert len(memory) == 0
        assert memory.version == 2

    def test_decay(self):
        memory = ObstacleMemory(decay_steps=2)
        behind = LidarScan(0.0, math.pi / 2, 5.0, np.full(4, 0.5))
        memory.update([ObstaclePoint((3.0, 0.0))], behind, Pose2D(0, 0, 0), 0)
        memory.update([], behind, Pose2D(0, 0, 0), 2)
        assert len(memory) == 1
        memory.update([], behind, Pose2D(0, 0, 0), 3)
        assert len(memory) == 0


class TestNavigator:
    """Tests for the per-run Navigator."""

    def test_clear_room_follows(self, room):
        navigator = Navigator(room, (5.0, 3.0))
        assert navigator.start(Pose2D(1.0, 3.0, 0.0)).mode is NavMode.FOLLOWING
        scan = synth_scan(Pose2D(1.0, 3.0, 0.0), room, ScanConfig(beam_count=90, angle_increment=math.radians(4)),
                          NoiseModel(), np.random.Generator(np.random.PCG64(0)))
        state, target = navigator.step(Pose2D(1.0, 3.0, 0.0), scan, 0)
        assert state.mode is NavMode.FOLLOWING
        assert target is not None
        assert navigator.transitions == [{"step": 0, "mode": "FOLLOWING"}]

    def test_unmapped_obstacle_triggers_reroute(self, room):
        world = room.stamp_disc((3.0, 3.0), 0.3, CellState.OCCUPIED)
        navigator = Navigator(room, (5.0, 3.0))
        pose = Pose2D(1.5, 3.0, 0.0)
        navigator.start(pose)
        scan = synth_scan(pose, world, ScanConfig(beam_count=180, angle_increment=math.radians(2)),
                          NoiseModel(), np.random.Generator(np.random.PCG64(0)))
        state, target = navigator.step(pose, scan, 3)
        assert state.mode is NavMode.REROUTING
        assert state.blocked_zones
        assert navigator.transitions[-1] == {"step": 3, "mode": "REROUTING"}
        assert check_zones(state.active_route, navigator.memory.obstacles).blocked_indices() == []


class TestPursuitControl:
    """Tests for pursuit_control()."""

    def test_stop_without_target(self):
        u = pursuit_control(Pose2D(0, 0, 0), None, PursuitParams(), 0.1)
        assert (u.linear_velocity, u.angular_velocity) == (0.0, 0.0)

    def test_drives_at_target_ahead(self):
        u = pursuit_control(Pose2D(0, 0, 0), (5.0, 0.0), PursuitParams(), 0.1)
        assert u.linear_velocity == pytest.approx(0.5)
        assert u.angular_velocity == pytest.approx(0.0)

    def test_turns_in_place_when_facing_away(self):
        u = pursuit_control(Pose2D(0, 0, 0), (-5.0, 0.1), PursuitParams(), 0.1)
        assert u.linear_velocity == 0.0
        assert abs(u.angular_velocity) == pytest.approx(1.5)

    def test_no_overshoot(self):
        u = pursuit_control(Pose2D(0, 0, 0), (0.02, 0.0), PursuitParams(), 0.1)
        assert u.linear_velocity == pytest.approx(0.2)

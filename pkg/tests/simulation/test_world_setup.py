"""
Tests for simulation/rng.py, maneuvers.py, obstacles.py, worlds.py and the clock.
"""

from __future__ import annotations

import json

import numpy as np
import pytest

from geometry.grid import CellState, world_to_grid
from simulation.maneuvers import ManeuverFormatError, load_maneuvers, parse_maneuvers
from simulation.models import ControlInput, ObstacleEvent, SimClock
from simulation.obstacles import apply_obstacle_events
from simulation.rng import STREAM_NAMES, make_streams
from simulation.worlds import BUILTIN_WORLDS, get_builtin_world


class TestMakeStreams:
    """Tests for make_streams()."""

    def test_same_seed_same_draws(self):
        a, b = make_streams(42), make_streams(42)
        for name in STREAM_NAMES:
            np.testing.assert_array_equal(getattr(a, name).random(8), getattr(b, name).random(8))

    def test_streams_are_independent(self):
        a, b = make_streams(42), make_streams(42)
        a.lidar.normal(size=1000)
        np.testing.assert_array_equal(a.encoders.random(16), b.encoders.random(16))

    def test_named_streams_differ(self):
        streams = make_streams(1)
        assert not np.array_equal(streams.encoders.random(8), streams.lidar.random(8))

    def test_different_seeds_differ(self):
        assert not np.array_equal(make_streams(1).lidar.random(8), make_streams(2).lidar.random(8))

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_rejects_out_of_range_seed(self, seed):
        with pytest.raises(ValueError, match="seed"):
            make_streams(seed)


class TestParseManeuvers:
    """Tests for parse_maneuvers() and load_maneuvers()."""

    def test_parses_records(self):
        controls = parse_maneuvers([{"v": 0.5, "omega": 0.1, "dt": 0.2}, {"v": 0, "omega": 1, "dt": 1}])
        assert controls == [ControlInput(0.5, 0.1, 0.2), ControlInput(0.0, 1.0, 1.0)]

    def test_not_a_list(self):
        with pytest.raises(ManeuverFormatError, match="array"):
            parse_maneuvers({"v": 1})

    def test_missing_key_names_record(self):
        with pytest.raises(ManeuverFormatError, match=r"record 1: missing dt"):
            parse_maneuvers([{"v": 1, "omega": 0, "dt": 0.1}, {"v": 1, "omega": 0}])

    def test_bad_dt_names_record(self):
        with pytest.raises(ManeuverFormatError, match="record 0"):
            parse_maneuvers([{"v": 1, "omega": 0, "dt": 0}])

    def test_non_numeric_value(self):
        with pytest.raises(ManeuverFormatError, match="record 0"):
            parse_maneuvers([{"v": "fast", "omega": 0, "dt": 0.1}])

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps([{"v": 1.0, "omega": 0.0, "dt": 0.1}]), encoding="utf-8")
        assert load_maneuvers(path) == [ControlInput(1.0, 0.0, 0.1)]

    def test_load_invalid_json(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("[{", encoding="utf-8")
        with pytest.raises(ManeuverFormatError, match="invalid JSON"):
            load_maneuvers(path)


class TestObstacleEvents:
    """Tests for apply_obstacle_events()."""

    def test_add_then_remove_restores_layout(self, room):
        events = [
            ObstacleEvent(2, "add", (3.0, 3.0), 0.4),
            ObstacleEvent(5, "remove", (3.0, 3.0), 0.4),
        ]
        world = apply_obstacle_events(room, room, events, 2)
        assert world.cells[world_to_grid(world, (3.0, 3.0))[::-1]] == CellState.OCCUPIED
        assert room.cells[world_to_grid(room, (3.0, 3.0))[::-1]] == CellState.FREE
        world = apply_obstacle_events(world, room, events, 5)
        np.testing.assert_array_equal(world.cells, room.cells)

    def test_other_steps_do_nothing(self, room):
        events = [ObstacleEvent(2, "add", (3.0, 3.0), 0.4)]
        assert apply_obstacle_events(room, room, events, 3) is room

    def test_remove_keeps_layout_walls(self, room):
        events = [ObstacleEvent(0, "remove", (0.05, 3.0), 0.3)]
        world = apply_obstacle_events(room, room, events, 0)
        np.testing.assert_array_equal(world.cells, room.cells)

    def test_event_validation(self):
        with pytest.raises(ValueError, match="action"):
            ObstacleEvent(0, "move", (0.0, 0.0), 1.0)
        with pytest.raises(ValueError, match="radius"):
            ObstacleEvent(0, "add", (0.0, 0.0), 0.0)


class TestSimClock:
    """Tests for SimClock.tick()."""

    def test_tick_advances(self):
        clock = SimClock(step_duration=0.1).tick().tick(0.5)
        assert clock.step_index == 2
        assert clock.elapsed_s == pytest.approx(0.6)

    def test_rejects_wide_seed(self):
        with pytest.raises(ValueError, match="rng_seed"):
            SimClock(rng_seed=2**64)


class TestBuiltinWorlds:
    """Tests for get_builtin_world()."""

    @pytest.mark.parametrize("name", sorted(BUILTIN_WORLDS))
    def test_bordered(self, name):
        grid = get_builtin_world(name)
        assert (grid.cells[0, :] == CellState.OCCUPIED).all()
        assert (grid.cells[:, -1] == CellState.OCCUPIED).all()
        assert (grid.cells == CellState.FREE).any()

    def test_four_rooms_size(self):
        grid = get_builtin_world("four_rooms")
        assert (grid.width, grid.height, grid.resolution) == (200, 200, 0.05)

    def test_corridor_centerline_free(self):
        grid = get_builtin_world("corridor")
        for x in (0.6, 5.0, 9.4):
            ix, iy = world_to_grid(grid, (x, 1.2))
            assert grid.cells[iy, ix] == CellState.FREE

    def test_unknown_name(self):
        with pytest.raises(KeyError, match="unknown builtin world"):
            get_builtin_world("maze")

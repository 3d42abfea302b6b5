"""
Tests for harness/cli.py -- subcommands and exit codes.

Logging is redirected to a temporary file and the root logger's handlers
are restored after every test.
"""

from __future__ import annotations

import json
import logging
import math

import numpy as np
import pytest

from geometry.grid import CellState, OccupancyGrid
from geometry.map_io import save_map
from harness.cli import EXIT_GOAL_NOT_REACHED, EXIT_INVALID, EXIT_OK, EXIT_RUNTIME, main

OFF = {"mcl": {"enabled": False}, "ndt": {"enabled": False}, "fusion": {"enabled": False}}


@pytest.fixture(autouse=True)
def cli_env(tmp_path, monkeypatch):
    monkeypatch.setenv("LOCNAV_LOG_FILE", str(tmp_path / "logs" / "locnav.log"))
    monkeypatch.setenv("LOCNAV_OUTPUT_DIR", str(tmp_path / "default-runs"))
    monkeypatch.delenv("LOCNAV_JOBS", raising=False)
    root = logging.getLogger()
    saved_handlers, saved_level = list(root.handlers), root.level
    yield
    for handler in root.handlers:
        if handler not in saved_handlers:
            handler.close()
    root.handlers = saved_handlers
    root.setLevel(saved_level)


def write_scenario(directory, name="unit", **overrides):
    payload = {
        "schema_version": 1,
        "name": name,
        "initial_pose": [1.0, 3.0, 0.0],
        "map": {"builtin": "open"},
        "maneuvers": [{"v": 1.0, "omega": 0.0, "dt": 0.1}] * 5,
        **OFF,
    }
    payload.update(overrides)
    if "navigation" in overrides:
        payload.pop("maneuvers")
    path = directory / f"{name}.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestSimulate:
    """Tests for the simulate subcommand."""

    def test_success(self, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["simulate", "--scenario", str(write_scenario(tmp_path)), "--out", str(out)]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["steps"] == 5
        assert summary["goal_reached"] is False
        assert set(summary["ate_rmse"]) == {"odo"}
        assert (out / "run.csv").is_file()
        assert (tmp_path / "logs" / "locnav.log").is_file()

    def test_default_output_dir(self, tmp_path):
        assert main(["simulate", "--scenario", str(write_scenario(tmp_path, name="named"))]) == EXIT_OK
        assert (tmp_path / "default-runs" / "named" / "metrics.json").is_file()

    def test_seed_override(self, tmp_path):
        out = tmp_path / "run"
        main(["simulate", "--scenario", str(write_scenario(tmp_path)), "--out", str(out), "--seed", "42"])
        echo = json.loads((out / "scenario-echo.json").read_text(encoding="utf-8"))
        assert echo["seed"] == 42

    def test_invalid_scenario(self, tmp_path, capsys):
        path = write_scenario(tmp_path, initial_pose=[0.01, 0.01, 0.0])
        assert main(["simulate", "--scenario", str(path)]) == EXIT_INVALID
        err = capsys.readouterr().err
        assert err.startswith("Error: invalid scenario:")
        assert "initial_pose: not in a FREE cell" in err

    def test_runtime_failure(self, tmp_path, capsys):
        path = write_scenario(
            tmp_path, initial_pose=[5.5, 3.0, 0.0], maneuvers=[{"v": 1.0, "omega": 0.0, "dt": 1.0}]
        )
        assert main(["simulate", "--scenario", str(path), "--out", str(tmp_path / "run")]) == EXIT_RUNTIME
        assert "simulation failed at step 0" in capsys.readouterr().err

    def test_goal_not_reached(self, tmp_path, capsys):
        path = write_scenario(
            tmp_path,
            initial_pose=[1.0, 1.0, 0.0],
            step_limit=1,
            navigation={"goal": [5.0, 5.0], "pose_source": "truth"},
            require_goal=True,
        )
        assert main(["simulate", "--scenario", str(path), "--out", str(tmp_path / "run")]) == EXIT_GOAL_NOT_REACHED
        assert "goal not reached" in capsys.readouterr().err


class TestPlan:
    """Tests for the plan subcommand."""

    def test_builtin_diagonal(self, capsys):
        assert main(["plan", "--builtin", "open", "--start", "1,1", "--goal", "5,5"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["reachable"] is True
        assert payload["cells"] == 81
        assert payload["cost_m"] == pytest.approx(80 * math.sqrt(2) * 0.05, abs=1e-6)
        assert payload["waypoints"][-1] == pytest.approx([5.025, 5.025])

    def test_walled_in_goal(self, tmp_path, capsys):
        mask = np.zeros((60, 60), dtype=bool)
        mask[35:46, 35] = mask[35:46, 45] = True
        mask[35, 35:46] = mask[45, 35:46] = True
        grid = OccupancyGrid.filled(60, 60, 0.1).with_cells(mask, CellState.OCCUPIED)
        save_map(grid, tmp_path / "m.pgm", tmp_path / "m.json")
        args = ["plan", "--map", str(tmp_path / "m.pgm"), "--meta", str(tmp_path / "m.json"),
                "--start", "1.05,1.05", "--goal", "4.05,4.05"]
        assert main(args) == EXIT_OK
        assert json.loads(capsys.readouterr().out) == {"reachable": False}

    def test_blocked_goal(self, capsys):
        assert main(["plan", "--builtin", "open", "--start", "1,1", "--goal", "0.02,3"]) == EXIT_INVALID
        assert "goal lies in an excluded cell" in capsys.readouterr().err

    def test_goal_off_map(self, capsys):
        assert main(["plan", "--builtin", "open", "--start", "1,1", "--goal", "9,3"]) == EXIT_INVALID
        assert "outside the map" in capsys.readouterr().err

    def test_needs_a_map(self, capsys):
        assert main(["plan", "--start", "1,1", "--goal", "2,2"]) == EXIT_INVALID
        assert "--builtin" in capsys.readouterr().err

    def test_bad_point(self):
        with pytest.raises(SystemExit):
            main(["plan", "--builtin", "open", "--start", "1;1", "--goal", "2,2"])


class TestRender:
    """Tests for the render subcommand."""

    def test_rerender_with_html(self, tmp_path, capsys):
        out = tmp_path / "run"
        main(["simulate", "--scenario", str(write_scenario(tmp_path)), "--out", str(out)])
        (out / "render.svg").unlink()
        capsys.readouterr()
        assert main(["render", "--run", str(out), "--html"]) == EXIT_OK
        assert (out / "render.svg").is_file()
        assert (out / "render.html").is_file()
        assert capsys.readouterr().out.splitlines() == [str(out / "render.svg"), str(out / "render.html")]

    def test_empty_run(self, tmp_path, capsys):
        out = tmp_path / "run"
        main(["simulate", "--scenario", str(write_scenario(tmp_path, step_limit=0)), "--out", str(out)])
        assert main(["render", "--run", str(out)]) == EXIT_INVALID
        assert "no steps" in capsys.readouterr().err

    def test_missing_run(self, tmp_path, capsys):
        assert main(["render", "--run", str(tmp_path / "absent")]) == EXIT_INVALID
        assert "cannot read run directory" in capsys.readouterr().err


class TestBatch:
    """Tests for the batch subcommand."""

    def test_all_ok(self, tmp_path):
        src = tmp_path / "scenarios"
        src.mkdir()
        write_scenario(src, name="one")
        write_scenario(src, name="two", seed=3)
        assert main(["batch", "--scenarios", str(src), "--out", str(tmp_path / "b"), "--jobs", "2"]) == EXIT_OK
        assert (tmp_path / "b" / "one" / "run.csv").is_file()
        assert (tmp_path / "b" / "two" / "run.csv").is_file()

    def test_invalid_wins(self, tmp_path):
        src = tmp_path / "scenarios"
        src.mkdir()
        write_scenario(src, name="good")
        write_scenario(src, name="bad", seed=-1)
        write_scenario(src, name="crash", initial_pose=[5.5, 3.0, 0.0],
                       maneuvers=[{"v": 1.0, "omega": 0.0, "dt": 1.0}])
        assert main(["batch", "--scenarios", str(src), "--out", str(tmp_path / "b")]) == EXIT_INVALID

    def test_runtime_failure(self, tmp_path):
        src = tmp_path / "scenarios"
        src.mkdir()
        write_scenario(src, name="crash", initial_pose=[5.5, 3.0, 0.0],
                       maneuvers=[{"v": 1.0, "omega": 0.0, "dt": 1.0}])
        assert main(["batch", "--scenarios", str(src), "--out", str(tmp_path / "b")]) == EXIT_RUNTIME

    def test_empty_directory(self, tmp_path, capsys):
        assert main(["batch", "--scenarios", str(tmp_path)]) == EXIT_INVALID
        assert "no scenario files" in capsys.readouterr().err

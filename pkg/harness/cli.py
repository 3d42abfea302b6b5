"""
Command-line entry point.

Usage:
    python -m harness simulate --scenario scenarios/four_rooms_mcl.json [--out runs/x] [--seed 7]
    python -m harness plan --map map.pgm --meta map.json --start 1,1 --goal 8,8
    python -m harness plan --builtin corridor --start 0.6,1.2 --goal 9.4,1.2
    python -m harness batch --scenarios scenarios --out runs/batch --jobs 4
    python -m harness render --run runs/x [--html]

Exit codes: 0 success, 1 validation error, 2 runtime failure,
3 goal not reached (simulate with ``require_goal``).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from config.env import get_runtime_settings, load_environment
from geometry.grid import OutOfMapError
from geometry.map_io import MapParseError, load_map
from harness.batch import find_scenarios, run_batch
from harness.figures import build_trajectory_figure, write_trajectory_html
from harness.records import read_run_csv
from harness.render import render_svg
from harness.runner import SimulationRuntimeError, run_scenario
from harness.scenario import ScenarioValidationError, load_scenario, resolve_map, validate_scenario
from navigation.models import (
    DEFAULT_INFLATION_RADIUS,
    DEFAULT_MAX_SPACING,
    DEFAULT_ROBOT_RADIUS,
    DEFAULT_ZONE_RADIUS,
    EndpointBlockedError,
)
from navigation.navigator import route_from_path
from navigation.planner import plan_path
from observability.logging_config import configure_logging
from simulation.worlds import BUILTIN_WORLDS, get_builtin_world

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_GOAL_NOT_REACHED = 3


def _point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    return (x, y)


def _error(message: str) -> None:
    print(f"Error: {message}", file=sys.stderr)


def _simulate(args: argparse.Namespace, output_root: str) -> int:
    try:
        scenario = load_scenario(args.scenario, seed=args.seed)
    except ScenarioValidationError as exc:
        _error(str(exc))
        return EXIT_INVALID
    out_dir = Path(args.out) if args.out else Path(output_root) / scenario.name
    try:
        result = run_scenario(scenario, Path(args.scenario).parent, out_dir)
    except SimulationRuntimeError as exc:
        _error(f"simulation failed at {exc}")
        return EXIT_RUNTIME

    metrics = result.metrics
    summary = {
        "out": str(out_dir),
        "steps": metrics.steps,
        "goal_reached": metrics.goal_reached,
        "ate_rmse": {name: m.ate_rmse for name, m in metrics.estimators.items()},
    }
    print(json.dumps(summary, indent=2))
    if scenario.require_goal and not metrics.goal_reached:
        _error("goal not reached")
        return EXIT_GOAL_NOT_REACHED
    return EXIT_OK


def _plan(args: argparse.Namespace) -> int:
    try:
        if args.builtin:
            grid = get_builtin_world(args.builtin)
        elif args.map and args.meta:
            grid = load_map(args.map, args.meta)
        else:
            _error("plan needs --map and --meta, or --builtin")
            return EXIT_INVALID
    except (MapParseError, KeyError) as exc:
        _error(str(exc))
        return EXIT_INVALID

    try:
        path = plan_path(grid, None, args.start, args.goal, args.inflation, start_clearance=args.robot_radius)
    except (OutOfMapError, EndpointBlockedError) as exc:
        _error(str(exc))
        return EXIT_INVALID

    if path is None:
        print(json.dumps({"reachable": False}, indent=2))
        return EXIT_OK
    route = route_from_path(path.points, args.zone_radius, args.max_spacing)
    payload = {
        "reachable": True,
        "cost_m": round(path.cost * grid.resolution, 6),
        "cells": len(path.cells),
        "waypoints": [[round(x, 6), round(y, 6)] for x, y in (wp.position for wp in route.waypoints)],
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _batch(args: argparse.Namespace, output_root: str, default_jobs: int) -> int:
    paths = find_scenarios(args.scenarios)
    if not paths:
        _error(f"no scenario files in {args.scenarios}")
        return EXIT_INVALID
    out_dir = Path(args.out) if args.out else Path(output_root) / "batch"
    entries = run_batch(paths, out_dir, args.jobs or default_jobs)
    for entry in entries:
        print(f"{entry['status']:8s} {entry['scenario']}")
    statuses = {e["status"] for e in entries}
    if "invalid" in statuses:
        return EXIT_INVALID
    if "failed" in statuses:
        return EXIT_RUNTIME
    return EXIT_OK


def _render(args: argparse.Namespace) -> int:
    run_dir = Path(args.run)
    try:
        echo = json.loads((run_dir / "scenario-echo.json").read_text(encoding="utf-8"))
        scenario = validate_scenario(echo, run_dir)
        run = read_run_csv(run_dir / "run.csv")
        events_path = run_dir / "events.json"
        events = json.loads(events_path.read_text(encoding="utf-8")) if events_path.is_file() else {}
    except (OSError, json.JSONDecodeError) as exc:
        _error(f"cannot read run directory {run_dir}: {exc}")
        return EXIT_INVALID
    except ScenarioValidationError as exc:
        _error(str(exc))
        return EXIT_INVALID
    if run.empty:
        _error("run has no steps to render")
        return EXIT_INVALID

    grid = resolve_map(scenario, run_dir)
    zones = [(tuple(z["center"]), z["radius"]) for z in events.get("blocked_zones", [])]
    waypoints = [tuple(p) for p in events.get("route", [])]
    (run_dir / "render.svg").write_text(render_svg(grid, run, zones, waypoints), encoding="utf-8")
    written = [str(run_dir / "render.svg")]
    if args.html:
        write_trajectory_html(build_trajectory_figure(grid, run, zones), run_dir / "render.html")
        written.append(str(run_dir / "render.html"))
    print("\n".join(written))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harness",
        description="Deterministic 2D localization and navigation simulator.",
    )
    parser.add_argument("--verbose", action="store_true", help="Also log to stderr.")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Run one scenario.")
    simulate.add_argument("--scenario", required=True, help="Scenario JSON file.")
    simulate.add_argument("--out", default=None, help="Run directory (default: $LOCNAV_OUTPUT_DIR/<name>).")
    simulate.add_argument("--seed", type=int, default=None, help="Override the scenario seed.")

    plan = sub.add_parser("plan", help="Plan a path on a map and print it as JSON.")
    plan.add_argument("--map", default=None, help="PGM occupancy image.")
    plan.add_argument("--meta", default=None, help="JSON metadata sidecar.")
    plan.add_argument("--builtin", default=None, choices=sorted(BUILTIN_WORLDS), help="Built-in world instead of a file.")
    plan.add_argument("--start", type=_point, required=True, help="Start as x,y in meters.")
    plan.add_argument("--goal", type=_point, required=True, help="Goal as x,y in meters.")
    plan.add_argument("--inflation", type=float, default=DEFAULT_INFLATION_RADIUS, help="Inflation radius (m).")
    plan.add_argument("--robot-radius", type=float, default=DEFAULT_ROBOT_RADIUS, help="Start clearance (m).")
    plan.add_argument("--zone-radius", type=float, default=DEFAULT_ZONE_RADIUS, help="Waypoint zone radius (m).")
    plan.add_argument("--max-spacing", type=float, default=DEFAULT_MAX_SPACING, help="Waypoint spacing (m).")

    batch = sub.add_parser("batch", help="Run every scenario in a directory.")
    batch.add_argument("--scenarios", required=True, help="Directory of scenario JSON files.")
    batch.add_argument("--out", default=None, help="Batch directory (default: $LOCNAV_OUTPUT_DIR/batch).")
    batch.add_argument("--jobs", type=int, default=None, help="Worker processes (default: $LOCNAV_JOBS).")

    render = sub.add_parser("render", help="Re-render a run directory.")
    render.add_argument("--run", required=True, help="Run directory written by simulate.")
    render.add_argument("--html", action="store_true", help="Also write an interactive render.html.")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    load_environment()
    settings = get_runtime_settings()
    configure_logging(log_file_path=settings.log_file, level=settings.log_level, console=args.verbose)
    logger.info("Command %s", args.command)

    if args.command == "simulate":
        return _simulate(args, settings.output_dir)
    if args.command == "plan":
        return _plan(args)
    if args.command == "batch":
        return _batch(args, settings.output_dir, settings.jobs)
    return _render(args)


if __name__ == "__main__":
    sys.exit(main())

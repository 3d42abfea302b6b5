"""
Scenario runner.

Project role:
  Drives one deterministic run: truth -> sensors -> localizers (odometry,
  MCL, NDT) -> fusion -> navigation -> control, then computes metrics and
  writes the run directory (run.csv, metrics.json, render.svg,
  scenario-echo.json, events.json).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fusion.kalman import step_fused
from fusion.models import DegenerateInnovationError, FusedState, MeasurementModel, ProcessNoise
from geometry.grid import OccupancyGrid, OutOfMapError, world_to_grid
from geometry.pose import Pose2D
from harness.metrics import MetricsReport, compute_metrics
from harness.records import RunRecord, StepRow, write_run_csv
from harness.render import render_svg
from harness.scenario import Scenario, resolve_map, resolve_maneuvers, scenario_echo
from mcl.distance_field import precompute_distance_field
from mcl.localizer import MclConfig, MonteCarloLocalizer
from mcl.models import DegenerateWeightsError, LikelihoodFieldParams, MotionNoiseParams, NoFreeCellsError
from navigation.controller import PursuitParams, pursuit_control
from navigation.models import EndpointBlockedError, NavigationParams, NavMode
from navigation.navigator import Navigator
from ndt.matcher import ndt_align
from ndt.models import NdtNumericalError, NdtResult, SparseReferenceError
from ndt.reference import build_map_ndt, scan_to_points
from odometry.kinematics import integrate_pose, wheel_delta
from odometry.models import WheelGeometry
from simulation.models import NoiseModel, ObstacleEvent, ScanConfig, SimClock
from simulation.obstacles import apply_obstacle_events
from simulation.rng import make_streams
from simulation.sensors import synth_encoders, synth_scan
from simulation.truth import step_truth

logger = logging.getLogger(__name__)


class SimulationRuntimeError(RuntimeError):
    """
    A run aborted on a numerical or geometric failure.

    Attributes:
        step: Step index at which the failure happened.
    """

    def __init__(self, message: str, step: int) -> None:
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass
class RunResult:
    """Everything a run produced, before or after being written to disk."""

    scenario: Scenario
    grid: OccupancyGrid
    record: RunRecord
    metrics: MetricsReport
    events: dict = field(default_factory=dict)

    @property
    def blocked_zones(self) -> list[tuple[tuple[float, float], float]]:
        return [(tuple(z["center"]), z["radius"]) for z in self.events.get("blocked_zones", [])]

    @property
    def waypoints(self) -> list[tuple[float, float]]:
        return [tuple(p) for p in self.events.get("route", [])]


def _mcl_config(scenario: Scenario) -> MclConfig:
    spec = scenario.mcl
    return MclConfig(
        particle_count=spec.particle_count,
        motion_noise=MotionNoiseParams(
            spec.trans_std_per_meter, spec.rot_std_per_rad, spec.rot_std_per_meter
        ),
        likelihood=LikelihoodFieldParams(spec.sigma_hit, spec.z_hit, spec.z_rand, spec.beam_stride),
        distance_cap=spec.distance_cap,
        lost_log_likelihood=spec.lost_log_likelihood,
        reinit_on_lost=spec.reinit_on_lost,
        lost_patience=spec.lost_patience,
        init=spec.init,
        init_std_xy=spec.init_std_xy,
        init_std_theta=spec.init_std_theta,
    )


def _fusion_models(scenario: Scenario) -> tuple[MeasurementModel, ProcessNoise]:
    spec = scenario.fusion
    observation = np.eye(3) if spec.observation is None else np.array(spec.observation, dtype=float)
    noise = np.diag([spec.measurement_std_xy**2, spec.measurement_std_xy**2, spec.measurement_std_theta**2])
    process = np.diag([spec.process_std_xy**2, spec.process_std_xy**2, spec.process_std_theta**2])
    return MeasurementModel(observation, noise), ProcessNoise(process)


def _navigation_params(scenario: Scenario) -> tuple[NavigationParams, PursuitParams]:
    spec = scenario.navigation
    params = NavigationParams(
        zone_radius=spec.zone_radius,
        inflation_radius=spec.inflation_radius,
        robot_radius=spec.robot_radius,
        arrival_tolerance=spec.arrival_tolerance,
        max_spacing=spec.max_spacing,
        mapped_tolerance=spec.mapped_tolerance,
        decay_steps=spec.decay_steps,
    )
    return params, PursuitParams(spec.v_max, spec.omega_max, spec.k_heading)


def run_scenario(scenario: Scenario, base_dir: str | Path = ".", out_dir: str | Path | None = None) -> RunResult:
    """
    Execute a scenario deterministically under its seed.

    Params:
        scenario: Validated scenario.
        base_dir: Directory relative file references resolve against.
        out_dir: When given, the run artifacts are written there.

    Returns:
        RunResult with the per-step record, metrics and navigation events.

    Raises:
        SimulationRuntimeError: On a numerical failure or the robot leaving
            the map, with the step index.
    """
    base_dir = Path(base_dir)
    layout = resolve_map(scenario, base_dir)
    world = layout
    streams = make_streams(scenario.seed)
    geom = WheelGeometry(scenario.wheel.wheel_radius, scenario.wheel.track_width, scenario.wheel.ticks_per_rev)
    noise = NoiseModel(**scenario.noise.model_dump())
    scan_config = ScanConfig(**scenario.scan.model_dump())
    events = [ObstacleEvent(e.step, e.action, e.center, e.radius) for e in scenario.obstacle_events]
    maneuvers = resolve_maneuvers(scenario, base_dir)
    initial = Pose2D(*scenario.initial_pose)

    logger.info("Scenario %s start: seed=%d step_limit=%d", scenario.name, scenario.seed, scenario.step_limit)

    field_cap = scenario.mcl.distance_cap
    distance_field = precompute_distance_field(layout, field_cap)

    localizer = None
    if scenario.mcl.enabled:
        try:
            localizer = MonteCarloLocalizer(
                layout, _mcl_config(scenario), streams.mcl_init, streams.mcl_motion,
                streams.mcl_resample, distance_field,
            )
            localizer.initialize(initial)
        except NoFreeCellsError as exc:
            raise SimulationRuntimeError(str(exc), 0) from exc

    ndt_grid = None
    if scenario.ndt.enabled:
        try:
            ndt_grid = build_map_ndt(layout, scenario.ndt.cell_size)
        except SparseReferenceError as exc:
            raise SimulationRuntimeError(str(exc), 0) from exc

    fused = None
    if scenario.fusion.enabled:
        fused = FusedState.initial(initial, scenario.fusion.initial_std_xy, scenario.fusion.initial_std_theta)
        measurement_model, process_noise = _fusion_models(scenario)

    navigator = None
    if scenario.autonomous:
        nav_params, pursuit = _navigation_params(scenario)
        navigator = Navigator(layout, scenario.navigation.goal, nav_params, distance_field)
        try:
            navigator.start(initial, 0)
        except EndpointBlockedError as exc:
            raise SimulationRuntimeError(str(exc), 0) from exc
        total_steps = scenario.step_limit
    else:
        total_steps = min(scenario.step_limit, len(maneuvers))

    record = RunRecord()
    clock = SimClock(step_duration=scenario.dt, rng_seed=scenario.seed)
    true_pose = odo_pose = ndt_pose = initial
    mcl_pose: Pose2D | None = None
    nav_pose = initial
    target = navigator.state.target if navigator else None
    collisions = 0

    for step in range(total_steps):
        world = apply_obstacle_events(world, layout, events, step)
        if navigator is None:
            u = maneuvers[step]
        else:
            u = pursuit_control(nav_pose, target.position if target else None, pursuit, scenario.dt)

        try:
            new_true = step_truth(true_pose, u)
            cell = world_to_grid(world, new_true.position)
            if cell is None:
                raise OutOfMapError(f"true pose {new_true} left the map")
            if world.is_blocking(cell):
                collisions += 1
                logger.warning("Step %d: robot collides with mapped structure at %s", step, cell)

            delta = wheel_delta(geom, synth_encoders(true_pose, new_true, geom, noise, streams.encoders))
            true_pose = new_true
            odo_pose = integrate_pose(odo_pose, delta)
            scan = synth_scan(true_pose, world, scan_config, noise, streams.lidar)

            mcl_step = None
            if localizer is not None:
                mcl_step = localizer.step(delta, scan)
                mcl_pose = mcl_step.estimate
                if mcl_step.lost:
                    logger.info("Step %d: MCL lost (reinitialized=%s)", step, mcl_step.reinitialized)

            ndt_result: NdtResult | None = None
            if ndt_grid is not None:
                guess = integrate_pose(fused.mean if fused is not None else ndt_pose, delta)
                points = scan_to_points(scan, scenario.ndt.beam_stride)
                if points.shape[0]:
                    ndt_result = ndt_align(
                        ndt_grid, points, guess, scenario.ndt.max_iterations, scenario.ndt.tolerance
                    )
                    if not ndt_result.converged:
                        logger.info("Step %d: NDT did not converge (%s)", step, ndt_result.message)
                ndt_pose = ndt_result.transform if ndt_result is not None else guess

            if fused is not None:
                measurement = None
                if (step + 1) % scenario.fusion.cadence == 0:
                    if scenario.fusion.measurement_source == "mcl":
                        if mcl_step is not None and mcl_step.spread < scenario.fusion.mcl_gate_spread:
                            measurement = mcl_step.estimate
                    elif ndt_result is not None and ndt_result.converged:
                        measurement = ndt_result.transform
                fused = step_fused(fused, delta, measurement, measurement_model, process_noise)
        except (OutOfMapError, NdtNumericalError, DegenerateInnovationError, DegenerateWeightsError) as exc:
            logger.error("Scenario %s aborted at step %d: %s", scenario.name, step, exc)
            raise SimulationRuntimeError(str(exc), step) from exc

        nav_mode = ""
        if navigator is not None:
            nav_pose = {
                "truth": true_pose,
                "odometry": odo_pose,
                "mcl": mcl_pose,
                "fused": fused.mean if fused is not None else None,
            }[scenario.navigation.pose_source] or odo_pose
            state, target = navigator.step(nav_pose, scan, step)
            nav_mode = state.mode.value

        clock = clock.tick(u.dt)
        record.append(StepRow(
            step=step,
            time_s=clock.elapsed_s,
            truth=true_pose,
            odometry=odo_pose,
            mcl=mcl_pose if localizer is not None else None,
            ndt=ndt_pose if ndt_grid is not None else None,
            fused=fused.mean if fused is not None else None,
            nav_mode=nav_mode,
            cov_trace=fused.covariance_trace() if fused is not None else None,
        ))
        if navigator is not None and navigator.state.mode is NavMode.ARRIVED:
            break

    goal_reached = navigator is not None and navigator.state.mode is NavMode.ARRIVED
    metrics = compute_metrics(
        record,
        goal_reached=goal_reached,
        halts=navigator.halts if navigator else 0,
        collisions=collisions,
        localized_threshold=scenario.metrics.localized_threshold,
    )
    events = _navigation_events(navigator, events)
    logger.info(
        "Scenario %s end: seed=%d steps=%d goal_reached=%s",
        scenario.name, scenario.seed, len(record), goal_reached,
    )
    result = RunResult(scenario, layout, record, metrics, events)
    if out_dir is not None:
        write_run_artifacts(result, out_dir, base_dir)
    return result


def _navigation_events(navigator: Navigator | None, obstacle_events: list[ObstacleEvent]) -> dict:
    payload: dict = {
        "obstacle_events": [
            {"step": e.step, "action": e.action, "center": list(e.center), "radius": e.radius}
            for e in obstacle_events
        ],
        "transitions": [],
        "blocked_zones": [],
        "route": [],
        "halts": 0,
    }
    if navigator is None:
        return payload
    state = navigator.state
    payload["transitions"] = list(navigator.transitions)
    payload["blocked_zones"] = [
        {"center": list(z.center), "radius": z.radius} for z in state.blocked_zones
    ]
    payload["route"] = [list(wp.position) for wp in state.active_route.waypoints]
    payload["halts"] = navigator.halts
    return payload


def write_run_artifacts(result: RunResult, out_dir: str | Path, base_dir: str | Path = ".") -> Path:
    """Write run.csv, metrics.json, scenario-echo.json, events.json and render.svg."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_run_csv(result.record, out / "run.csv")
    (out / "metrics.json").write_text(result.metrics.model_dump_json(indent=2) + "\n", encoding="utf-8")
    echo = scenario_echo(result.scenario, base_dir)
    (out / "scenario-echo.json").write_text(json.dumps(echo, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "events.json").write_text(json.dumps(result.events, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if len(result.record):
        svg = render_svg(result.grid, result.record.to_frame(), result.blocked_zones, result.waypoints)
        (out / "render.svg").write_text(svg, encoding="utf-8")
    logger.info("Wrote run artifacts to %s", out)
    return out

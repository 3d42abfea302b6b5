"""
Scenario files.

Project role:
  Pydantic schema for the JSON scenario that configures one run (map,
  robot, noise, estimators, navigation or scripted maneuvers, seed), plus
  loading that reports every problem at once and the fully materialized
  echo written next to the run outputs.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator, model_validator

from geometry.grid import OccupancyGrid, world_to_grid
from geometry.map_io import MapParseError, load_map
from mcl.models import (
    DEFAULT_BEAM_STRIDE,
    DEFAULT_DISTANCE_CAP,
    DEFAULT_LOST_LOG_LIKELIHOOD,
    DEFAULT_LOST_PATIENCE,
    DEFAULT_PARTICLE_COUNT,
    DEFAULT_SIGMA_HIT,
    DEFAULT_Z_HIT,
    DEFAULT_Z_RAND,
)
from ndt.models import DEFAULT_CELL_SIZE, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE
from simulation.maneuvers import ManeuverFormatError, load_maneuvers
from simulation.models import ControlInput
from simulation.worlds import BUILTIN_WORLDS, get_builtin_world

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_POSE = TypeAdapter(tuple[float, float, float])


class ScenarioValidationError(ValueError):
    """
    Scenario failed validation.

    Attributes:
        problems: Every problem found, in discovery order.
    """

    def __init__(self, problems: list[str]) -> None:
        super().__init__("invalid scenario:\n" + "\n".join(f"  - {p}" for p in problems))
        self.problems = problems


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MapSpec(_Section):
    """Either a PGM image plus JSON sidecar, or a builtin world name."""

    image: str | None = None
    metadata: str | None = None
    builtin: str | None = None

    @model_validator(mode="after")
    def _one_source(self) -> MapSpec:
        has_files = self.image is not None or self.metadata is not None
        if has_files == (self.builtin is not None):
            raise ValueError('map needs either {"image", "metadata"} or {"builtin"}')
        if has_files and (self.image is None or self.metadata is None):
            raise ValueError("map image and metadata must be given together")
        if self.builtin is not None and self.builtin not in BUILTIN_WORLDS:
            raise ValueError(f"unknown builtin world {self.builtin!r}; choose from {sorted(BUILTIN_WORLDS)}")
        return self


class WheelSpec(_Section):
    wheel_radius: float = Field(default=0.05, gt=0)
    track_width: float = Field(default=0.30, gt=0)
    ticks_per_rev: int = Field(default=1000, gt=0)


class NoiseSpec(_Section):
    encoder_tick_std: float = Field(default=0.0, ge=0)
    slip_factor_std: float = Field(default=0.0, ge=0)
    range_std: float = Field(default=0.0, ge=0)
    dropout_prob: float = Field(default=0.0, ge=0, le=1)


class ScanSpec(_Section):
    beam_count: int = Field(default=360, ge=1)
    angle_min: float = 0.0
    angle_increment: float = Field(default=math.radians(1.0), gt=0)
    range_max: float = Field(default=8.0, gt=0)
    range_min: float = Field(default=0.01, gt=0)


class MclSpec(_Section):
    enabled: bool = True
    particle_count: int = Field(default=DEFAULT_PARTICLE_COUNT, ge=1)
    beam_stride: int = Field(default=DEFAULT_BEAM_STRIDE, ge=1)
    sigma_hit: float = Field(default=DEFAULT_SIGMA_HIT, gt=0)
    z_hit: float = Field(default=DEFAULT_Z_HIT, ge=0, le=1)
    z_rand: float = Field(default=DEFAULT_Z_RAND, ge=0, le=1)
    distance_cap: float = Field(default=DEFAULT_DISTANCE_CAP, gt=0)
    lost_log_likelihood: float = DEFAULT_LOST_LOG_LIKELIHOOD
    reinit_on_lost: bool = True
    lost_patience: int = Field(default=DEFAULT_LOST_PATIENCE, ge=1)
    init: Literal["uniform", "gaussian"] = "uniform"
    init_std_xy: float = Field(default=0.1, ge=0)
    init_std_theta: float = Field(default=0.05, ge=0)
    trans_std_per_meter: float = Field(default=0.05, ge=0)
    rot_std_per_rad: float = Field(default=0.05, ge=0)
    rot_std_per_meter: float = Field(default=0.02, ge=0)


class NdtSpec(_Section):
    enabled: bool = True
    cell_size: float = Field(default=DEFAULT_CELL_SIZE, gt=0)
    max_iterations: int = Field(default=DEFAULT_MAX_ITERATIONS, ge=1)
    tolerance: float = Field(default=DEFAULT_TOLERANCE, gt=0)
    beam_stride: int = Field(default=1, ge=1)


class FusionSpec(_Section):
    enabled: bool = True
    measurement_source: Literal["mcl", "ndt"] = "mcl"
    cadence: int = Field(default=1, ge=1, description="Update every N-th step")
    mcl_gate_spread: float = Field(default=0.5, gt=0)
    measurement_std_xy: float = Field(default=0.1, gt=0)
    measurement_std_theta: float = Field(default=0.05, gt=0)
    process_std_xy: float = Field(default=0.01, ge=0)
    process_std_theta: float = Field(default=0.005, ge=0)
    initial_std_xy: float = Field(default=0.05, ge=0)
    initial_std_theta: float = Field(default=0.02, ge=0)
    observation: list[list[float]] | None = Field(default=None, description="3x3 H; identity when omitted")

    @field_validator("observation")
    @classmethod
    def _square(cls, value: list[list[float]] | None) -> list[list[float]] | None:
        if value is not None and (len(value) != 3 or any(len(row) != 3 for row in value)):
            raise ValueError("observation must be a 3x3 matrix")
        return value


class NavigationSpec(_Section):
    goal: tuple[float, float]
    pose_source: Literal["fused", "mcl", "odometry", "truth"] = "fused"
    zone_radius: float = Field(default=0.5, gt=0)
    inflation_radius: float = Field(default=0.2, ge=0)
    robot_radius: float = Field(default=0.2, ge=0)
    arrival_tolerance: float = Field(default=0.15, gt=0)
    max_spacing: float = Field(default=0.5, gt=0)
    mapped_tolerance: float = Field(default=0.15, ge=0)
    decay_steps: int | None = Field(default=None, ge=1)
    v_max: float = Field(default=0.5, gt=0)
    omega_max: float = Field(default=1.5, gt=0)
    k_heading: float = Field(default=2.0, gt=0)


class ManeuverSpec(_Section):
    v: float
    omega: float
    dt: float = Field(gt=0)


class ObstacleEventSpec(_Section):
    step: int = Field(ge=0)
    action: Literal["add", "remove"]
    center: tuple[float, float]
    radius: float = Field(gt=0)


class MetricsSpec(_Section):
    localized_threshold: float = Field(default=0.2, gt=0)


class Scenario(_Section):
    """
    One run configuration.

    Exactly one of ``navigation`` (autonomous goal) and ``maneuvers`` /
    ``maneuvers_file`` (scripted replay) must be present.
    """

    schema_version: Literal[1]
    name: str = "scenario"
    seed: int = Field(default=0, ge=0, lt=2**64)
    step_limit: int = Field(default=1000, ge=0)
    dt: float = Field(default=0.1, gt=0, description="Control period in autonomous mode")
    initial_pose: tuple[float, float, float] = (0.0, 0.0, 0.0)
    map: MapSpec
    wheel: WheelSpec = Field(default_factory=WheelSpec)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    scan: ScanSpec = Field(default_factory=ScanSpec)
    mcl: MclSpec = Field(default_factory=MclSpec)
    ndt: NdtSpec = Field(default_factory=NdtSpec)
    fusion: FusionSpec = Field(default_factory=FusionSpec)
    navigation: NavigationSpec | None = None
    maneuvers: list[ManeuverSpec] | None = None
    maneuvers_file: str | None = None
    obstacle_events: list[ObstacleEventSpec] = Field(default_factory=list)
    metrics: MetricsSpec = Field(default_factory=MetricsSpec)
    require_goal: bool = False

    @property
    def autonomous(self) -> bool:
        return self.navigation is not None


def _resolve(base_dir: Path, name: str) -> Path:
    path = Path(name)
    return path if path.is_absolute() else base_dir / path


def _load_grid(spec: MapSpec, base_dir: Path) -> OccupancyGrid:
    if spec.builtin is not None:
        return get_builtin_world(spec.builtin)
    return load_map(_resolve(base_dir, spec.image), _resolve(base_dir, spec.metadata))


def resolve_map(scenario: Scenario, base_dir: Path) -> OccupancyGrid:
    """Load the scenario's layout map (builtin or PGM + sidecar)."""
    return _load_grid(scenario.map, base_dir)


def resolve_maneuvers(scenario: Scenario, base_dir: Path) -> list[ControlInput]:
    """Inline maneuvers, or the referenced maneuver file; empty in autonomous mode."""
    if scenario.maneuvers is not None:
        return [ControlInput(m.v, m.omega, m.dt) for m in scenario.maneuvers]
    if scenario.maneuvers_file is not None:
        return load_maneuvers(_resolve(base_dir, scenario.maneuvers_file))
    return []


def _format_pydantic(exc: ValidationError) -> list[str]:
    problems = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "<root>"
        problems.append(f"{location}: {error['msg']}")
    return problems


def _semantic_problems(scenario: Scenario, base_dir: Path) -> list[str]:
    problems: list[str] = []
    scripted = scenario.maneuvers is not None or scenario.maneuvers_file is not None
    if scenario.maneuvers is not None and scenario.maneuvers_file is not None:
        problems.append("maneuvers and maneuvers_file are mutually exclusive")
    if scripted == scenario.autonomous:
        problems.append("exactly one of navigation (autonomous goal) or maneuvers (scripted) is required")
    if scenario.require_goal and not scenario.autonomous:
        problems.append("require_goal needs an autonomous navigation goal")

    missing = [
        f"{label}: file not found: {name}"
        for label, name in (
            ("map.image", scenario.map.image),
            ("map.metadata", scenario.map.metadata),
            ("maneuvers_file", scenario.maneuvers_file),
        )
        if name is not None and not _resolve(base_dir, name).is_file()
    ]
    if missing:
        return problems + missing

    if scenario.maneuvers_file is not None:
        try:
            resolve_maneuvers(scenario, base_dir)
        except ManeuverFormatError as exc:
            problems.append(f"maneuvers_file: {exc}")

    if scenario.scan.range_min >= scenario.scan.range_max:
        problems.append("scan.range_min must be smaller than scan.range_max")
    if not math.isclose(scenario.mcl.z_hit + scenario.mcl.z_rand, 1.0, abs_tol=1e-9):
        problems.append("mcl.z_hit + mcl.z_rand must sum to 1")

    nav = scenario.navigation
    if nav is not None and nav.pose_source in ("mcl", "fused"):
        section = scenario.mcl if nav.pose_source == "mcl" else scenario.fusion
        if not section.enabled:
            problems.append(f"navigation.pose_source {nav.pose_source!r} requires {nav.pose_source} to be enabled")
    fusion = scenario.fusion
    if fusion.enabled and not getattr(scenario, fusion.measurement_source).enabled:
        problems.append(f"fusion.measurement_source {fusion.measurement_source!r} is disabled")

    try:
        grid = resolve_map(scenario, base_dir)
    except MapParseError as exc:
        problems.append(f"map: {exc}")
        return problems
    return problems + _position_problems(
        grid,
        scenario.initial_pose,
        nav.goal if nav is not None else None,
        list(enumerate(scenario.obstacle_events)),
    )


def _position_problems(
    grid: OccupancyGrid,
    initial_pose: tuple[float, float, float] | None,
    goal: tuple[float, float] | None,
    events: list[tuple[int, ObstacleEventSpec]],
) -> list[str]:
    """Start, goal and obstacle positions checked against the layout map."""
    problems: list[str] = []
    if initial_pose is not None:
        cell = world_to_grid(grid, initial_pose[:2])
        if cell is None:
            problems.append("initial_pose: outside the map")
        elif not grid.is_free(cell):
            problems.append("initial_pose: not in a FREE cell")
    if goal is not None:
        goal_cell = world_to_grid(grid, goal)
        if goal_cell is None:
            problems.append("navigation.goal: outside the map")
        elif not grid.is_free(goal_cell):
            problems.append("navigation.goal: not in a FREE cell")
    for index, event in events:
        if world_to_grid(grid, event.center) is None:
            problems.append(f"obstacle_events.{index}.center: outside the map")
    return problems


def _parsed_position_problems(payload: object, base_dir: Path) -> list[str]:
    """
    Map checks for a payload that failed the schema, using only the sections
    that parse on their own. Sections with schema errors are skipped since
    those errors are already reported.
    """
    if not isinstance(payload, dict):
        return []
    try:
        map_spec = MapSpec.model_validate(payload.get("map"))
    except ValidationError:
        return []
    if any(name is not None and not _resolve(base_dir, name).is_file() for name in (map_spec.image, map_spec.metadata)):
        return []
    try:
        grid = _load_grid(map_spec, base_dir)
    except MapParseError:
        return []

    initial_pose: tuple[float, float, float] | None = None
    try:
        initial_pose = _POSE.validate_python(payload.get("initial_pose", (0.0, 0.0, 0.0)))
    except ValidationError:
        pass
    goal = None
    if payload.get("navigation") is not None:
        try:
            goal = NavigationSpec.model_validate(payload["navigation"]).goal
        except ValidationError:
            pass
    events = []
    raw_events = payload.get("obstacle_events")
    for index, raw in enumerate(raw_events if isinstance(raw_events, list) else []):
        try:
            events.append((index, ObstacleEventSpec.model_validate(raw)))
        except ValidationError:
            continue
    return _position_problems(grid, initial_pose, goal, events)


def validate_scenario(payload: object, base_dir: str | Path = ".") -> Scenario:
    """
    Validate decoded JSON into a Scenario.

    Params:
        payload: Decoded JSON document.
        base_dir: Directory relative file references resolve against.

    Raises:
        ScenarioValidationError: Listing every schema problem together with
            the map position problems of the sections that did parse, or,
            once the schema passes, every semantic problem (modes, files,
            map bounds).
    """
    try:
        scenario = Scenario.model_validate(payload)
    except ValidationError as exc:
        problems = _format_pydantic(exc) + _parsed_position_problems(payload, Path(base_dir))
        raise ScenarioValidationError(problems) from exc
    problems = _semantic_problems(scenario, Path(base_dir))
    if problems:
        raise ScenarioValidationError(problems)
    return scenario


def load_scenario(path: str | Path, seed: int | None = None) -> Scenario:
    """
    Read and validate a scenario file.

    Params:
        path: Scenario JSON file.
        seed: Overrides the file's seed when given.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioValidationError([f"cannot read {path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError([f"invalid JSON: {exc}"]) from exc
    if seed is not None and isinstance(payload, dict):
        payload = {**payload, "seed": seed}
    scenario = validate_scenario(payload, path.parent)
    logger.info("Loaded scenario %s (%s) from %s", scenario.name, "autonomous" if scenario.autonomous else "scripted", path)
    return scenario


def scenario_echo(scenario: Scenario, base_dir: str | Path = ".") -> dict:
    """Fully materialized scenario with defaults, file paths made absolute."""
    echo = scenario.model_dump(mode="json")
    base = Path(base_dir)
    for key in ("image", "metadata"):
        if echo["map"].get(key):
            echo["map"][key] = str(_resolve(base, echo["map"][key]).resolve())
    if echo.get("maneuvers_file"):
        echo["maneuvers_file"] = str(_resolve(base, echo["maneuvers_file"]).resolve())
    return echo

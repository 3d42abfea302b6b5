"""
Stateful Monte Carlo localizer.

Project role:
  Owns the particle set, the distance field and the random streams for one
  run, and sequences a filter cycle: motion update, weighting, a global
  search when the pose is unknown or has stayed lost, and conditional
  resampling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from geometry.grid import OccupancyGrid
from geometry.pose import Pose2D
from geometry.scan import LidarScan
from mcl.distance_field import DistanceField, precompute_distance_field
from mcl.filter import (
    effective_sample_size,
    estimate,
    global_search,
    init_from_hypotheses,
    init_gaussian,
    init_uniform,
    maybe_resample,
    motion_update,
    spread,
    weight_update,
)
from mcl.models import (
    DEFAULT_DISTANCE_CAP,
    DEFAULT_LOST_LOG_LIKELIHOOD,
    DEFAULT_LOST_PATIENCE,
    DEFAULT_PARTICLE_COUNT,
    GlobalSearchParams,
    LikelihoodFieldParams,
    MotionNoiseParams,
    ParticleSet,
    WeightUpdate,
)
from odometry.models import OdometryDelta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MclConfig:
    """Parameters of one localizer instance."""

    particle_count: int = DEFAULT_PARTICLE_COUNT
    motion_noise: MotionNoiseParams = field(default_factory=MotionNoiseParams)
    likelihood: LikelihoodFieldParams = field(default_factory=LikelihoodFieldParams)
    distance_cap: float = DEFAULT_DISTANCE_CAP
    lost_log_likelihood: float = DEFAULT_LOST_LOG_LIKELIHOOD
    reinit_on_lost: bool = True
    lost_patience: int = DEFAULT_LOST_PATIENCE
    search: GlobalSearchParams = field(default_factory=GlobalSearchParams)
    init: Literal["uniform", "gaussian"] = "uniform"
    init_std_xy: float = 0.1
    init_std_theta: float = 0.05

    def __post_init__(self) -> None:
        if self.particle_count < 1:
            raise ValueError("particle_count must be at least 1")
        if self.lost_patience < 1:
            raise ValueError("lost_patience must be at least 1")


@dataclass(frozen=True)
class MclStep:
    """Outcome of one filter cycle."""

    estimate: Pose2D
    spread: float
    effective_sample_size: float
    lost: bool
    resampled: bool
    reinitialized: bool


class MonteCarloLocalizer:
    """
    Particle-filter localizer bound to one reference map.

    Params:
        grid: Reference layout map.
        config: Filter parameters.
        init_rng: Stream for (re-)initialization.
        motion_rng: Stream for motion noise.
        resample_rng: Stream for resampling offsets.
        distance_field: Optional precomputed field (built from ``grid`` if absent).
    """

    def __init__(
        self,
        grid: OccupancyGrid,
        config: MclConfig,
        init_rng: np.random.Generator,
        motion_rng: np.random.Generator,
        resample_rng: np.random.Generator,
        distance_field: DistanceField | None = None,
    ) -> None:
        self.grid = grid
        self.config = config
        self.field = distance_field or precompute_distance_field(grid, config.distance_cap)
        self._init_rng = init_rng
        self._motion_rng = motion_rng
        self._resample_rng = resample_rng
        self.particles: ParticleSet | None = None
        self._search_pending = False
        self._lost_streak = 0

    def initialize(self, pose: Pose2D | None = None) -> ParticleSet:
        """
        Seed the particle set according to ``config.init``.

        A uniform start also arms a global search, so the first ``step``
        replaces the uniform set with particles drawn around the poses that
        best explain its scan.
        """
        self._lost_streak = 0
        if self.config.init == "gaussian" and pose is not None:
            self.particles = init_gaussian(
                pose,
                self.config.init_std_xy,
                self.config.init_std_theta,
                self.config.particle_count,
                self._init_rng,
                self.grid,
            )
            self._search_pending = False
        else:
            self.particles = init_uniform(self.grid, self.config.particle_count, self._init_rng)
            self._search_pending = True
        return self.particles

    def relocalize(self, scan: LidarScan) -> ParticleSet | None:
        """
        Particles placed by a global search on ``scan``.

        Returns:
            The new set, or None when the scan has no usable beam.
        """
        hypotheses, fits = global_search(self.grid, self.field, scan, self.config.likelihood, self.config.search)
        if hypotheses.shape[0] == 0:
            return None
        logger.info(
            "Global search kept %d hypotheses; best at (%.2f, %.2f, %.3f) fit %.3f",
            hypotheses.shape[0],
            *hypotheses[0],
            fits[0],
        )
        return init_from_hypotheses(
            hypotheses, self.config.particle_count, self.config.search, self._init_rng, self.grid
        )

    def _weigh(self, particles: ParticleSet, scan: LidarScan) -> WeightUpdate:
        return weight_update(
            particles, scan, self.field, self.config.likelihood, self.config.lost_log_likelihood
        )

    def step(self, delta: OdometryDelta, scan: LidarScan) -> MclStep:
        """
        Run one motion/weight/resample cycle.

        A pending global search runs on this scan first. Otherwise, after
        ``config.lost_patience`` consecutive lost cycles the set is rebuilt by
        a global search (uniformly when the scan has no usable beam).

        Raises:
            RuntimeError: If called before ``initialize``.
        """
        if self.particles is None:
            raise RuntimeError("MonteCarloLocalizer.step called before initialize")
        moved = motion_update(self.particles, delta, self.config.motion_noise, self._motion_rng)
        searched = False
        if self._search_pending:
            placed = self.relocalize(scan)
            if placed is not None:
                moved = placed
                self._search_pending = False
                searched = True
        outcome = self._weigh(moved, scan)
        particles = outcome.particles

        self._lost_streak = self._lost_streak + 1 if outcome.lost and not searched else 0
        reinitialized = False
        if self.config.reinit_on_lost and self._lost_streak >= self.config.lost_patience:
            placed = self.relocalize(scan)
            if placed is None:
                logger.info("Re-initializing %d particles uniformly", self.config.particle_count)
                particles = init_uniform(self.grid, self.config.particle_count, self._init_rng)
            else:
                particles = self._weigh(placed, scan).particles
            self._lost_streak = 0
            reinitialized = True

        ess = effective_sample_size(particles)
        particles, resampled = maybe_resample(particles, self._resample_rng)
        self.particles = particles
        return MclStep(
            estimate=estimate(particles),
            spread=spread(particles),
            effective_sample_size=ess,
            lost=outcome.lost,
            resampled=resampled,
            reinitialized=reinitialized,
        )

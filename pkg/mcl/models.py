"""
Data models for Monte Carlo Localization.

Project role:
  Particles, particle sets, and the parameter records for the motion and
  likelihood-field sensor models. Particle sets are stored as arrays
  (poses ``(M, 3)``, weights ``(M,)``) so every update is vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from geometry.pose import Pose2D

DEFAULT_PARTICLE_COUNT = 500
DEFAULT_BEAM_STRIDE = 4
DEFAULT_SIGMA_HIT = 0.2
DEFAULT_Z_HIT = 0.9
DEFAULT_Z_RAND = 0.1
DEFAULT_DISTANCE_CAP = 2.0
DEFAULT_LOST_LOG_LIKELIHOOD = -1.0
DEFAULT_LOST_PATIENCE = 3
LOST_TRIM_FRACTION = 0.3


class NoFreeCellsError(ValueError):
    """The map has no FREE cell to place particles in."""


class DegenerateWeightsError(ValueError):
    """Weights are all zero or not normalized; resampling is impossible."""


@dataclass(frozen=True)
class Particle:
    """
    One pose hypothesis.

    Attributes:
        pose: Hypothesized pose (x_i, y_i, theta_i).
        weight: Non-negative finite weight w_i.
    """

    pose: Pose2D
    weight: float

    def __post_init__(self) -> None:
        if not (self.weight >= 0 and math.isfinite(self.weight)):
            raise ValueError("weight must be non-negative and finite")


@dataclass(frozen=True, eq=False)
class ParticleSet:
    """
    Weighted particle set.

    Attributes:
        poses: ``(M, 3)`` array of (x, y, theta), theta in (-pi, pi].
        weights: ``(M,)`` non-negative weights.
    """

    poses: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        poses = np.array(self.poses, dtype=float, copy=True)
        weights = np.array(self.weights, dtype=float, copy=True)
        if poses.ndim != 2 or poses.shape[1] != 3 or poses.shape[0] < 1:
            raise ValueError("poses must have shape (M, 3) with M >= 1")
        if weights.shape != (poses.shape[0],):
            raise ValueError("weights must have shape (M,)")
        if np.any(~np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("weights must be non-negative and finite")
        poses.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "poses", poses)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_particles(cls, particles: list[Particle]) -> ParticleSet:
        return cls(
            poses=np.array([p.pose.as_array() for p in particles]),
            weights=np.array([p.weight for p in particles]),
        )

    @property
    def count(self) -> int:
        return int(self.poses.shape[0])

    def __len__(self) -> int:
        return self.count

    @property
    def particles(self) -> tuple[Particle, ...]:
        return tuple(
            Particle(Pose2D.from_array(pose), float(w)) for pose, w in zip(self.poses, self.weights)
        )

    def normalized(self) -> ParticleSet:
        total = float(self.weights.sum())
        if not total > 0:
            raise DegenerateWeightsError("cannot normalize all-zero weights")
        return ParticleSet(self.poses, self.weights / total)


@dataclass(frozen=True)
class MotionNoiseParams:
    """
    Odometry noise for the particle motion update.

    Attributes:
        trans_std_per_meter: Std of traveled distance per meter traveled.
        rot_std_per_rad: Std of heading change per radian turned.
        rot_std_per_meter: Std of heading change per meter traveled.
    """

    trans_std_per_meter: float = 0.05
    rot_std_per_rad: float = 0.05
    rot_std_per_meter: float = 0.02

    def __post_init__(self) -> None:
        for name in ("trans_std_per_meter", "rot_std_per_rad", "rot_std_per_meter"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class LikelihoodFieldParams:
    """
    Likelihood-field sensor model.

    Attributes:
        sigma_hit: Std of the Gaussian around the nearest obstacle (m).
        z_hit: Mixture share of the Gaussian term.
        z_rand: Mixture share of the uniform random-measurement term.
        beam_stride: Evaluate every k-th beam.
    """

    sigma_hit: float = DEFAULT_SIGMA_HIT
    z_hit: float = DEFAULT_Z_HIT
    z_rand: float = DEFAULT_Z_RAND
    beam_stride: int = DEFAULT_BEAM_STRIDE

    def __post_init__(self) -> None:
        if not self.sigma_hit > 0:
            raise ValueError("sigma_hit must be positive")
        if self.z_hit < 0 or self.z_rand < 0 or not math.isclose(self.z_hit + self.z_rand, 1.0, abs_tol=1e-9):
            raise ValueError("z_hit and z_rand must be non-negative and sum to 1")
        if self.beam_stride < 1:
            raise ValueError("beam_stride must be at least 1")


@dataclass(frozen=True)
class GlobalSearchParams:
    """
    Scan-guided pose search used when the pose is unknown.

    Attributes:
        position_step: Spacing of the candidate position lattice (m).
        heading_step: Spacing of the candidate headings (rad).
        max_beams: Beams scored per lattice pose.
        hypotheses: Distinct poses kept for refinement.
        refine_levels: Pattern-search levels; each halves the step.
        spread_xy: Position std of particles drawn around a hypothesis (m).
        spread_theta: Heading std of particles drawn around a hypothesis (rad).
    """

    position_step: float = 0.25
    heading_step: float = math.radians(6.0)
    max_beams: int = 32
    hypotheses: int = 20
    refine_levels: int = 5
    spread_xy: float = 0.03
    spread_theta: float = 0.01

    def __post_init__(self) -> None:
        if not (self.position_step > 0 and self.heading_step > 0):
            raise ValueError("position_step and heading_step must be positive")
        if self.max_beams < 1 or self.hypotheses < 1 or self.refine_levels < 0:
            raise ValueError("max_beams and hypotheses must be at least 1, refine_levels non-negative")
        if self.spread_xy < 0 or self.spread_theta < 0:
            raise ValueError("spreads must be non-negative")


@dataclass(frozen=True)
class WeightUpdate:
    """
    Result of a sensor weighting pass.

    Attributes:
        particles: Re-weighted, normalized set.
        lost: True when the best particle fits the scan worse than the
            configured floor (or every weight underflowed).
        best_log_likelihood: Mean per-beam log-likelihood of the best particle
            over its best-fitting beams; the worst LOST_TRIM_FRACTION are left
            out so unmapped obstacles alone do not read as lost.
        beams_used: Number of beams that entered the product.
    """

    particles: ParticleSet
    lost: bool
    best_log_likelihood: float
    beams_used: int

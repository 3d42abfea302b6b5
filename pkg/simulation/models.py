"""
Data models for the simulated world.

Project role:
  Velocity commands, sensor noise settings, the simulation clock, the LiDAR
  configuration, and static obstacle events. Defaults are configuration,
  not measured values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

DEFAULT_BEAM_COUNT = 360
DEFAULT_ANGLE_INCREMENT = math.radians(1.0)
DEFAULT_RANGE_MAX = 8.0
DEFAULT_RANGE_MIN = 0.01


@dataclass(frozen=True)
class ControlInput:
    """
    Unicycle velocity command held for ``dt`` seconds.

    Attributes:
        linear_velocity: v in m/s.
        angular_velocity: omega in rad/s.
        dt: Duration in seconds (> 0).
    """

    linear_velocity: float
    angular_velocity: float
    dt: float

    def __post_init__(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive")
        if not (math.isfinite(self.linear_velocity) and math.isfinite(self.angular_velocity)):
            raise ValueError("velocities must be finite")


@dataclass(frozen=True)
class NoiseModel:
    """
    Sensor noise magnitudes.

    Attributes:
        encoder_tick_std: Additive tick noise std per wheel per step.
        slip_factor_std: Multiplicative std applied to each wheel distance.
        range_std: Additive Gaussian std on each LiDAR range (m).
        dropout_prob: Probability a beam reports range_max.
    """

    encoder_tick_std: float = 0.0
    slip_factor_std: float = 0.0
    range_std: float = 0.0
    dropout_prob: float = 0.0

    def __post_init__(self) -> None:
        for name in ("encoder_tick_std", "slip_factor_std", "range_std"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0.0 <= self.dropout_prob <= 1.0:
            raise ValueError("dropout_prob must lie in [0, 1]")

    @classmethod
    def noiseless(cls) -> NoiseModel:
        return cls()


@dataclass(frozen=True)
class SimClock:
    """
    Simulation clock.

    Attributes:
        step_index: Number of completed steps.
        step_duration: Nominal seconds per step (autonomous mode).
        rng_seed: Seed all random streams derive from.
        elapsed_s: Simulated seconds elapsed.
    """

    step_index: int = 0
    step_duration: float = 0.1
    rng_seed: int = 0
    elapsed_s: float = 0.0

    def __post_init__(self) -> None:
        if self.step_index < 0:
            raise ValueError("step_index must be non-negative")
        if not self.step_duration > 0:
            raise ValueError("step_duration must be positive")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must fit in 64 bits")

    def tick(self, dt: float | None = None) -> SimClock:
        """Return the clock advanced by exactly one step."""
        return replace(
            self,
            step_index=self.step_index + 1,
            elapsed_s=self.elapsed_s + (self.step_duration if dt is None else dt),
        )


@dataclass(frozen=True)
class ScanConfig:
    """
    Simulated LiDAR layout.

    Attributes:
        beam_count: Beams per revolution, fixed for a run.
        angle_min: Robot-frame bearing of beam 0 (rad).
        angle_increment: Bearing step (rad).
        range_max: Maximum range (m).
        range_min: Smallest reportable range (m); closer hits clamp to it.
    """

    beam_count: int = DEFAULT_BEAM_COUNT
    angle_min: float = 0.0
    angle_increment: float = DEFAULT_ANGLE_INCREMENT
    range_max: float = DEFAULT_RANGE_MAX
    range_min: float = DEFAULT_RANGE_MIN

    def __post_init__(self) -> None:
        if self.beam_count < 1:
            raise ValueError("beam_count must be at least 1")
        if not self.range_max > 0:
            raise ValueError("range_max must be positive")
        if not 0 < self.range_min < self.range_max:
            raise ValueError("range_min must lie in (0, range_max)")

    def beam_angles(self) -> np.ndarray:
        return self.angle_min + self.angle_increment * np.arange(self.beam_count)


@dataclass(frozen=True)
class ObstacleEvent:
    """
    Static obstacle inserted into or removed from the world at a given step.

    Attributes:
        step: Step index at which the event applies (before sensing).
        action: "add" stamps an OCCUPIED disc; "remove" restores the layout.
        center: Disc center in world meters.
        radius: Disc radius in meters.
    """

    step: int
    action: Literal["add", "remove"]
    center: tuple[float, float]
    radius: float

    def __post_init__(self) -> None:
        if self.step < 0:
            raise ValueError("step must be non-negative")
        if self.action not in ("add", "remove"):
            raise ValueError("action must be 'add' or 'remove'")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

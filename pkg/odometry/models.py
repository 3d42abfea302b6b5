"""
Data models for wheel odometry.

Project role:
  Wheel geometry, per-step encoder readings, and the per-wheel distance
  delta derived from them. Consumed by the kinematics functions, the
  simulator's encoder synthesis, and the filters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class WheelGeometry:
    """
    Differential-drive wheel geometry.

    Attributes:
        wheel_radius: Wheel radius r in meters.
        track_width: Distance W between the wheel contact points in meters.
        ticks_per_rev: Encoder ticks N_total per full wheel revolution.

    Raises:
        ValueError: If a dimension is not positive or ticks_per_rev < 1.
    """

    wheel_radius: float
    track_width: float
    ticks_per_rev: int

    def __post_init__(self) -> None:
        if not (self.wheel_radius > 0 and math.isfinite(self.wheel_radius)):
            raise ValueError("wheel_radius must be positive")
        if not (self.track_width > 0 and math.isfinite(self.track_width)):
            raise ValueError("track_width must be positive")
        if isinstance(self.ticks_per_rev, bool) or int(self.ticks_per_rev) != self.ticks_per_rev:
            raise ValueError("ticks_per_rev must be an integer")
        if self.ticks_per_rev < 1:
            raise ValueError("ticks_per_rev must be at least 1")
        object.__setattr__(self, "ticks_per_rev", int(self.ticks_per_rev))

    @property
    def distance_per_tick(self) -> float:
        """Meters traveled by one wheel per encoder tick."""
        return 2.0 * math.pi * self.wheel_radius / self.ticks_per_rev


@dataclass(frozen=True)
class EncoderReading:
    """
    Signed encoder tick counts accumulated since the previous reading.

    Attributes:
        left_ticks: N_L; negative means the wheel turned backwards.
        right_ticks: N_R.
    """

    left_ticks: int
    right_ticks: int

    def __post_init__(self) -> None:
        for name in ("left_ticks", "right_ticks"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer")
            object.__setattr__(self, name, int(value))


@dataclass(frozen=True)
class OdometryDelta:
    """
    Per-step motion increment in the robot frame.

    Attributes:
        d_left: Distance D_L traveled by the left wheel (m).
        d_right: Distance D_R traveled by the right wheel (m).
        d_avg: Mean wheel distance (D_L + D_R) / 2 (m).
        d_theta: Heading change (D_R - D_L) / W (rad).
    """

    d_left: float
    d_right: float
    d_avg: float
    d_theta: float

    @classmethod
    def from_motion(cls, d_avg: float, d_theta: float, track_width: float) -> OdometryDelta:
        """Build a delta from (d_avg, d_theta), deriving the per-wheel distances."""
        half = track_width * d_theta / 2.0
        return cls(d_left=d_avg - half, d_right=d_avg + half, d_avg=d_avg, d_theta=d_theta)

    @classmethod
    def zero(cls) -> OdometryDelta:
        return cls(0.0, 0.0, 0.0, 0.0)

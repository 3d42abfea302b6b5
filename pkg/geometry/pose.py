"""
Planar pose type and angle helpers.

Project role:
  Pose2D is the state every estimator in the stack produces. Headings are
  kept in the half-open interval (-pi, pi] so comparisons and residuals
  behave the same everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """
    Wrap an angle into (-pi, pi].

    Params:
        angle: Angle in radians (any magnitude).

    Returns:
        Equivalent angle in (-pi, pi].
    """
    wrapped = math.remainder(angle, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def angle_diff(a: float, b: float) -> float:
    """Return the wrapped residual a - b in (-pi, pi]."""
    return normalize_angle(a - b)


def normalize_angles(angles: np.ndarray) -> np.ndarray:
    """Vectorized normalize_angle for particle arrays."""
    wrapped = np.remainder(angles + math.pi, TWO_PI) - math.pi
    # np.remainder maps onto [-pi, pi); move the closed end to +pi.
    return np.where(wrapped <= -math.pi, wrapped + TWO_PI, wrapped)


@dataclass(frozen=True)
class Pose2D:
    """
    Planar pose in the world frame.

    Attributes:
        x: Position along the world x axis (meters).
        y: Position along the world y axis (meters).
        theta: Heading (radians), normalized to (-pi, pi] on construction.
    """

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError("pose components must be finite")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.theta], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray | list[float] | tuple[float, ...]) -> Pose2D:
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def distance_to(self, other: Pose2D | tuple[float, float]) -> float:
        """Planar Euclidean distance to another pose or (x, y) point."""
        ox, oy = other.position if isinstance(other, Pose2D) else other
        return math.hypot(self.x - ox, self.y - oy)

    def transform_point(self, px: float, py: float) -> tuple[float, float]:
        """Map a point from this pose's body frame into the world frame."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return (self.x + c * px - s * py, self.y + s * px + c * py)

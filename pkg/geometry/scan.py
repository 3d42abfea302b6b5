"""
LiDAR scan type.

Project role:
  One revolution of planar range readings, the already-projected 2D form of
  the 3D point cloud. A reading equal to ``range_max`` means no return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from geometry.pose import Pose2D


@dataclass(frozen=True, eq=False)
class LidarScan:
    """
    Planar range scan.

    Attributes:
        angle_min: Bearing of beam 0 in the robot frame (rad).
        angle_increment: Bearing step between consecutive beams (rad).
        range_max: Maximum range (m); readings equal to it carry no return.
        ranges: Read-only float array, one reading per beam.

    Raises:
        ValueError: If any reading lies outside (0, range_max].
    """

    angle_min: float
    angle_increment: float
    range_max: float
    ranges: np.ndarray

    def __post_init__(self) -> None:
        if not (self.range_max > 0 and math.isfinite(self.range_max)):
            raise ValueError("range_max must be positive")
        ranges = np.array(self.ranges, dtype=float, copy=True)
        if ranges.ndim != 1:
            raise ValueError("ranges must be one-dimensional")
        if ranges.size and (np.any(~np.isfinite(ranges)) or ranges.min() <= 0 or ranges.max() > self.range_max):
            raise ValueError("every range must satisfy 0 < r <= range_max")
        ranges.setflags(write=False)
        object.__setattr__(self, "ranges", ranges)

    def __len__(self) -> int:
        return int(self.ranges.size)

    @property
    def angles(self) -> np.ndarray:
        """Robot-frame bearing of every beam."""
        return self.angle_min + self.angle_increment * np.arange(self.ranges.size)

    @property
    def hit_mask(self) -> np.ndarray:
        """Beams that produced a return (range < range_max)."""
        return self.ranges < self.range_max

    def endpoints(self, pose: Pose2D, stride: int = 1, hits_only: bool = True) -> np.ndarray:
        """
        Project beam endpoints into the world frame from ``pose``.

        Params:
            pose: Sensor pose in the world.
            stride: Use every ``stride``-th beam.
            hits_only: Drop beams reading range_max.

        Returns:
            (n, 2) array of world points.
        """
        idx = np.arange(0, self.ranges.size, max(1, stride))
        if hits_only:
            idx = idx[self.ranges[idx] < self.range_max]
        bearings = pose.theta + self.angles[idx]
        r = self.ranges[idx]
        return np.column_stack([pose.x + r * np.cos(bearings), pose.y + r * np.sin(bearings)])

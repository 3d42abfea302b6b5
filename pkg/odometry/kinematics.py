"""
Differential-drive odometry kinematics.

Project role:
  Encoder ticks -> wheel distances -> pose increment -> integrated pose.
  Pose integration uses the midpoint-heading model: the translation is
  applied along the heading halfway through the step's rotation.
"""

from __future__ import annotations

import math

import numpy as np

from geometry.pose import Pose2D, normalize_angle
from odometry.models import EncoderReading, OdometryDelta, WheelGeometry


def ticks_to_distance(geom: WheelGeometry, ticks: int | float) -> float:
    """
    Convert a signed tick count into wheel travel distance.

    D = 2*pi*r * N / N_total, evaluated in floating point.

    Params:
        geom: Wheel geometry.
        ticks: Signed tick count.

    Returns:
        Signed distance in meters.
    """
    return 2.0 * math.pi * geom.wheel_radius * (float(ticks) / geom.ticks_per_rev)


def wheel_delta(geom: WheelGeometry, reading: EncoderReading) -> OdometryDelta:
    """Turn one encoder reading into per-wheel distances, mean travel and heading change."""
    d_left = ticks_to_distance(geom, reading.left_ticks)
    d_right = ticks_to_distance(geom, reading.right_ticks)
    return OdometryDelta(
        d_left=d_left,
        d_right=d_right,
        d_avg=(d_left + d_right) / 2.0,
        d_theta=(d_right - d_left) / geom.track_width,
    )


def integrate_pose(pose: Pose2D, delta: OdometryDelta) -> Pose2D:
    """
    Advance a pose by one odometry increment.

    Params:
        pose: Pose before the step.
        delta: Step increment.

    Returns:
        Pose after the step, with
        x' = x + D_avg*cos(theta + d_theta/2), y' likewise with sin,
        theta' = normalize(theta + d_theta).
    """
    mid = pose.theta + delta.d_theta / 2.0
    return Pose2D(
        pose.x + delta.d_avg * math.cos(mid),
        pose.y + delta.d_avg * math.sin(mid),
        normalize_angle(pose.theta + delta.d_theta),
    )


def pose_jacobian(pose: Pose2D, delta: OdometryDelta) -> np.ndarray:
    """
    Jacobian of integrate_pose with respect to (x, y, theta).

    Returns:
        3x3 matrix F; identity except the heading column.
    """
    mid = pose.theta + delta.d_theta / 2.0
    jac = np.eye(3)
    jac[0, 2] = -delta.d_avg * math.sin(mid)
    jac[1, 2] = delta.d_avg * math.cos(mid)
    return jac

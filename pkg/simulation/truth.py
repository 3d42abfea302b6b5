"""
Ground-truth robot kinematics.

Project role:
  Exact unicycle motion used as the reference trajectory. Odometry uses the
  midpoint approximation instead, so the two diverge slightly on arcs.
"""

from __future__ import annotations

import math

from geometry.pose import Pose2D
from simulation.models import ControlInput

_STRAIGHT_EPS = 1e-12


def step_truth(true_pose: Pose2D, u: ControlInput) -> Pose2D:
    """
    Advance the true pose under a constant (v, omega) command.

    Params:
        true_pose: Pose at the start of the step.
        u: Command and duration.

    Returns:
        Pose after ``u.dt`` seconds: a straight segment when omega is zero,
        otherwise an arc of radius v/omega through angle omega*dt.
    """
    v, omega, dt = u.linear_velocity, u.angular_velocity, u.dt
    dtheta = omega * dt
    theta = true_pose.theta
    if abs(dtheta) < _STRAIGHT_EPS:
        return Pose2D(
            true_pose.x + v * dt * math.cos(theta),
            true_pose.y + v * dt * math.sin(theta),
            theta,
        )
    radius = v / omega
    return Pose2D(
        true_pose.x + radius * (math.sin(theta + dtheta) - math.sin(theta)),
        true_pose.y - radius * (math.cos(theta + dtheta) - math.cos(theta)),
        theta + dtheta,
    )

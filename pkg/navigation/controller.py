"""Proportional pursuit controller for waypoint following."""

from __future__ import annotations

import math
from dataclasses import dataclass

from geometry.grid import Point
from geometry.pose import Pose2D, angle_diff
from simulation.models import ControlInput


@dataclass(frozen=True)
class PursuitParams:
    """Speed caps (m/s, rad/s) and heading gain."""

    v_max: float = 0.5
    omega_max: float = 1.5
    k_heading: float = 2.0

    def __post_init__(self) -> None:
        for name in ("v_max", "omega_max", "k_heading"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def pursuit_control(pose: Pose2D, target: Point | None, params: PursuitParams, dt: float) -> ControlInput:
    """
    Turn toward the target and drive forward when roughly facing it.

    Params:
        pose: Robot pose the controller believes.
        target: Waypoint position, or None to stop (HALTED/ARRIVED).
        params: Saturation limits and gain.
        dt: Control period (s).

    Returns:
        ControlInput with |v| <= v_max and |omega| <= omega_max. Forward
        speed scales with cos(heading error), is zero when facing away, and
        never overshoots the target within one period.
    """
    if target is None:
        return ControlInput(0.0, 0.0, dt)
    dx, dy = target[0] - pose.x, target[1] - pose.y
    distance = math.hypot(dx, dy)
    if distance == 0.0:
        return ControlInput(0.0, 0.0, dt)
    error = angle_diff(math.atan2(dy, dx), pose.theta)
    omega = max(-params.omega_max, min(params.omega_max, params.k_heading * error))
    v = min(params.v_max * max(0.0, math.cos(error)), distance / dt)
    return ControlInput(v, omega, dt)

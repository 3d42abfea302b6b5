"""
Wheel odometry for a two-wheeled differential-drive robot.

Project role:
  Encoder-tick conversion and dead-reckoning pose integration.
"""

from odometry.kinematics import integrate_pose, pose_jacobian, ticks_to_distance, wheel_delta
from odometry.models import EncoderReading, OdometryDelta, WheelGeometry

__all__ = [
    "EncoderReading",
    "OdometryDelta",
    "WheelGeometry",
    "integrate_pose",
    "pose_jacobian",
    "ticks_to_distance",
    "wheel_delta",
]

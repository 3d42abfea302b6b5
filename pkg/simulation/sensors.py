"""
Noisy sensor synthesis: wheel encoders and a planar LiDAR.

Project role:
  Turns ground-truth motion into the readings the estimators consume.
  Draw counts per call are fixed (two normals per wheel step, two draws per
  beam), so sequences depend only on the seed and the step index.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from geometry.grid import OccupancyGrid, OutOfMapError, world_to_grid
from geometry.pose import Pose2D, angle_diff
from geometry.raycast import raycast
from geometry.scan import LidarScan
from odometry.models import EncoderReading, WheelGeometry
from simulation.models import NoiseModel, ScanConfig

logger = logging.getLogger(__name__)


def step_motion(prev_pose: Pose2D, new_pose: Pose2D) -> tuple[float, float]:
    """
    Recover the arc traveled between two poses joined by one unicycle step.

    Returns:
        ``(d_avg, d_theta)``: signed arc length and heading change.
    """
    d_theta = angle_diff(new_pose.theta, prev_pose.theta)
    dx = new_pose.x - prev_pose.x
    dy = new_pose.y - prev_pose.y
    chord = math.hypot(dx, dy)
    if chord == 0.0:
        return 0.0, d_theta
    half = d_theta / 2.0
    arc = chord if abs(half) < 1e-9 else chord * half / math.sin(half)
    mid = prev_pose.theta + half
    forward = dx * math.cos(mid) + dy * math.sin(mid) >= 0.0
    return (arc if forward else -arc), d_theta


def synth_encoders(
    prev_pose: Pose2D,
    new_pose: Pose2D,
    geom: WheelGeometry,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> EncoderReading:
    """
    Synthesize the encoder ticks produced by one step of true motion.

    Per-wheel distances D_L = d_avg - W*d_theta/2 and D_R = d_avg + W*d_theta/2
    are scaled by (1 + slip), converted to ticks with the inverse of the
    tick-distance relation, rounded, and perturbed by integer tick noise.

    Params:
        prev_pose: True pose before the step.
        new_pose: True pose after the step.
        geom: Wheel geometry.
        noise: Slip and tick noise settings.
        rng: Encoder stream.

    Returns:
        EncoderReading with signed per-step counts.
    """
    d_avg, d_theta = step_motion(prev_pose, new_pose)
    half_track = geom.track_width * d_theta / 2.0
    distances = np.array([d_avg - half_track, d_avg + half_track])

    slip = rng.normal(0.0, noise.slip_factor_std, size=2)
    tick_noise = rng.normal(0.0, noise.encoder_tick_std, size=2)

    distances = distances * (1.0 + slip)
    ticks = np.rint(distances / geom.distance_per_tick) + np.rint(tick_noise)
    return EncoderReading(left_ticks=int(ticks[0]), right_ticks=int(ticks[1]))


def synth_scan(
    true_pose: Pose2D,
    grid: OccupancyGrid,
    scan_config: ScanConfig,
    noise: NoiseModel,
    rng: np.random.Generator,
) -> LidarScan:
    """
    Simulate one LiDAR revolution from the true pose.

    Each beam is the raycast range plus Gaussian noise, clamped to
    [range_min, range_max]; beams without a return stay at range_max, and
    with probability ``dropout_prob`` a beam is forced to range_max.

    Raises:
        OutOfMapError: If the pose lies outside the map.
    """
    if world_to_grid(grid, true_pose.position) is None:
        raise OutOfMapError(f"sensor pose {true_pose} lies outside the map")

    angles = scan_config.beam_angles()
    range_noise = rng.normal(0.0, noise.range_std, size=scan_config.beam_count)
    dropout_draws = rng.random(size=scan_config.beam_count)

    ranges = np.empty(scan_config.beam_count)
    for k, angle in enumerate(angles):
        ranges[k] = raycast(grid, true_pose.position, true_pose.theta + angle, scan_config.range_max)

    no_return = ranges >= scan_config.range_max
    ranges = np.clip(ranges + range_noise, scan_config.range_min, scan_config.range_max)
    ranges[no_return | (dropout_draws < noise.dropout_prob)] = scan_config.range_max

    return LidarScan(
        angle_min=scan_config.angle_min,
        angle_increment=scan_config.angle_increment,
        range_max=scan_config.range_max,
        ranges=ranges,
    )

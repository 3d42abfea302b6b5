"""
Tests for simulation/truth.py and simulation/sensors.py -- ground truth and sensor synthesis.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from geometry.grid import OutOfMapError
from geometry.pose import Pose2D
from odometry.models import WheelGeometry
from simulation.models import ControlInput, NoiseModel, ScanConfig
from simulation.sensors import step_motion, synth_encoders, synth_scan
from simulation.truth import step_truth

FOUR_BEAMS = ScanConfig(beam_count=4, angle_increment=math.pi / 2, range_max=3.0)


class TestStepTruth:
    """Tests for step_truth()."""

    def test_straight(self):
        pose = step_truth(Pose2D(0.0, 0.0, 0.0), ControlInput(1.0, 0.0, 1.0))
        assert (pose.x, pose.y, pose.theta) == pytest.approx((1.0, 0.0, 0.0))

    def test_pure_rotation(self):
        pose = step_truth(Pose2D(0.0, 0.0, 0.0), ControlInput(0.0, math.pi / 2, 1.0))
        assert (pose.x, pose.y, pose.theta) == pytest.approx((0.0, 0.0, math.pi / 2))

    def test_quarter_circle(self):
        pose = step_truth(Pose2D(0.0, 0.0, 0.0), ControlInput(math.pi / 2, math.pi / 2, 1.0))
        assert (pose.x, pose.y, pose.theta) == pytest.approx((1.0, 1.0, math.pi / 2))

    def test_control_rejects_non_positive_dt(self):
        with pytest.raises(ValueError, match="dt"):
            ControlInput(1.0, 0.0, 0.0)


class TestStepMotion:
    """Tests for step_motion()."""

    def test_recovers_arc_length_and_turn(self):
        start = Pose2D(0.3, -0.2, 1.0)
        end = step_truth(start, ControlInput(0.3, 0.5, 0.1))
        d_avg, d_theta = step_motion(start, end)
        assert d_avg == pytest.approx(0.03, rel=1e-9)
        assert d_theta == pytest.approx(0.05, rel=1e-9)

    def test_reverse_motion_is_negative(self):
        start = Pose2D(1.0, 1.0, 0.0)
        end = step_truth(start, ControlInput(-0.2, 0.0, 0.5))
        assert step_motion(start, end)[0] == pytest.approx(-0.1)


class TestSynthEncoders:
    """Tests for synth_encoders()."""

    def test_straight_meter(self, wheel_geometry, zero_noise, rng):
        reading = synth_encoders(Pose2D(0, 0, 0), Pose2D(1, 0, 0), wheel_geometry, zero_noise, rng)
        assert (reading.left_ticks, reading.right_ticks) == (3183, 3183)

    def test_zero_motion(self, wheel_geometry, zero_noise, rng):
        reading = synth_encoders(Pose2D(2, 1, 0.5), Pose2D(2, 1, 0.5), wheel_geometry, zero_noise, rng)
        assert (reading.left_ticks, reading.right_ticks) == (0, 0)

    def test_spin_is_antisymmetric(self, zero_noise, rng):
        geom = WheelGeometry(0.05, 0.5, 1000)
        reading = synth_encoders(Pose2D(0, 0, 0), Pose2D(0, 0, 0.4), geom, zero_noise, rng)
        assert reading.left_ticks == -reading.right_ticks
        assert reading.right_ticks > 0

    def test_same_seed_same_noisy_reading(self, wheel_geometry):
        noise = NoiseModel(encoder_tick_std=2.0, slip_factor_std=0.05)
        readings = [
            synth_encoders(Pose2D(0, 0, 0), Pose2D(0.1, 0.0, 0.05), wheel_geometry, noise,
                           np.random.Generator(np.random.PCG64(9)))
            for _ in range(2)
        ]
        assert readings[0] == readings[1]


class TestSynthScan:
    """Tests for synth_scan()."""

    def test_empty_map_reads_range_max(self, free_grid, zero_noise, rng):
        scan = synth_scan(Pose2D(0.5, 0.5, 0.0), free_grid, FOUR_BEAMS, zero_noise, rng)
        np.testing.assert_array_equal(scan.ranges, 3.0)

    def test_wall_ahead(self, wall_grid, zero_noise, rng):
        scan = synth_scan(Pose2D(0.05, 0.05, 0.0), wall_grid, FOUR_BEAMS, zero_noise, rng)
        assert scan.ranges[0] == pytest.approx(0.45)
        assert scan.ranges[2] == 3.0

    def test_full_dropout(self, wall_grid, rng):
        noise = NoiseModel(dropout_prob=1.0)
        scan = synth_scan(Pose2D(0.05, 0.05, 0.0), wall_grid, FOUR_BEAMS, noise, rng)
        np.testing.assert_array_equal(scan.ranges, 3.0)

    def test_noisy_ranges_stay_in_bounds(self, wall_grid, rng):
        noise = NoiseModel(range_std=0.5)
        config = ScanConfig(beam_count=90, angle_increment=math.radians(4), range_max=3.0, range_min=0.01)
        for _ in range(20):
            scan = synth_scan(Pose2D(0.25, 0.5, 0.3), wall_grid, config, noise, rng)
            assert scan.ranges.min() >= 0.01
            assert scan.ranges.max() <= 3.0

    def test_heading_rotates_beams(self, wall_grid, zero_noise, rng):
        scan = synth_scan(Pose2D(0.05, 0.05, math.pi), wall_grid, FOUR_BEAMS, zero_noise, rng)
        assert scan.ranges[2] == pytest.approx(0.45)

    def test_outside_map_raises(self, free_grid, zero_noise, rng):
        with pytest.raises(OutOfMapError):
            synth_scan(Pose2D(5.0, 5.0, 0.0), free_grid, FOUR_BEAMS, zero_noise, rng)

"""
Tests for mcl/localizer.py -- the stateful Monte Carlo localizer.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from geometry.pose import Pose2D, normalize_angle
from geometry.scan import LidarScan
from mcl.localizer import MclConfig, MonteCarloLocalizer
from odometry.kinematics import wheel_delta
from odometry.models import OdometryDelta, WheelGeometry
from simulation.models import ControlInput, NoiseModel, ScanConfig
from simulation.rng import make_streams
from simulation.sensors import synth_encoders, synth_scan
from simulation.truth import step_truth
from simulation.worlds import four_room_floorplan

GLOBAL_SCAN = ScanConfig(beam_count=90, angle_increment=math.radians(4.0))
CIRCLE = ControlInput(0.5, 0.5, 0.1)
CIRCLE_START = Pose2D(7.0, 2.0, 0.0)
MODERATE_NOISE = NoiseModel(encoder_tick_std=1.0, slip_factor_std=0.01, range_std=0.02, dropout_prob=0.01)
SEEDS = range(20)
CONVERGE_WITHIN = 50
TRACK_STEPS = 200


def _localizer(grid, config: MclConfig, seed: int = 11) -> MonteCarloLocalizer:
    streams = make_streams(seed)
    return MonteCarloLocalizer(grid, config, streams.mcl_init, streams.mcl_motion, streams.mcl_resample)


def _errors(estimate: Pose2D, truth: Pose2D) -> tuple[float, float]:
    return estimate.distance_to(truth), abs(normalize_angle(estimate.theta - truth.theta))


def _circle_errors(grid, seed: int, steps: int) -> list[tuple[float, float]]:
    """Per-step estimate errors of a uniformly started filter following a circle."""
    geometry = WheelGeometry(wheel_radius=0.05, track_width=0.30, ticks_per_rev=1000)
    streams = make_streams(seed)
    localizer = MonteCarloLocalizer(
        grid, MclConfig(particle_count=500), streams.mcl_init, streams.mcl_motion, streams.mcl_resample
    )
    localizer.initialize()
    truth = CIRCLE_START
    errors = []
    for _ in range(steps):
        new_truth = step_truth(truth, CIRCLE)
        reading = synth_encoders(truth, new_truth, geometry, MODERATE_NOISE, streams.encoders)
        scan = synth_scan(new_truth, grid, GLOBAL_SCAN, MODERATE_NOISE, streams.lidar)
        truth = new_truth
        errors.append(_errors(localizer.step(wheel_delta(geometry, reading), scan).estimate, truth))
    return errors


def _first_converged(errors: list[tuple[float, float]]) -> int | None:
    for k, (distance, heading) in enumerate(errors[:CONVERGE_WITHIN]):
        if distance < 0.1 and heading < math.radians(5.0):
            return k
    return None


@pytest.fixture(scope="module")
def circle_runs() -> dict[int, list[tuple[float, float]]]:
    grid = four_room_floorplan()
    return {seed: _circle_errors(grid, seed, CONVERGE_WITHIN + TRACK_STEPS) for seed in SEEDS}


class TestMonteCarloLocalizer:
    """Tests for MonteCarloLocalizer."""

    def test_step_before_initialize(self, room):
        localizer = _localizer(room, MclConfig(particle_count=10))
        scan = LidarScan(0.0, 0.1, 8.0, np.full(4, 1.0))
        with pytest.raises(RuntimeError, match="initialize"):
            localizer.step(OdometryDelta.zero(), scan)

    def test_gaussian_initialize_uses_pose(self, room):
        localizer = _localizer(room, MclConfig(particle_count=100, init="gaussian"))
        particles = localizer.initialize(Pose2D(3.0, 3.0, 0.0))
        assert particles.count == 100
        assert np.abs(particles.poses[:, 0] - 3.0).max() < 1.0

    def test_rejects_zero_patience(self):
        with pytest.raises(ValueError, match="lost_patience"):
            MclConfig(lost_patience=0)

    def test_lost_reinitializes_after_patience(self, room):
        localizer = _localizer(room, MclConfig(particle_count=50, init="gaussian", lost_patience=3))
        localizer.initialize(Pose2D(3.0, 3.0, 0.0))
        scan = LidarScan(0.0, math.radians(10.0), 8.0, np.full(36, 0.5))
        outcomes = [localizer.step(OdometryDelta.zero(), scan) for _ in range(3)]
        assert all(outcome.lost for outcome in outcomes)
        assert [outcome.reinitialized for outcome in outcomes] == [False, False, True]
        assert localizer.particles.count == 50

    def test_lost_without_reinit(self, room):
        config = MclConfig(particle_count=50, init="gaussian", reinit_on_lost=False, lost_patience=1)
        localizer = _localizer(room, config)
        localizer.initialize(Pose2D(3.0, 3.0, 0.0))
        scan = LidarScan(0.0, math.radians(10.0), 8.0, np.full(36, 0.5))
        outcome = localizer.step(OdometryDelta.zero(), scan)
        assert outcome.lost
        assert not outcome.reinitialized

    def test_uniform_start_localizes_on_first_scan(self, zero_noise):
        grid = four_room_floorplan()
        localizer = _localizer(grid, MclConfig())
        localizer.initialize()
        scan = synth_scan(CIRCLE_START, grid, GLOBAL_SCAN, zero_noise, make_streams(3).lidar)
        outcome = localizer.step(OdometryDelta.zero(), scan)
        assert not outcome.lost
        assert not outcome.reinitialized
        distance, heading = _errors(outcome.estimate, CIRCLE_START)
        assert distance < 0.1
        assert heading < math.radians(5.0)

    def test_uniform_start_without_returns_stays_uniform(self, room):
        localizer = _localizer(room, MclConfig(particle_count=200))
        localizer.initialize()
        scan = LidarScan(0.0, math.radians(10.0), 8.0, np.full(36, 8.0))
        outcome = localizer.step(OdometryDelta.zero(), scan)
        assert outcome.spread > 1.0

    def test_same_seed_same_estimates(self, room):
        scan = LidarScan(0.0, math.radians(10.0), 8.0, np.full(36, 2.0))
        estimates = []
        for _ in range(2):
            localizer = _localizer(room, MclConfig(particle_count=200))
            localizer.initialize()
            estimates.append(localizer.step(OdometryDelta.from_motion(0.1, 0.05, 0.3), scan).estimate)
        assert estimates[0] == estimates[1]

    def test_tracks_moving_robot(self, room, wheel_geometry, zero_noise):
        config = MclConfig(particle_count=300, init="gaussian")
        localizer = _localizer(room, config)
        streams = make_streams(5)
        scan_config = ScanConfig(beam_count=72, angle_increment=math.radians(5.0))
        truth = Pose2D(2.0, 2.5, 0.2)
        localizer.initialize(truth)
        for _ in range(20):
            new_truth = step_truth(truth, ControlInput(0.4, 0.1, 0.1))
            delta = wheel_delta(
                wheel_geometry, synth_encoders(truth, new_truth, wheel_geometry, zero_noise, streams.encoders)
            )
            scan = synth_scan(new_truth, room, scan_config, zero_noise, streams.lidar)
            outcome = localizer.step(delta, scan)
            truth = new_truth
        assert outcome.estimate.distance_to(truth) < 0.15
        assert not outcome.lost


@pytest.mark.slow
class TestGlobalLocalization:
    """Uniformly started filters on the four-room floor plan, one run per seed."""

    def test_most_seeds_converge(self, circle_runs):
        converged = [seed for seed, errors in circle_runs.items() if _first_converged(errors) is not None]
        assert len(converged) >= 18

    def test_tracking_after_convergence(self, circle_runs):
        tracked = []
        for errors in circle_runs.values():
            first = _first_converged(errors)
            if first is not None:
                tracked.extend(distance for distance, _ in errors[first + 1:first + 1 + TRACK_STEPS])
        assert tracked
        assert np.percentile(tracked, 95) <= 0.15

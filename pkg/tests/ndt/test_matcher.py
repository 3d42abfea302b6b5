"""
Tests for ndt/matcher.py -- NDT score and Newton alignment.

The reference cloud is four filled axis-aligned ellipses, one per 6 m cell,
each symmetric about both of its axes, so aligning the cloud to a transformed
copy of itself has its optimum exactly at the generating transform.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from geometry.pose import Pose2D
from ndt import matcher
from ndt.matcher import ndt_align, ndt_score
from ndt.reference import build_ndt

CELL = 6.0
RING_FRACTIONS = (1.0 / 3.0, 2.0 / 3.0, 1.0)
POINTS_PER_RING = 30


def _ellipse(center, semi_x, semi_y):
    """Ninety points of a filled ellipse, on three concentric rings."""
    angles = 2.0 * math.pi * np.arange(POINTS_PER_RING) / POINTS_PER_RING
    rings = [
        np.column_stack([center[0] + f * semi_x * np.cos(angles), center[1] + f * semi_y * np.sin(angles)])
        for f in RING_FRACTIONS
    ]
    return np.vstack(rings)


def _reference_cloud() -> np.ndarray:
    return np.vstack([
        _ellipse((3.0, 3.0), 1.4, 1.0),
        _ellipse((-3.0, 3.0), 1.0, 1.4),
        _ellipse((-3.0, -3.0), 1.4, 0.9),
        _ellipse((3.0, -3.0), 0.9, 1.3),
    ])


def _inverse_apply(pose: Pose2D, points: np.ndarray) -> np.ndarray:
    """Points p with pose.transform(p) == points."""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    dx, dy = points[:, 0] - pose.x, points[:, 1] - pose.y
    return np.column_stack([c * dx + s * dy, -s * dx + c * dy])


def _score_only(grid, points, values) -> float:
    return ndt_score(grid, points, Pose2D.from_array(values), with_derivatives=False).score


@pytest.fixture()
def reference() -> np.ndarray:
    return _reference_cloud()


@pytest.fixture()
def grid(reference):
    return build_ndt(reference, cell_size=CELL)


@pytest.fixture()
def rejecting_line_search(monkeypatch):
    """Make every line-search trial score below the current pose."""
    original = matcher.ndt_score

    def worse_trials(grid, points, transform, with_derivatives=True):
        result = original(grid, points, transform, with_derivatives)
        return result if with_derivatives else replace(result, score=result.score - 1.0)

    monkeypatch.setattr(matcher, "ndt_score", worse_trials)


class TestNdtScore:
    """Tests for ndt_score()."""

    def test_points_at_means_score_one_each(self, grid):
        means = np.array([cell.mean for cell in grid.cells.values()])
        result = ndt_score(grid, means, Pose2D(0.0, 0.0, 0.0))
        assert result.score == pytest.approx(4.0)
        assert result.matched == 4

    def test_symmetric_gaussian_is_stationary(self):
        cloud = _ellipse((3.0, 3.0), 1.4, 1.0)
        single = build_ndt(cloud, cell_size=CELL)
        result = ndt_score(single, cloud, Pose2D(0.0, 0.0, 0.0))
        np.testing.assert_allclose(result.gradient, 0.0, atol=1e-9)

    def test_points_in_empty_cells_contribute_nothing(self, grid):
        result = ndt_score(grid, np.array([[50.0, 50.0], [-40.0, 7.0]]), Pose2D(0.0, 0.0, 0.0))
        assert result.score == 0.0
        assert result.matched == 0
        np.testing.assert_array_equal(result.gradient, 0.0)

    def test_gradient_matches_finite_differences(self, grid, reference):
        gen = np.random.Generator(np.random.PCG64(21))
        h = 1e-6
        for _ in range(100):
            truth = Pose2D(*gen.uniform(-0.2, 0.2, 2), gen.uniform(-0.17, 0.17))
            scan = _inverse_apply(truth, reference)
            at = gen.uniform([-0.3, -0.3, -0.2], [0.3, 0.3, 0.2])
            analytic = ndt_score(grid, scan, Pose2D.from_array(at)).gradient
            numeric = np.array([
                (_score_only(grid, scan, at + h * e) - _score_only(grid, scan, at - h * e)) / (2 * h)
                for e in np.eye(3)
            ])
            np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-5)

    def test_hessian_matches_finite_differences(self, grid, reference):
        gen = np.random.Generator(np.random.PCG64(22))
        h = 1e-5
        for _ in range(20):
            scan = _inverse_apply(Pose2D(0.1, -0.1, 0.05), reference)
            at = gen.uniform([-0.3, -0.3, -0.2], [0.3, 0.3, 0.2])
            analytic = ndt_score(grid, scan, Pose2D.from_array(at)).hessian
            numeric = np.column_stack([
                (ndt_score(grid, scan, Pose2D.from_array(at + h * e)).gradient
                 - ndt_score(grid, scan, Pose2D.from_array(at - h * e)).gradient) / (2 * h)
                for e in np.eye(3)
            ])
            np.testing.assert_allclose(analytic, numeric, rtol=1e-4, atol=1e-4)

    def test_score_invariant_under_rigid_motion(self, grid, reference):
        motion = Pose2D(6.0, -12.0, math.pi / 2)
        moved = build_ndt(np.column_stack(motion.transform_point(reference[:, 0], reference[:, 1])), cell_size=CELL)
        scan = _inverse_apply(Pose2D(0.1, 0.05, 0.04), reference)
        for candidate in (Pose2D(0.0, 0.0, 0.0), Pose2D(0.15, -0.1, 0.02), Pose2D(-0.2, 0.1, -0.05)):
            composed = Pose2D(*motion.transform_point(candidate.x, candidate.y), motion.theta + candidate.theta)
            assert ndt_score(moved, scan, composed).score == pytest.approx(
                ndt_score(grid, scan, candidate).score, abs=1e-9
            )


class TestNdtAlign:
    """Tests for ndt_align()."""

    def test_self_alignment_stays_at_identity(self, grid, reference):
        result = ndt_align(grid, reference, Pose2D(0.0, 0.0, 0.0))
        assert result.converged
        assert result.iterations <= 2
        assert np.abs(result.transform.as_array()).max() < 1e-4

    def test_recovers_known_transform(self, grid, reference):
        truth = Pose2D(0.1, 0.05, math.radians(3.0))
        result = ndt_align(grid, _inverse_apply(truth, reference), Pose2D(0.0, 0.0, 0.0))
        assert result.converged
        assert result.transform.distance_to(truth) < 0.01
        assert abs(result.transform.theta - truth.theta) < math.radians(0.5)

    def test_score_never_decreases(self, grid, reference):
        scan = _inverse_apply(Pose2D(-0.15, 0.1, math.radians(-6.0)), reference)
        start = ndt_score(grid, scan, Pose2D(0.0, 0.0, 0.0)).score
        result = ndt_align(grid, scan, Pose2D(0.0, 0.0, 0.0))
        assert result.score >= start

    def test_no_overlap_reports_not_converged(self, grid):
        result = ndt_align(grid, np.array([[100.0, 100.0], [101.0, 100.0]]), Pose2D(0.0, 0.0, 0.0))
        assert not result.converged
        assert result.iterations == 0
        assert result.message == "no overlap"

    def test_iteration_cap(self, grid, reference):
        scan = _inverse_apply(Pose2D(0.2, -0.2, math.radians(8.0)), reference)
        result = ndt_align(grid, scan, Pose2D(0.0, 0.0, 0.0), max_iterations=1, tolerance=1e-12)
        assert not result.converged
        assert result.iterations == 1

    def test_rejected_line_search_is_not_convergence(self, grid, reference, rejecting_line_search):
        scan = _inverse_apply(Pose2D(0.2, -0.1, math.radians(5.0)), reference)
        result = ndt_align(grid, scan, Pose2D(0.0, 0.0, 0.0))
        assert not result.converged
        assert result.message == "line search stalled"
        assert result.iterations == 1
        assert result.transform == Pose2D(0.0, 0.0, 0.0)

    def test_rejected_line_search_at_optimum_converges(self, grid, reference, rejecting_line_search):
        result = ndt_align(grid, reference, Pose2D(0.0, 0.0, 0.0))
        assert result.converged
        assert result.message == "converged"

    def test_empty_scan_rejected(self, grid):
        with pytest.raises(ValueError, match="scan_points"):
            ndt_align(grid, np.empty((0, 2)), Pose2D(0.0, 0.0, 0.0))

    @pytest.mark.slow
    def test_recovery_rate(self, grid, reference):
        gen = np.random.Generator(np.random.PCG64(99))
        recovered = 0
        for _ in range(100):
            truth = Pose2D(*gen.uniform(-0.2, 0.2, 2), math.radians(gen.uniform(-10.0, 10.0)))
            result = ndt_align(grid, _inverse_apply(truth, reference), Pose2D(0.0, 0.0, 0.0), max_iterations=50)
            if (result.transform.distance_to(truth) < 0.01
                    and abs(result.transform.theta - truth.theta) < math.radians(0.5)):
                recovered += 1
        assert recovered >= 90

"""
Tests for ndt/reference.py -- building per-cell Gaussian grids.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from geometry.scan import LidarScan
from ndt.models import SparseReferenceError
from ndt.reference import build_map_ndt, build_ndt, regularize_covariance, scan_to_points


class TestBuildNdt:
    """Tests for build_ndt()."""

    def test_identical_points_get_floor(self):
        grid = build_ndt(np.full((3, 2), 0.4), cell_size=1.0)
        cell = grid.cells[(0, 0)]
        np.testing.assert_allclose(cell.mean, [0.4, 0.4])
        np.testing.assert_allclose(cell.covariance, 0.01 * np.eye(2), atol=1e-12)
        np.testing.assert_allclose(cell.inverse, 100.0 * np.eye(2), atol=1e-9)

    def test_recovers_gaussian_statistics(self):
        gen = np.random.Generator(np.random.PCG64(8))
        true_cov = np.array([[0.04, 0.01], [0.01, 0.02]])
        points = gen.multivariate_normal([5.0, 5.0], true_cov, size=5000)
        cell = build_ndt(points, cell_size=10.0).cells[(0, 0)]
        assert cell.point_count == 5000
        np.testing.assert_allclose(cell.mean, [5.0, 5.0], atol=0.01)
        np.testing.assert_allclose(cell.covariance, true_cov, atol=0.003)

    def test_points_split_between_cells(self):
        left = np.array([[0.2, 0.2], [0.4, 0.3], [0.6, 0.2]])
        right = np.array([[1.2, 0.5], [1.4, 0.6], [1.6, 0.7], [1.8, 0.8]])
        grid = build_ndt(np.vstack([left, right]), cell_size=1.0)
        assert set(grid.cells) == {(0, 0), (1, 0)}
        np.testing.assert_allclose(grid.cells[(0, 0)].mean, left.mean(axis=0))
        np.testing.assert_allclose(grid.cells[(1, 0)].mean, right.mean(axis=0))
        assert grid.cells[(1, 0)].point_count == 4

    def test_underpopulated_cells_dropped(self):
        points = np.array([[0.1, 0.1], [0.2, 0.2], [0.3, 0.1], [5.5, 5.5], [5.6, 5.6]])
        assert set(build_ndt(points, cell_size=1.0).cells) == {(0, 0)}

    def test_negative_coordinates_floor(self):
        points = np.array([[-0.2, -0.2], [-0.4, -0.3], [-0.6, -0.9]])
        assert set(build_ndt(points, cell_size=1.0).cells) == {(-1, -1)}

    def test_too_few_points(self):
        with pytest.raises(SparseReferenceError, match="reference too sparse"):
            build_ndt(np.array([[0.0, 0.0], [1.0, 1.0]]))

    def test_no_cell_reaches_three(self):
        points = np.array([[0.5, 0.5], [1.5, 0.5], [2.5, 0.5], [3.5, 0.5]])
        with pytest.raises(SparseReferenceError, match="reference too sparse"):
            build_ndt(points, cell_size=1.0)

    def test_rejects_bad_cell_size(self):
        with pytest.raises(ValueError, match="cell_size"):
            build_ndt(np.zeros((3, 2)), cell_size=0.0)


class TestRegularizeCovariance:
    """Tests for regularize_covariance()."""

    def test_conditioning_floor(self):
        cov, inv = regularize_covariance(np.diag([4.0, 1e-8]), 0.0)
        eigvals = np.linalg.eigvalsh(cov)
        assert eigvals.min() == pytest.approx(4e-3)
        np.testing.assert_allclose(cov @ inv, np.eye(2), atol=1e-9)

    def test_wide_covariance_unchanged(self):
        raw = np.array([[0.5, 0.1], [0.1, 0.3]])
        cov, _ = regularize_covariance(raw, 0.01)
        np.testing.assert_allclose(cov, raw, atol=1e-12)


class TestMapAndScanPoints:
    """Tests for build_map_ndt() and scan_to_points()."""

    def test_map_reference_covers_walls(self, room):
        grid = build_map_ndt(room, cell_size=1.0)
        assert (0, 0) in grid.cells and (5, 5) in grid.cells
        assert (2, 2) not in grid.cells

    def test_scan_points_skip_no_return(self):
        scan = LidarScan(0.0, math.pi / 2, 5.0, np.array([1.0, 5.0, 2.0, 0.5]))
        points = scan_to_points(scan)
        np.testing.assert_allclose(points, [[1.0, 0.0], [-2.0, 0.0], [0.0, -0.5]], atol=1e-12)

    def test_scan_points_stride(self):
        scan = LidarScan(0.0, math.pi / 2, 5.0, np.array([1.0, 1.0, 2.0, 1.0]))
        np.testing.assert_allclose(scan_to_points(scan, stride=2), [[1.0, 0.0], [-2.0, 0.0]], atol=1e-12)

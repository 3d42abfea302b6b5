"""
Shared pytest fixtures for the locnav test suite.

Project role:
  Provides small reference maps, wheel geometry, noise models and seeded
  generators used across multiple test modules.
"""

from __future__ import annotations

import numpy as np
import pytest

from geometry.grid import CellState, OccupancyGrid
from odometry.models import WheelGeometry
from simulation.models import NoiseModel, ScanConfig
from simulation.worlds import open_world


# ---------------------------------------------------------------------------
# Map fixtures
# ---------------------------------------------------------------------------

@pytest.fixture()
def free_grid() -> OccupancyGrid:
    """10x10 all-FREE grid at 0.1 m/cell."""
    return OccupancyGrid.filled(10, 10, 0.1)


@pytest.fixture()
def wall_grid() -> OccupancyGrid:
    """10x10 grid at 0.1 m/cell with an OCCUPIED column at x in [0.5, 0.6)."""
    mask = np.zeros((10, 10), dtype=bool)
    mask[:, 5] = True
    return OccupancyGrid.filled(10, 10, 0.1).with_cells(mask, CellState.OCCUPIED)


@pytest.fixture()
def room() -> OccupancyGrid:
    """Walled 6 m x 6 m room at 0.05 m/cell."""
    return open_world(6.0, 6.0)


# ---------------------------------------------------------------------------
# Robot and sensor fixtures
# ---------------------------------------------------------------------------

@pytest.fixture()
def wheel_geometry() -> WheelGeometry:
    """Default wheel geometry: r = 0.05 m, W = 0.30 m, 1000 ticks/rev."""
    return WheelGeometry(wheel_radius=0.05, track_width=0.30, ticks_per_rev=1000)


@pytest.fixture()
def zero_noise() -> NoiseModel:
    return NoiseModel.noiseless()


@pytest.fixture()
def scan_config() -> ScanConfig:
    return ScanConfig()


@pytest.fixture()
def rng() -> np.random.Generator:
    """Seeded PCG64 generator."""
    return np.random.Generator(np.random.PCG64(12345))

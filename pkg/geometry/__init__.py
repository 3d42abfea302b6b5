"""
Planar geometry and occupancy-grid maps.

Project role:
  Shared substrate for every other package: poses, the grid map, world/grid
  conversions, raycasting, and map file I/O.
"""

from geometry.grid import (
    Cell,
    CellState,
    OccupancyGrid,
    OutOfMapError,
    grid_to_world,
    occupied_points,
    world_to_grid,
)
from geometry.map_io import MapParseError, load_map, save_map
from geometry.pose import Pose2D, angle_diff, normalize_angle
from geometry.raycast import raycast
from geometry.scan import LidarScan

__all__ = [
    "Cell",
    "CellState",
    "LidarScan",
    "MapParseError",
    "OccupancyGrid",
    "OutOfMapError",
    "Pose2D",
    "angle_diff",
    "grid_to_world",
    "load_map",
    "normalize_angle",
    "occupied_points",
    "raycast",
    "save_map",
    "world_to_grid",
]

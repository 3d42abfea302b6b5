"""
Built-in synthetic worlds.

Project role:
  Deterministic floorplans referenced from scenario files as
  ``{"builtin": "<name>"}``. Coordinates below are in meters; the layouts
  are deliberately asymmetric so global localization has a unique answer.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from geometry.grid import CellState, OccupancyGrid

DEFAULT_RESOLUTION = 0.05
WALL = 0.1


def _blank(width_m: float, height_m: float, resolution: float) -> np.ndarray:
    return np.full(
        (round(height_m / resolution), round(width_m / resolution)), int(CellState.FREE), dtype=np.int8
    )


def _rect(cells: np.ndarray, resolution: float, x0: float, y0: float, x1: float, y1: float,
          state: CellState = CellState.OCCUPIED) -> None:
    ix0, ix1 = round(x0 / resolution), round(x1 / resolution)
    iy0, iy1 = round(y0 / resolution), round(y1 / resolution)
    cells[max(iy0, 0):max(iy1, 0), max(ix0, 0):max(ix1, 0)] = int(state)


def _border(cells: np.ndarray, resolution: float) -> None:
    h, w = cells.shape
    t = round(WALL / resolution)
    cells[:t, :] = cells[h - t:, :] = int(CellState.OCCUPIED)
    cells[:, :t] = cells[:, w - t:] = int(CellState.OCCUPIED)


def open_world(width_m: float = 6.0, height_m: float = 6.0, resolution: float = DEFAULT_RESOLUTION) -> OccupancyGrid:
    """Empty walled rectangle."""
    cells = _blank(width_m, height_m, resolution)
    _border(cells, resolution)
    return _to_grid(cells, resolution)


def four_room_floorplan(resolution: float = DEFAULT_RESOLUTION) -> OccupancyGrid:
    """
    10 m x 10 m floor with four rooms of different sizes off a central corridor.

    Corridor: y in [4.2, 5.8]. South rooms split at x = 4.5, north rooms at
    x = 6.5. Each room has one door onto the corridor and some furniture.
    """
    cells = _blank(10.0, 10.0, resolution)
    _border(cells, resolution)
    # corridor walls with doors
    _rect(cells, resolution, 0.0, 4.1, 10.0, 4.2)
    _rect(cells, resolution, 0.0, 5.8, 10.0, 5.9)
    _rect(cells, resolution, 1.2, 4.1, 2.2, 4.2, CellState.FREE)   # south-west door
    _rect(cells, resolution, 7.4, 4.1, 8.3, 4.2, CellState.FREE)   # south-east door
    _rect(cells, resolution, 3.0, 5.8, 4.0, 5.9, CellState.FREE)   # north-west door
    _rect(cells, resolution, 8.6, 5.8, 9.5, 5.9, CellState.FREE)   # north-east door
    # room dividers
    _rect(cells, resolution, 4.5, 0.0, 4.6, 4.2)
    _rect(cells, resolution, 6.5, 5.8, 6.6, 10.0)
    # furniture
    _rect(cells, resolution, 0.8, 0.8, 2.0, 1.6)    # table, south-west
    _rect(cells, resolution, 3.6, 2.6, 4.5, 3.0)    # shelf on divider
    _rect(cells, resolution, 6.0, 1.0, 6.4, 1.4)    # pillar, south-east
    _rect(cells, resolution, 8.2, 2.0, 9.9, 2.3)    # counter
    _rect(cells, resolution, 1.0, 7.5, 1.4, 9.0)    # bookcase, north-west
    _rect(cells, resolution, 4.2, 8.0, 5.4, 8.8)    # desk
    _rect(cells, resolution, 7.6, 7.0, 8.0, 7.4)    # pillar, north-east
    _rect(cells, resolution, 2.6, 4.7, 2.9, 5.3)    # bench in corridor
    return _to_grid(cells, resolution)


def corridor_world(resolution: float = DEFAULT_RESOLUTION) -> OccupancyGrid:
    """
    Straight 10 m x 2.4 m corridor along +x (inner free width 2.2 m).

    Used for detour scenarios; the corridor centerline is y = 1.2.
    """
    cells = _blank(10.0, 2.4, resolution)
    _border(cells, resolution)
    _rect(cells, resolution, 3.0, 0.1, 3.3, 0.35)   # door frames break the symmetry along x
    _rect(cells, resolution, 6.8, 2.05, 7.2, 2.3)
    return _to_grid(cells, resolution)


def _to_grid(cells: np.ndarray, resolution: float) -> OccupancyGrid:
    height, width = cells.shape
    return OccupancyGrid.filled(width, height, resolution).with_cells(
        cells == CellState.OCCUPIED, CellState.OCCUPIED
    )


BUILTIN_WORLDS: dict[str, Callable[[], OccupancyGrid]] = {
    "four_rooms": four_room_floorplan,
    "corridor": corridor_world,
    "open": open_world,
}


def get_builtin_world(name: str) -> OccupancyGrid:
    """
    Return a built-in world by name.

    Raises:
        KeyError: If the name is unknown.
    """
    try:
        factory = BUILTIN_WORLDS[name]
    except KeyError:
        raise KeyError(f"unknown builtin world {name!r}; choose from {sorted(BUILTIN_WORLDS)}") from None
    return factory()

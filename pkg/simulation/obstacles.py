"""
Static obstacle insertion and removal in the simulated world.

Project role:
  The sensors see the world map; localization and planning keep using the
  unchanged layout map. Events stamp or erase occupied discs in the world.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable

from geometry.grid import CellState, OccupancyGrid
from simulation.models import ObstacleEvent

logger = logging.getLogger(__name__)


def apply_obstacle_events(
    world: OccupancyGrid,
    layout: OccupancyGrid,
    events: Iterable[ObstacleEvent],
    step: int,
) -> OccupancyGrid:
    """
    Apply every event scheduled for ``step``.

    Params:
        world: Current world map (what the sensors see).
        layout: Reference layout map; "remove" restores its cell states.
        events: All scenario events (filtered here by step).
        step: Current step index.

    Returns:
        Updated world map (``world`` itself when nothing applies).
    """
    for event in events:
        if event.step != step:
            continue
        mask = world.disc_mask(event.center, event.radius)
        if event.action == "add":
            world = world.with_cells(mask, CellState.OCCUPIED)
        else:
            cells = world.cells.copy()
            cells[mask] = layout.cells[mask]
            world = OccupancyGrid(world.width, world.height, world.resolution, world.origin, cells)
        logger.info(
            "Step %d: obstacle %s at (%.2f, %.2f) r=%.2f",
            step, event.action, event.center[0], event.center[1], event.radius,
        )
    return world

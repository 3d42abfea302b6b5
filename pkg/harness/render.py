"""
SVG rendering of a run.

Project role:
  Draws the layout map, the true and estimated trajectories, the final
  route's waypoints and the blocked detection zones (in red) as a
  standalone SVG document.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from collections.abc import Sequence

import numpy as np
import pandas as pd

from geometry.grid import CellState, OccupancyGrid, from_map_frame

SVG_NS = "http://www.w3.org/2000/svg"
PIXELS_PER_METER = 50.0
XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>\n'
TRAJECTORY_STYLES: dict[str, str] = {
    "true": "stroke:#000000;stroke-width:2",
    "odo": "stroke:#7f7f7f;stroke-width:1.5;stroke-dasharray:6 3",
    "mcl": "stroke:#1f77b4;stroke-width:1.5",
    "ndt": "stroke:#2ca02c;stroke-width:1.5;stroke-dasharray:2 2",
    "fused": "stroke:#ff7f0e;stroke-width:1.5",
}
STYLE = """
.occupied { fill: #333333; }
.unknown { fill: #bbbbbb; }
.trajectory { fill: none; vector-effect: non-scaling-stroke; }
.waypoint { fill: #1f77b4; fill-opacity: 0.6; }
.blocked { fill: red; fill-opacity: 0.3; stroke: red; vector-effect: non-scaling-stroke; }
"""


def _fmt(value: float) -> str:
    return f"{value:.4f}".rstrip("0").rstrip(".") or "0"


def _row_runs(row: np.ndarray) -> list[tuple[int, int]]:
    """Half-open [start, end) runs of True values in a 1D mask."""
    padded = np.concatenate([[False], row, [False]])
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return list(zip(edges[0::2], edges[1::2]))


def _map_group(grid: OccupancyGrid) -> ET.Element:
    group = ET.Element("g", {
        "id": "map",
        "transform": (
            f"translate({_fmt(grid.origin.x)},{_fmt(grid.origin.y)}) "
            f"rotate({_fmt(math.degrees(grid.origin.theta))})"
        ),
    })
    res = grid.resolution
    for state, css in ((CellState.OCCUPIED, "occupied"), (CellState.UNKNOWN, "unknown")):
        mask = grid.cells == state
        for iy in range(grid.height):
            for start, end in _row_runs(mask[iy]):
                ET.SubElement(group, "rect", {
                    "class": css,
                    "x": _fmt(start * res), "y": _fmt(iy * res),
                    "width": _fmt((end - start) * res), "height": _fmt(res),
                })
    return group


def render_svg(
    grid: OccupancyGrid,
    run: pd.DataFrame,
    blocked_zones: Sequence[tuple[tuple[float, float], float]] = (),
    waypoints: Sequence[tuple[float, float]] = (),
) -> str:
    """
    Render a run as SVG.

    Params:
        grid: Layout map.
        run: Run frame with the run CSV columns; must be non-empty.
        blocked_zones: ``((x, y), radius)`` discs drawn with class "blocked".
        waypoints: Route waypoint positions.

    Returns:
        The SVG document as a string.

    Raises:
        ValueError: If the run has no rows.
    """
    if run.empty:
        raise ValueError("cannot render an empty run")

    corners = np.array([
        from_map_frame(grid, (cx, cy))
        for cx in (0.0, grid.width * grid.resolution)
        for cy in (0.0, grid.height * grid.resolution)
    ])
    xmin, ymin = corners.min(axis=0)
    xmax, ymax = corners.max(axis=0)
    scale = PIXELS_PER_METER
    width, height = (xmax - xmin) * scale, (ymax - ymin) * scale

    svg = ET.Element("svg", {
        "xmlns": SVG_NS,
        "width": _fmt(width), "height": _fmt(height),
        "viewBox": f"0 0 {_fmt(width)} {_fmt(height)}",
    })
    ET.SubElement(svg, "style").text = STYLE
    # world (x, y) -> (scale*(x - xmin), scale*(ymax - y))
    world = ET.SubElement(svg, "g", {
        "id": "world",
        "transform": f"matrix({_fmt(scale)} 0 0 {_fmt(-scale)} {_fmt(-scale * xmin)} {_fmt(scale * ymax)})",
    })
    world.append(_map_group(grid))

    trajectories = ET.SubElement(world, "g", {"id": "trajectories"})
    for name, style in TRAJECTORY_STYLES.items():
        xs, ys = run[f"{name}_x"], run[f"{name}_y"]
        if xs.isna().any() or ys.isna().any():
            continue
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
        ET.SubElement(trajectories, "polyline", {
            "class": f"trajectory {name}", "style": style, "points": points,
        })

    route = ET.SubElement(world, "g", {"id": "waypoints"})
    for x, y in waypoints:
        ET.SubElement(route, "circle", {"class": "waypoint", "cx": _fmt(x), "cy": _fmt(y), "r": "0.05"})

    zones = ET.SubElement(world, "g", {"id": "blocked-zones"})
    for (x, y), radius in blocked_zones:
        ET.SubElement(zones, "circle", {"class": "blocked", "cx": _fmt(x), "cy": _fmt(y), "r": _fmt(radius)})

    return XML_DECLARATION + ET.tostring(svg, encoding="unicode")

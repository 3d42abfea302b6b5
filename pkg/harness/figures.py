"""
Interactive trajectory figure.

Project role:
  Plotly rendering of a run (map walls, trajectories, blocked zones) saved
  as a self-contained HTML page next to the SVG.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import pandas as pd
import plotly.graph_objects as go

from geometry.grid import OccupancyGrid, occupied_points

TRACE_COLORS: dict[str, str] = {
    "true": "#000000",
    "odo": "#7f7f7f",
    "mcl": "#1f77b4",
    "ndt": "#2ca02c",
    "fused": "#ff7f0e",
}
TRACE_LABELS: dict[str, str] = {
    "true": "ground truth",
    "odo": "odometry",
    "mcl": "MCL",
    "ndt": "NDT",
    "fused": "fused",
}


def build_trajectory_figure(
    grid: OccupancyGrid,
    run: pd.DataFrame,
    blocked_zones: Sequence[tuple[tuple[float, float], float]] = (),
) -> go.Figure:
    """Build a 2D Plotly figure of the map and every reported trajectory."""
    fig = go.Figure()

    walls = occupied_points(grid, surface_only=False)
    fig.add_trace(
        go.Scattergl(
            x=walls[:, 0], y=walls[:, 1], mode="markers", name="map",
            marker=dict(symbol="square", size=3, color="#444444"),
            hoverinfo="skip",
        )
    )

    for name, color in TRACE_COLORS.items():
        xs, ys = run[f"{name}_x"], run[f"{name}_y"]
        if run.empty or xs.isna().any():
            continue
        fig.add_trace(
            go.Scatter(
                x=xs, y=ys, mode="lines", name=TRACE_LABELS[name],
                line=dict(color=color, width=2 if name == "true" else 1.5),
                customdata=run["step"], hovertemplate="step %{customdata}<br>(%{x:.2f}, %{y:.2f})",
            )
        )

    for (x, y), radius in blocked_zones:
        fig.add_shape(
            type="circle", x0=x - radius, y0=y - radius, x1=x + radius, y1=y + radius,
            line=dict(color="red"), fillcolor="rgba(255,0,0,0.25)",
        )

    fig.update_layout(
        xaxis=dict(title="x [m]", scaleanchor="y", scaleratio=1),
        yaxis=dict(title="y [m]"),
        margin=dict(l=40, r=10, t=30, b=40),
        legend=dict(orientation="h"),
        height=700,
    )
    return fig


def write_trajectory_html(fig: go.Figure, path: str | Path) -> None:
    fig.write_html(str(path), include_plotlyjs="cdn", full_html=True)

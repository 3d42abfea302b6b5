"""
Map file I/O: PGM occupancy images with a JSON metadata sidecar.

Project role:
  Loads the pre-made layout maps the stack localizes against. The image is
  an 8-bit PGM (binary P5 or ASCII P2); the sidecar JSON carries
  ``resolution``, ``origin`` ([x, y, theta]), ``occupied_thresh`` and
  ``free_thresh``. Image row 0 is the top of the map (largest y).
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from geometry.grid import CellState, OccupancyGrid
from geometry.pose import Pose2D

logger = logging.getLogger(__name__)

DEFAULT_OCCUPIED_THRESH = 0.5
DEFAULT_FREE_THRESH = 0.9

# Pixel values written by save_map (maxval 255).
PIXEL_FREE = 254
PIXEL_OCCUPIED = 0
PIXEL_UNKNOWN = 205


class MapParseError(ValueError):
    """
    Malformed map image or metadata.

    Attributes:
        field: Name of the offending header field or metadata key.
    """

    def __init__(self, message: str, field: str) -> None:
        super().__init__(f"{message} (field: {field})")
        self.field = field


@dataclass(frozen=True)
class MapMetadata:
    """Parsed sidecar metadata."""

    resolution: float
    origin: Pose2D
    occupied_thresh: float = DEFAULT_OCCUPIED_THRESH
    free_thresh: float = DEFAULT_FREE_THRESH


def _read_header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            break
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def _parse_header_int(token: bytes, field: str) -> int:
    try:
        value = int(token)
    except ValueError as exc:
        raise MapParseError(f"malformed header value {token!r}", field) from exc
    return value


def read_pgm(path: str | Path) -> tuple[np.ndarray, int]:
    """
    Read an 8-bit PGM image.

    Returns:
        ``(pixels, maxval)`` with pixels shaped (height, width), row 0 at the top.

    Raises:
        MapParseError: On a bad magic number, header, or pixel count.
    """
    data = Path(path).read_bytes()
    tokens, pos = _read_header_tokens(data, 4)
    if len(tokens) < 4:
        raise MapParseError("truncated header", "header")
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise MapParseError(f"unsupported magic number {magic!r}", "magic")
    width = _parse_header_int(tokens[1], "width")
    height = _parse_header_int(tokens[2], "height")
    maxval = _parse_header_int(tokens[3], "maxval")
    if width < 1 or height < 1:
        raise MapParseError("image dimensions must be positive", "width" if width < 1 else "height")
    if not 0 < maxval <= 255:
        raise MapParseError("only 8-bit images are supported", "maxval")

    expected = width * height
    if magic == b"P5":
        # Exactly one whitespace byte separates the header from the raster.
        raster = data[pos + 1 :]
        if len(raster) != expected:
            raise MapParseError(
                f"pixel count mismatch: expected {expected}, found {len(raster)}", "pixels"
            )
        pixels = np.frombuffer(raster, dtype=np.uint8).astype(np.int32)
    else:
        body = data[pos:]
        body_lines = [line.split(b"#", 1)[0] for line in body.splitlines()]
        values = b" ".join(body_lines).split()
        if len(values) != expected:
            raise MapParseError(
                f"pixel count mismatch: expected {expected}, found {len(values)}", "pixels"
            )
        try:
            pixels = np.array([int(v) for v in values], dtype=np.int32)
        except ValueError as exc:
            raise MapParseError("non-integer pixel value", "pixels") from exc
        if pixels.min() < 0 or pixels.max() > maxval:
            raise MapParseError("pixel value outside [0, maxval]", "pixels")
    return pixels.reshape(height, width), maxval


def read_metadata(path: str | Path) -> MapMetadata:
    """
    Read and validate the JSON sidecar.

    Raises:
        MapParseError: Naming the missing or invalid key.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MapParseError(f"unreadable metadata: {exc}", "metadata") from exc
    if not isinstance(raw, dict):
        raise MapParseError("metadata must be a JSON object", "metadata")

    if "resolution" not in raw:
        raise MapParseError("missing key", "resolution")
    try:
        resolution = float(raw["resolution"])
    except (TypeError, ValueError) as exc:
        raise MapParseError("resolution must be a number", "resolution") from exc
    if not (resolution > 0 and math.isfinite(resolution)):
        raise MapParseError("resolution must be positive", "resolution")

    if "origin" not in raw:
        raise MapParseError("missing key", "origin")
    origin_raw = raw["origin"]
    if not isinstance(origin_raw, list) or len(origin_raw) != 3:
        raise MapParseError("origin must be [x, y, theta]", "origin")
    try:
        origin = Pose2D(*(float(v) for v in origin_raw))
    except (TypeError, ValueError) as exc:
        raise MapParseError("origin values must be finite numbers", "origin") from exc

    thresholds = {}
    for key, default in (("occupied_thresh", DEFAULT_OCCUPIED_THRESH), ("free_thresh", DEFAULT_FREE_THRESH)):
        try:
            value = float(raw.get(key, default))
        except (TypeError, ValueError) as exc:
            raise MapParseError(f"{key} must be a number", key) from exc
        if not 0.0 <= value <= 1.0:
            raise MapParseError(f"{key} must lie in [0, 1]", key)
        thresholds[key] = value
    if thresholds["occupied_thresh"] > thresholds["free_thresh"]:
        raise MapParseError("occupied_thresh must not exceed free_thresh", "occupied_thresh")

    return MapMetadata(resolution=resolution, origin=origin, **thresholds)


def classify_pixels(pixels: np.ndarray, maxval: int, occupied_thresh: float, free_thresh: float) -> np.ndarray:
    """Map raw pixel values to CellState codes (dark = occupied)."""
    fraction = pixels.astype(float) / float(maxval)
    cells = np.full(pixels.shape, int(CellState.UNKNOWN), dtype=np.int8)
    cells[fraction < occupied_thresh] = int(CellState.OCCUPIED)
    cells[fraction > free_thresh] = int(CellState.FREE)
    return cells


def load_map(image_file: str | Path, metadata_file: str | Path) -> OccupancyGrid:
    """
    Load an occupancy grid from a PGM image and its JSON sidecar.

    Params:
        image_file: P2 or P5 8-bit PGM.
        metadata_file: JSON with resolution/origin/thresholds.

    Returns:
        OccupancyGrid with row 0 at the map origin (image flipped vertically).

    Raises:
        MapParseError: On any malformed header, pixel data, or metadata field.
        OSError: If the image cannot be read.
    """
    metadata = read_metadata(metadata_file)
    pixels, maxval = read_pgm(image_file)
    cells = classify_pixels(pixels, maxval, metadata.occupied_thresh, metadata.free_thresh)
    grid = OccupancyGrid(
        width=pixels.shape[1],
        height=pixels.shape[0],
        resolution=metadata.resolution,
        origin=metadata.origin,
        cells=np.flipud(cells),
    )
    logger.info(
        "Loaded map %s: %dx%d cells at %.3f m/cell",
        image_file, grid.width, grid.height, grid.resolution,
    )
    return grid


def save_map(grid: OccupancyGrid, image_file: str | Path, metadata_file: str | Path) -> None:
    """Write ``grid`` as a binary P5 PGM plus JSON sidecar readable by load_map."""
    pixels = np.full(grid.cells.shape, PIXEL_UNKNOWN, dtype=np.uint8)
    pixels[grid.cells == CellState.FREE] = PIXEL_FREE
    pixels[grid.cells == CellState.OCCUPIED] = PIXEL_OCCUPIED
    header = f"P5\n{grid.width} {grid.height}\n255\n".encode("ascii")
    image_path = Path(image_file)
    image_path.parent.mkdir(parents=True, exist_ok=True)
    image_path.write_bytes(header + np.flipud(pixels).tobytes())

    metadata = {
        "resolution": grid.resolution,
        "origin": [grid.origin.x, grid.origin.y, grid.origin.theta],
        "occupied_thresh": DEFAULT_OCCUPIED_THRESH,
        "free_thresh": DEFAULT_FREE_THRESH,
    }
    Path(metadata_file).write_text(json.dumps(metadata, indent=2), encoding="utf-8")

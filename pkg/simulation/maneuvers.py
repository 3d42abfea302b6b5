"""
Scripted maneuver files.

Project role:
  Parses the JSON array of ``{"v", "omega", "dt"}`` records that replays a
  hand-driven trajectory through the simulator.
"""

from __future__ import annotations

import json
from pathlib import Path

from simulation.models import ControlInput


class ManeuverFormatError(ValueError):
    """Malformed scripted-maneuver file; the message names the record index."""


def parse_maneuvers(records: object) -> list[ControlInput]:
    """
    Convert decoded JSON records into ControlInputs.

    Raises:
        ManeuverFormatError: If the payload is not a list of well-formed records.
    """
    if not isinstance(records, list):
        raise ManeuverFormatError("maneuvers must be a JSON array")
    controls: list[ControlInput] = []
    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise ManeuverFormatError(f"record {index}: expected an object")
        missing = [key for key in ("v", "omega", "dt") if key not in record]
        if missing:
            raise ManeuverFormatError(f"record {index}: missing {', '.join(missing)}")
        try:
            controls.append(
                ControlInput(float(record["v"]), float(record["omega"]), float(record["dt"]))
            )
        except (TypeError, ValueError) as exc:
            raise ManeuverFormatError(f"record {index}: {exc}") from exc
    return controls


def load_maneuvers(path: str | Path) -> list[ControlInput]:
    """Read a scripted-maneuver JSON file."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManeuverFormatError(f"invalid JSON: {exc}") from exc
    return parse_maneuvers(payload)

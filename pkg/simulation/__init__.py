"""
Simulated world for exercising the localization and navigation stack.

Project role:
  Ground-truth kinematics, noisy encoder/LiDAR synthesis, seeded random
  streams, scripted maneuvers and built-in synthetic maps.
"""

from simulation.maneuvers import ManeuverFormatError, load_maneuvers, parse_maneuvers
from simulation.models import ControlInput, NoiseModel, ObstacleEvent, ScanConfig, SimClock
from simulation.obstacles import apply_obstacle_events
from simulation.rng import SimulationStreams, make_streams
from simulation.sensors import step_motion, synth_encoders, synth_scan
from simulation.truth import step_truth
from simulation.worlds import BUILTIN_WORLDS, get_builtin_world

__all__ = [
    "BUILTIN_WORLDS",
    "ControlInput",
    "ManeuverFormatError",
    "NoiseModel",
    "ObstacleEvent",
    "ScanConfig",
    "SimClock",
    "SimulationStreams",
    "apply_obstacle_events",
    "get_builtin_world",
    "load_maneuvers",
    "make_streams",
    "parse_maneuvers",
    "step_motion",
    "step_truth",
    "synth_encoders",
    "synth_scan",
]

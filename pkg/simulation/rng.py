"""
Seeded random streams for the simulator and the particle filter.

Project role:
  Every random draw in a run comes from numpy's PCG64 bit generator
  (64-bit permuted congruential generator, 128-bit state). One root
  ``SeedSequence(seed)`` is spawned into independent child streams in a
  fixed order, one per consumer, so changing how many draws one consumer
  makes (e.g. more LiDAR beams) never shifts another consumer's sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STREAM_NAMES: tuple[str, ...] = ("encoders", "lidar", "mcl_init", "mcl_motion", "mcl_resample")


def make_generator(seed_sequence: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence))


@dataclass(frozen=True)
class SimulationStreams:
    """Named, independent generators derived from one seed."""

    seed: int
    encoders: np.random.Generator
    lidar: np.random.Generator
    mcl_init: np.random.Generator
    mcl_motion: np.random.Generator
    mcl_resample: np.random.Generator


def make_streams(seed: int) -> SimulationStreams:
    """
    Build the per-consumer generators for a run.

    Params:
        seed: Non-negative 64-bit run seed.

    Returns:
        SimulationStreams with one PCG64 generator per name in STREAM_NAMES.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a non-negative 64-bit integer")
    children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
    generators = {name: make_generator(child) for name, child in zip(STREAM_NAMES, children)}
    return SimulationStreams(seed=seed, **generators)

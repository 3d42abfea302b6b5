"""
Monte Carlo Localization against a known occupancy-grid map.

Project role:
  Particle filter with a likelihood-field sensor model and systematic
  resampling.
"""

from mcl.distance_field import DistanceField, precompute_distance_field
from mcl.filter import (
    effective_sample_size,
    estimate,
    init_gaussian,
    init_uniform,
    maybe_resample,
    motion_update,
    resample,
    spread,
    weight_update,
)
from mcl.localizer import MclConfig, MclStep, MonteCarloLocalizer
from mcl.models import (
    DegenerateWeightsError,
    LikelihoodFieldParams,
    MotionNoiseParams,
    NoFreeCellsError,
    Particle,
    ParticleSet,
    WeightUpdate,
)

__all__ = [
    "DegenerateWeightsError",
    "DistanceField",
    "LikelihoodFieldParams",
    "MclConfig",
    "MclStep",
    "MonteCarloLocalizer",
    "MotionNoiseParams",
    "NoFreeCellsError",
    "Particle",
    "ParticleSet",
    "WeightUpdate",
    "effective_sample_size",
    "estimate",
    "init_gaussian",
    "init_uniform",
    "maybe_resample",
    "motion_update",
    "precompute_distance_field",
    "resample",
    "spread",
    "weight_update",
]

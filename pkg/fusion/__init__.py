"""Kalman fusion of wheel odometry with scan-derived poses."""

from fusion.kalman import predict, step_fused, update
from fusion.models import (
    DegenerateInnovationError,
    FusedState,
    MeasurementModel,
    ProcessNoise,
    default_measurement_model,
    default_process_noise,
)

__all__ = [
    "DegenerateInnovationError",
    "FusedState",
    "MeasurementModel",
    "ProcessNoise",
    "default_measurement_model",
    "default_process_noise",
    "predict",
    "step_fused",
    "update",
]

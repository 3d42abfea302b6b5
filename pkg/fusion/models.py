"""
State and noise models for pose fusion.

Project role:
  Gaussian pose belief (mean + 3x3 covariance) plus the observation and
  process-noise matrices the Kalman steps consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from geometry.pose import Pose2D

SYMMETRY_TOLERANCE = 1e-9


class DegenerateInnovationError(ValueError):
    """The innovation covariance S = H P H^T + R cannot be inverted."""


def _as_matrix(name: str, value: np.ndarray) -> np.ndarray:
    matrix = np.array(value, dtype=float)
    if matrix.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{name} must be finite")
    matrix.setflags(write=False)
    return matrix


def _require_symmetric(name: str, matrix: np.ndarray) -> None:
    scale = max(1.0, float(np.abs(matrix).max()))
    if float(np.abs(matrix - matrix.T).max()) > SYMMETRY_TOLERANCE * scale:
        raise ValueError(f"{name} must be symmetric")


@dataclass(frozen=True, eq=False)
class FusedState:
    """
    Pose belief.

    Attributes:
        mean: Pose estimate.
        covariance: 3x3 covariance over (x, y, theta).
    """

    mean: Pose2D
    covariance: np.ndarray

    def __post_init__(self) -> None:
        cov = _as_matrix("covariance", self.covariance)
        _require_symmetric("covariance", cov)
        object.__setattr__(self, "covariance", cov)

    @classmethod
    def initial(cls, pose: Pose2D, std_xy: float = 0.05, std_theta: float = 0.02) -> FusedState:
        """Belief centered on ``pose`` with independent per-axis standard deviations."""
        if std_xy < 0 or std_theta < 0:
            raise ValueError("initial standard deviations must be non-negative")
        return cls(pose, np.diag([std_xy**2, std_xy**2, std_theta**2]))

    def covariance_trace(self) -> float:
        return float(np.trace(self.covariance))


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    """Observation matrix H and measurement noise R for a pose measurement."""

    observation: np.ndarray
    noise: np.ndarray

    def __post_init__(self) -> None:
        observation = _as_matrix("observation", self.observation)
        noise = _as_matrix("noise", self.noise)
        _require_symmetric("noise", noise)
        if float(np.linalg.eigvalsh(noise).min()) <= 0.0:
            raise ValueError("noise must be positive definite")
        object.__setattr__(self, "observation", observation)
        object.__setattr__(self, "noise", noise)


@dataclass(frozen=True, eq=False)
class ProcessNoise:
    """Per-step additive process noise Q."""

    covariance: np.ndarray

    def __post_init__(self) -> None:
        cov = _as_matrix("covariance", self.covariance)
        _require_symmetric("covariance", cov)
        if float(np.linalg.eigvalsh(cov).min()) < -SYMMETRY_TOLERANCE:
            raise ValueError("covariance must be positive semidefinite")
        object.__setattr__(self, "covariance", cov)


def default_measurement_model(std_xy: float = 0.1, std_theta: float = 0.05) -> MeasurementModel:
    """Full-pose measurement (H = I) with diagonal noise."""
    return MeasurementModel(np.eye(3), np.diag([std_xy**2, std_xy**2, std_theta**2]))


def default_process_noise(std_xy: float = 0.01, std_theta: float = 0.005) -> ProcessNoise:
    return ProcessNoise(np.diag([std_xy**2, std_xy**2, std_theta**2]))

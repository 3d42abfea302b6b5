"""
Kalman fusion of odometry and scan-derived pose measurements.

Project role:
  predict() propagates the belief through the midpoint odometry model and
  its Jacobian; update() blends in a pose measurement with a wrapped
  heading residual. Both are pure functions of their inputs.
"""

from __future__ import annotations

import logging

import numpy as np

from fusion.models import DegenerateInnovationError, FusedState, MeasurementModel, ProcessNoise
from geometry.pose import Pose2D, normalize_angle
from odometry.kinematics import integrate_pose, pose_jacobian
from odometry.models import OdometryDelta

logger = logging.getLogger(__name__)

# Condition number above which S is treated as singular.
MAX_INNOVATION_CONDITION = 1e14

# Third row of H that observes the heading directly.
HEADING_ROW = np.array([0.0, 0.0, 1.0])


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.T) / 2.0


def predict(state: FusedState, delta: OdometryDelta, noise: ProcessNoise) -> FusedState:
    """
    Propagate the belief by one odometry increment.

    Returns:
        New state with mean integrate_pose(mean, delta) and covariance
        F P F^T + Q, F being the Jacobian of that update.
    """
    jac = pose_jacobian(state.mean, delta)
    cov = jac @ state.covariance @ jac.T + noise.covariance
    return FusedState(integrate_pose(state.mean, delta), _symmetrize(cov))


def update(state: FusedState, measurement: Pose2D, model: MeasurementModel) -> FusedState:
    """
    Correct the belief with a pose measurement.

    Params:
        state: Prior belief.
        measurement: Scan-derived pose (MCL estimate or NDT alignment).
        model: Observation matrix H and noise R.

    Returns:
        Posterior belief. When the third row of H selects the heading, the
        heading residual is wrapped into (-pi, pi] before the gain is applied;
        any other third row is treated as a plain linear measurement. The
        posterior heading is always normalized.
        The covariance uses the Joseph form followed by symmetrization.

    Raises:
        DegenerateInnovationError: If S = H P H^T + R is singular.
    """
    h = model.observation
    prior = state.covariance
    innovation_cov = _symmetrize(h @ prior @ h.T + model.noise)
    if not np.all(np.isfinite(innovation_cov)) or np.linalg.cond(innovation_cov) > MAX_INNOVATION_CONDITION:
        raise DegenerateInnovationError("degenerate innovation covariance")
    try:
        gain = np.linalg.solve(innovation_cov, h @ prior).T
    except np.linalg.LinAlgError as exc:
        raise DegenerateInnovationError("degenerate innovation covariance") from exc

    mean = state.mean.as_array()
    residual = measurement.as_array() - h @ mean
    if np.array_equal(h[2], HEADING_ROW):
        residual[2] = normalize_angle(float(residual[2]))
    posterior = mean + gain @ residual
    posterior[2] = normalize_angle(float(posterior[2]))

    factor = np.eye(3) - gain @ h
    cov = factor @ prior @ factor.T + gain @ model.noise @ gain.T
    return FusedState(Pose2D.from_array(posterior), _symmetrize(cov))


def step_fused(
    state: FusedState,
    delta: OdometryDelta,
    scan_pose: Pose2D | None,
    model: MeasurementModel,
    noise: ProcessNoise,
) -> FusedState:
    """Predict with odometry, then update when a scan-derived pose is available."""
    predicted = predict(state, delta, noise)
    if scan_pose is None:
        return predicted
    return update(predicted, scan_pose, model)

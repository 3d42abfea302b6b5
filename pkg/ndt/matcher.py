"""
NDT scan registration.

Project role:
  Scores a transformed 2D scan against an NdtCellGrid and maximizes that
  score with damped Newton steps. Used as a baseline localizer and as an
  optional pose measurement for fusion.
"""

from __future__ import annotations

import logging

import numpy as np

from geometry.pose import Pose2D, normalize_angle
from ndt.models import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    NdtCellGrid,
    NdtNumericalError,
    NdtResult,
    NdtScore,
)

logger = logging.getLogger(__name__)

MAX_STEP_HALVINGS = 10
DAMPING_MARGIN = 1e-6


def _lookup_cells(grid: NdtCellGrid, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point cell mean and inverse covariance; ``mask`` marks points in populated cells."""
    n = points.shape[0]
    means = np.zeros((n, 2))
    inverses = np.zeros((n, 2, 2))
    mask = np.zeros(n, dtype=bool)
    keys = np.floor(points / grid.cell_size).astype(np.int64)
    for i, (kx, ky) in enumerate(keys):
        cell = grid.cells.get((int(kx), int(ky)))
        if cell is None:
            continue
        means[i] = cell.mean
        inverses[i] = cell.inverse
        mask[i] = True
    return means, inverses, mask


def ndt_score(
    grid: NdtCellGrid,
    scan_points: np.ndarray,
    transform: Pose2D,
    with_derivatives: bool = True,
) -> NdtScore:
    """
    Evaluate the NDT objective at a transform.

    Each transformed point contributes exp(-q^T C q / 2), q being its offset
    from the mean of the cell that contains it and C that cell's inverse
    covariance. Points in empty cells contribute nothing.

    Params:
        grid: Reference cell grid.
        scan_points: (n, 2) points in the scan frame.
        transform: Candidate pose (tx, ty, phi) of the scan frame.
        with_derivatives: When False, gradient and Hessian are zero-filled.

    Returns:
        NdtScore with derivatives taken w.r.t. (tx, ty, phi).
    """
    points = np.asarray(scan_points, dtype=float).reshape(-1, 2)
    c, s = np.cos(transform.theta), np.sin(transform.theta)
    px, py = points[:, 0], points[:, 1]
    moved = np.column_stack([c * px - s * py + transform.x, s * px + c * py + transform.y])

    means, inverses, mask = _lookup_cells(grid, moved)
    gradient = np.zeros(3)
    hessian = np.zeros((3, 3))
    matched = int(mask.sum())
    if matched == 0:
        return NdtScore(score=0.0, gradient=gradient, hessian=hessian, matched=0)

    q = (moved - means)[mask]
    inv = inverses[mask]
    cq = np.einsum("nab,nb->na", inv, q)
    terms = np.exp(-0.5 * np.einsum("na,na->n", q, cq))
    score = float(terms.sum())
    if not with_derivatives:
        return NdtScore(score=score, gradient=gradient, hessian=hessian, matched=matched)

    mx, my = px[mask], py[mask]
    # d(moved)/d(tx, ty, phi), stacked as (n, 2, 3)
    jac = np.zeros((matched, 2, 3))
    jac[:, 0, 0] = 1.0
    jac[:, 1, 1] = 1.0
    jac[:, 0, 2] = -s * mx - c * my
    jac[:, 1, 2] = c * mx - s * my
    # d^2(moved)/d(phi)^2; every other second derivative is zero
    second = np.column_stack([-c * mx + s * my, -s * mx - c * my])

    a = np.einsum("na,nak->nk", cq, jac)
    gradient = -np.einsum("n,nk->k", terms, a)
    jcj = np.einsum("nak,nab,nbl->nkl", jac, inv, jac)
    hessian = np.einsum("n,nkl->kl", terms, np.einsum("nk,nl->nkl", a, a) - jcj)
    hessian[2, 2] -= float(np.dot(terms, np.einsum("na,na->n", cq, second)))
    hessian = (hessian + hessian.T) / 2.0
    return NdtScore(score=score, gradient=gradient, hessian=hessian, matched=matched)


def _check_finite(result: NdtScore, iteration: int) -> None:
    if not np.isfinite(result.score):
        raise NdtNumericalError("score is not finite", iteration)
    if not (np.all(np.isfinite(result.gradient)) and np.all(np.isfinite(result.hessian))):
        raise NdtNumericalError("derivatives are not finite", iteration)


def _ascent_direction(gradient: np.ndarray, hessian: np.ndarray) -> np.ndarray:
    """Newton direction on a negative definite (damped if needed) Hessian."""
    top = float(np.linalg.eigvalsh(hessian).max())
    if top >= 0.0:
        margin = max(DAMPING_MARGIN, 1e-3 * float(np.abs(hessian).max()))
        hessian = hessian - (top + margin) * np.eye(3)
    return -np.linalg.solve(hessian, gradient)


def ndt_align(
    grid: NdtCellGrid,
    scan_points: np.ndarray,
    initial_guess: Pose2D,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    tolerance: float = DEFAULT_TOLERANCE,
) -> NdtResult:
    """
    Find the transform that maximizes the NDT score of a scan.

    Params:
        grid: Reference cell grid.
        scan_points: (n, 2) scan-frame points, n >= 1.
        initial_guess: Starting transform.
        max_iterations: Newton iteration cap.
        tolerance: Convergence threshold on the accepted step norm
            (meters and radians weighted equally).

    Returns:
        NdtResult. Only steps that do not decrease the score are accepted.

    Raises:
        ValueError: If no scan points are given.
        NdtNumericalError: If the score or its derivatives become non-finite.
    """
    points = np.asarray(scan_points, dtype=float).reshape(-1, 2)
    if points.shape[0] == 0:
        raise ValueError("scan_points must contain at least one point")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")

    pose = initial_guess.as_array()
    current = ndt_score(grid, points, initial_guess)
    _check_finite(current, 0)
    if current.matched == 0:
        logger.info("NDT alignment has no overlap with the reference")
        return NdtResult(initial_guess, 0.0, 0, False, "no overlap")

    for iteration in range(1, max_iterations + 1):
        direction = _ascent_direction(current.gradient, current.hessian)
        if not np.all(np.isfinite(direction)):
            raise NdtNumericalError("Newton step is not finite", iteration)

        alpha = 1.0
        accepted = None
        for _ in range(MAX_STEP_HALVINGS + 1):
            candidate = pose + alpha * direction
            candidate[2] = normalize_angle(float(candidate[2]))
            trial = ndt_score(grid, points, Pose2D.from_array(candidate), with_derivatives=False)
            _check_finite(trial, iteration)
            if trial.score >= current.score:
                accepted = candidate
                break
            alpha /= 2.0

        if accepted is None:
            # Nothing was accepted, so the step taken is zero. That only counts
            # as convergence when the full Newton step is itself below tolerance.
            converged = float(np.linalg.norm(direction)) < tolerance
            message = "converged" if converged else "line search stalled"
            if not converged:
                logger.info("NDT alignment stalled at iteration %d", iteration)
            return NdtResult(Pose2D.from_array(pose), current.score, iteration, converged, message)

        step_norm = float(np.linalg.norm(alpha * direction))
        pose = accepted
        current = ndt_score(grid, points, Pose2D.from_array(pose))
        _check_finite(current, iteration)
        if step_norm < tolerance:
            return NdtResult(Pose2D.from_array(pose), current.score, iteration, True, "converged")

    logger.info("NDT alignment hit the iteration cap (%d)", max_iterations)
    return NdtResult(Pose2D.from_array(pose), current.score, max_iterations, False, "max iterations")

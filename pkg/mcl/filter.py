"""
Particle filter operations for Monte Carlo Localization.

Project role:
  Initialization (uniform, around a known pose, or from a scan-guided
  global search), odometry motion update with sampled noise, likelihood-
  field weighting, systematic resampling and point estimation. All
  functions are pure: they take a ParticleSet and return a new one. Random
  draws are made in particle order from the caller's generator, so results
  depend only on the stream state.
"""

from __future__ import annotations

import itertools
import logging
import math

import numpy as np

from geometry.grid import OccupancyGrid, cell_centers, world_to_grid_array
from geometry.pose import Pose2D, normalize_angle, normalize_angles
from geometry.scan import LidarScan
from mcl.distance_field import DistanceField
from mcl.models import (
    DEFAULT_LOST_LOG_LIKELIHOOD,
    LOST_TRIM_FRACTION,
    DegenerateWeightsError,
    GlobalSearchParams,
    LikelihoodFieldParams,
    MotionNoiseParams,
    NoFreeCellsError,
    ParticleSet,
    WeightUpdate,
)
from odometry.models import OdometryDelta

logger = logging.getLogger(__name__)

# Floor on a single beam's likelihood; keeps log() finite when z_rand is 0.
MIN_BEAM_LIKELIHOOD = float(np.finfo(float).tiny)


def init_uniform(grid: OccupancyGrid, count: int, rng: np.random.Generator) -> ParticleSet:
    """
    Spread particles uniformly over the FREE space with uniform headings.

    Params:
        grid: Reference map.
        count: Number of particles M (>= 1).
        rng: Initialization stream.

    Returns:
        ParticleSet with equal weights 1/M.

    Raises:
        NoFreeCellsError: If the map has no FREE cell.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    free = grid.free_cells()
    if free.shape[0] == 0:
        raise NoFreeCellsError("map has no FREE cell")
    chosen = free[rng.integers(0, free.shape[0], size=count)]
    offsets = rng.random(size=(count, 2))
    xy = cell_centers(grid, chosen + offsets - 0.5)
    theta = normalize_angles(rng.uniform(-math.pi, math.pi, size=count))
    poses = np.column_stack([xy, theta])
    return ParticleSet(poses, np.full(count, 1.0 / count))


def init_gaussian(
    pose: Pose2D,
    std_xy: float,
    std_theta: float,
    count: int,
    rng: np.random.Generator,
    grid: OccupancyGrid | None = None,
) -> ParticleSet:
    """
    Sample particles around a known pose (tracking start).

    Samples landing outside FREE space are replaced by the mean pose when a
    map is given.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    noise = rng.normal(size=(count, 3)) * np.array([std_xy, std_xy, std_theta])
    poses = pose.as_array()[np.newaxis, :] + noise
    if grid is not None:
        ix, iy, inside = world_to_grid_array(grid, poses[:, :2])
        valid = inside & grid.free_mask[iy, ix]
        poses[~valid] = pose.as_array()
    poses[:, 2] = normalize_angles(poses[:, 2])
    return ParticleSet(poses, np.full(count, 1.0 / count))


def motion_update(
    particles: ParticleSet,
    delta: OdometryDelta,
    noise: MotionNoiseParams,
    rng: np.random.Generator,
) -> ParticleSet:
    """
    Propagate every particle through the midpoint odometry model with
    independently perturbed (d_avg, d_theta).

    d_avg'   = d_avg   + N(0, trans_std_per_meter*|d_avg|)
    d_theta' = d_theta + N(0, rot_std_per_rad*|d_theta| + rot_std_per_meter*|d_avg|)

    Weights are carried over unchanged.
    """
    m = particles.count
    trans_noise = rng.normal(size=m)
    rot_noise = rng.normal(size=m)
    trans_std = noise.trans_std_per_meter * abs(delta.d_avg)
    rot_std = noise.rot_std_per_rad * abs(delta.d_theta) + noise.rot_std_per_meter * abs(delta.d_avg)

    d_avg = delta.d_avg + trans_std * trans_noise
    d_theta = delta.d_theta + rot_std * rot_noise

    poses = np.array(particles.poses, copy=True)
    mid = poses[:, 2] + d_theta / 2.0
    poses[:, 0] += d_avg * np.cos(mid)
    poses[:, 1] += d_avg * np.sin(mid)
    poses[:, 2] = normalize_angles(poses[:, 2] + d_theta)
    return ParticleSet(poses, particles.weights)


def _usable_beams(scan: LidarScan, stride: int) -> np.ndarray:
    """Indices of every ``stride``-th beam that returned before range_max."""
    idx = np.arange(0, len(scan), stride)
    return idx[scan.ranges[idx] < scan.range_max]


def _beam_log_matrix(
    poses: np.ndarray,
    ranges: np.ndarray,
    angles: np.ndarray,
    field: DistanceField,
    params: LikelihoodFieldParams,
    range_max: float,
    sigma_hit: float | None = None,
) -> np.ndarray:
    """``(M, B)`` per-beam log-likelihoods, floored at MIN_BEAM_LIKELIHOOD."""
    sigma = params.sigma_hit if sigma_hit is None else sigma_hit
    bearings = poses[:, 2:3] + angles[np.newaxis, :]
    endpoints = np.stack(
        [
            poses[:, 0:1] + ranges * np.cos(bearings),
            poses[:, 1:2] + ranges * np.sin(bearings),
        ],
        axis=-1,
    )
    d = field.lookup(endpoints)
    per_beam = params.z_hit * np.exp(-(d * d) / (2.0 * sigma**2)) + params.z_rand / range_max
    return np.log(np.maximum(per_beam, MIN_BEAM_LIKELIHOOD))


def beam_log_likelihoods(
    poses: np.ndarray,
    scan: LidarScan,
    field: DistanceField,
    params: LikelihoodFieldParams,
) -> tuple[np.ndarray, int]:
    """
    Sum of per-beam log-likelihoods for each pose.

    Returns:
        ``(log_likelihood (M,), beams_used)``. Beams reading range_max are skipped.
    """
    idx = _usable_beams(scan, params.beam_stride)
    if idx.size == 0:
        return np.zeros(poses.shape[0]), 0
    per_beam = _beam_log_matrix(poses, scan.ranges[idx], scan.angles[idx], field, params, scan.range_max)
    return per_beam.sum(axis=1), int(idx.size)


def fit_quality(per_beam: np.ndarray, trim: float = LOST_TRIM_FRACTION) -> float:
    """Mean of the best-fitting ``1 - trim`` share of one pose's per-beam log-likelihoods."""
    keep = max(1, math.ceil((1.0 - trim) * per_beam.size))
    return float(np.sort(per_beam)[::-1][:keep].mean())


def weight_update(
    particles: ParticleSet,
    scan: LidarScan,
    field: DistanceField,
    params: LikelihoodFieldParams,
    lost_log_likelihood: float = DEFAULT_LOST_LOG_LIKELIHOOD,
) -> WeightUpdate:
    """
    Re-weight particles by the likelihood of ``scan`` under each pose.

    Per beam: z_hit*exp(-d^2 / (2*sigma_hit^2)) + z_rand/range_max, with d the
    distance from the projected endpoint to the nearest occupied cell. The
    product over beams is accumulated in log space, shifted by its maximum
    and normalized; it replaces the incoming weights rather than being
    multiplied into them. A scan with no usable beam leaves the weights as
    they were.

    Params:
        particles: Set after the motion update.
        scan: Current scan.
        field: Precomputed distance field of the reference map.
        params: Sensor model parameters.
        lost_log_likelihood: Floor on the best particle's trimmed mean
            per-beam log-likelihood (see fit_quality) below which the filter
            reports itself lost.

    Returns:
        WeightUpdate with the normalized set and the lost flag.
    """
    idx = _usable_beams(scan, params.beam_stride)
    if idx.size == 0:
        return WeightUpdate(particles.normalized(), False, 0.0, 0)

    per_beam = _beam_log_matrix(
        particles.poses, scan.ranges[idx], scan.angles[idx], field, params, scan.range_max
    )
    log_lik = per_beam.sum(axis=1)
    best = float(np.max(log_lik))
    if not math.isfinite(best):
        logger.warning("All particle weights underflowed; keeping uniform weights")
        uniform = np.full(particles.count, 1.0 / particles.count)
        return WeightUpdate(ParticleSet(particles.poses, uniform), True, best, int(idx.size))

    weights = np.exp(log_lik - best)
    weights /= weights.sum()
    fit = fit_quality(per_beam[int(np.argmax(log_lik))])
    lost = fit < lost_log_likelihood
    if lost:
        logger.info("Localization lost: best trimmed beam log-likelihood %.3f", fit)
    return WeightUpdate(ParticleSet(particles.poses, weights), lost, fit, int(idx.size))


def _spaced_beams(scan: LidarScan, count: int) -> np.ndarray:
    """Up to ``count`` usable beams spread evenly over the scan."""
    idx = _usable_beams(scan, 1)
    if idx.size <= count:
        return idx
    return idx[np.linspace(0, idx.size - 1, count).round().astype(int)]


def _lattice_positions(grid: OccupancyGrid, step: float) -> np.ndarray:
    free = grid.free_cells()
    if free.shape[0] == 0:
        raise NoFreeCellsError("map has no FREE cell")
    k = max(1, int(round(step / grid.resolution)))
    chosen = free[(free[:, 0] % k == k // 2) & (free[:, 1] % k == k // 2)]
    return cell_centers(grid, chosen if chosen.shape[0] else free)


def _distinct_best(
    scores: np.ndarray,
    positions: np.ndarray,
    headings: np.ndarray,
    search: GlobalSearchParams,
    limit: int,
) -> np.ndarray:
    """Greedy best-first pick of lattice poses that are not neighbours of an earlier pick."""
    min_xy = 1.5 * search.position_step
    min_theta = 1.5 * search.heading_step
    picked: list[np.ndarray] = []
    for flat in np.argsort(-scores, axis=None, kind="stable"):
        p, h = np.unravel_index(flat, scores.shape)
        pose = np.array([positions[p, 0], positions[p, 1], headings[h]])
        close = any(
            abs(pose[0] - other[0]) < min_xy
            and abs(pose[1] - other[1]) < min_xy
            and abs(normalize_angle(float(pose[2] - other[2]))) < min_theta
            for other in picked
        )
        if not close:
            picked.append(pose)
            if len(picked) == limit:
                break
    return np.array(picked)


def _refine(
    poses: np.ndarray,
    grid: OccupancyGrid,
    scan: LidarScan,
    field: DistanceField,
    params: LikelihoodFieldParams,
    search: GlobalSearchParams,
) -> tuple[np.ndarray, np.ndarray]:
    """Shrinking 27-neighbour pattern search on each pose under the full sensor model."""
    idx = _usable_beams(scan, params.beam_stride)
    ranges, angles = scan.ranges[idx], scan.angles[idx]
    moves = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=3)))

    def fit(candidates: np.ndarray) -> np.ndarray:
        values = _beam_log_matrix(candidates, ranges, angles, field, params, scan.range_max).mean(axis=1)
        ix, iy, inside = world_to_grid_array(grid, candidates[:, :2])
        free = np.zeros(candidates.shape[0], dtype=bool)
        free[inside] = grid.free_mask[iy[inside], ix[inside]]
        return np.where(free, values, -np.inf)

    current = fit(poses)
    for level in range(search.refine_levels):
        scale = np.array([search.position_step, search.position_step, search.heading_step]) / 2 ** (level + 1)
        for _ in range(2):
            candidates = poses[:, np.newaxis, :] + moves[np.newaxis, :, :] * scale
            values = fit(candidates.reshape(-1, 3)).reshape(poses.shape[0], moves.shape[0])
            best = np.argmax(values, axis=1)
            improved = values[np.arange(poses.shape[0]), best] > current
            poses = np.where(improved[:, np.newaxis], candidates[np.arange(poses.shape[0]), best], poses)
            current = np.where(improved, values[np.arange(poses.shape[0]), best], current)
    poses = np.array(poses, copy=True)
    poses[:, 2] = normalize_angles(poses[:, 2])
    return poses, current


def global_search(
    grid: OccupancyGrid,
    field: DistanceField,
    scan: LidarScan,
    params: LikelihoodFieldParams,
    search: GlobalSearchParams,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Pose hypotheses for a scan taken from an unknown pose.

    A lattice of positions over the FREE space, crossed with a fan of
    headings, is scored against a thinned scan under a sensor model widened
    to the lattice spacing. The best mutually distinct lattice poses are
    then refined by a shrinking pattern search under the full model.

    Params:
        grid: Reference map.
        field: Its distance field.
        scan: Current scan.
        params: Sensor model parameters.
        search: Lattice and refinement settings.

    Returns:
        ``(poses (H, 3), fit (H,))`` sorted best first, ``fit`` being the mean
        per-beam log-likelihood. Both are empty when the scan has no usable
        beam.

    Raises:
        NoFreeCellsError: If the map has no FREE cell.
    """
    positions = _lattice_positions(grid, search.position_step)
    idx = _spaced_beams(scan, search.max_beams)
    if idx.size == 0 or _usable_beams(scan, params.beam_stride).size == 0:
        return np.empty((0, 3)), np.empty(0)

    headings = -math.pi + search.heading_step * np.arange(math.ceil(2.0 * math.pi / search.heading_step))
    wide_sigma = max(params.sigma_hit, 2.0 * search.position_step)
    ranges, angles = scan.ranges[idx], scan.angles[idx]
    scores = np.empty((positions.shape[0], headings.size))
    for h, heading in enumerate(headings):
        poses = np.column_stack([positions, np.full(positions.shape[0], heading)])
        scores[:, h] = _beam_log_matrix(
            poses, ranges, angles, field, params, scan.range_max, wide_sigma
        ).mean(axis=1)

    picked = _distinct_best(scores, positions, headings, search, search.hypotheses)
    poses, fits = _refine(picked, grid, scan, field, params, search)
    order = np.argsort(-fits, kind="stable")
    logger.debug(
        "Global search scored %d lattice poses; best refined fit %.3f",
        scores.size,
        float(fits[order[0]]),
    )
    return poses[order], fits[order]


def init_from_hypotheses(
    hypotheses: np.ndarray,
    count: int,
    search: GlobalSearchParams,
    rng: np.random.Generator,
    grid: OccupancyGrid,
) -> ParticleSet:
    """
    Share ``count`` particles among pose hypotheses (best first).

    Each hypothesis gets ``count // H`` particles and the best one also takes
    the remainder; the first particle of every share sits on the hypothesis
    and the rest are drawn around it. Only the ``count`` best hypotheses are
    used when there are more hypotheses than particles.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if hypotheses.shape[0] == 0:
        raise ValueError("at least one hypothesis is required")
    used = hypotheses[:count]
    shares = np.full(used.shape[0], count // used.shape[0])
    shares[0] += count - int(shares.sum())
    centers = np.repeat(used, shares, axis=0)
    noise = rng.normal(size=(count, 3)) * np.array([search.spread_xy, search.spread_xy, search.spread_theta])
    starts = np.concatenate([[0], np.cumsum(shares)[:-1]])
    noise[starts] = 0.0
    poses = centers + noise
    ix, iy, inside = world_to_grid_array(grid, poses[:, :2])
    valid = np.zeros(count, dtype=bool)
    valid[inside] = grid.free_mask[iy[inside], ix[inside]]
    poses[~valid] = centers[~valid]
    poses[:, 2] = normalize_angles(poses[:, 2])
    return ParticleSet(poses, np.full(count, 1.0 / count))


def effective_sample_size(particles: ParticleSet) -> float:
    """M_eff = 1 / sum(w_i^2) of the normalized weights."""
    w = particles.normalized().weights
    return float(1.0 / np.sum(w * w))


def resample(particles: ParticleSet, rng: np.random.Generator, count: int | None = None) -> ParticleSet:
    """
    Low-variance (systematic) resampling.

    One uniform offset u in [0, 1) selects the positions (u + k) / M,
    k = 0..M-1, against the cumulative weights. ``count`` defaults to the
    input size, which keeps M constant across filter cycles.

    Raises:
        DegenerateWeightsError: If the weights are all zero or not normalized.
    """
    weights = particles.weights
    total = float(weights.sum())
    if not total > 0:
        raise DegenerateWeightsError("cannot resample all-zero weights")
    if abs(total - 1.0) > 1e-6:
        raise DegenerateWeightsError(f"weights must be normalized (sum={total:.9f})")
    m = particles.count if count is None else count
    if m < 1:
        raise ValueError("count must be at least 1")
    positions = (rng.random() + np.arange(m)) / m
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0
    indices = np.minimum(np.searchsorted(cumulative, positions, side="right"), particles.count - 1)
    return ParticleSet(particles.poses[indices], np.full(m, 1.0 / m))


def maybe_resample(particles: ParticleSet, rng: np.random.Generator) -> tuple[ParticleSet, bool]:
    """Resample only when M_eff < M/2; returns the set and whether it resampled."""
    if effective_sample_size(particles) < particles.count / 2.0:
        return resample(particles, rng), True
    return particles, False


def estimate(particles: ParticleSet) -> Pose2D:
    """
    Weighted point estimate: arithmetic mean of x and y, circular mean of theta.
    """
    w = particles.normalized().weights
    poses = particles.poses
    x = float(np.dot(w, poses[:, 0]))
    y = float(np.dot(w, poses[:, 1]))
    theta = math.atan2(float(np.dot(w, np.sin(poses[:, 2]))), float(np.dot(w, np.cos(poses[:, 2]))))
    return Pose2D(x, y, normalize_angle(theta))


def spread(particles: ParticleSet) -> float:
    """Weighted RMS distance of particle positions from their mean (m)."""
    w = particles.normalized().weights
    xy = particles.poses[:, :2]
    mean = w @ xy
    return float(math.sqrt(max(0.0, float(w @ np.sum((xy - mean) ** 2, axis=1)))))

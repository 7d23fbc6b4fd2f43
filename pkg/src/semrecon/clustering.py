"""Turning a noisy sparse estimate into clustered source candidates.

Recovered coefficients around a true source tend to smear over adjacent
cubes. The refinement pipeline is:

1. sparsify: drop entries more than `delta_db` below the peak (20 log10
   ratio; delta is negative),
2. mmd_cluster: max-min-distance seeding, growing the seed set while the
   farthest remaining candidate is farther than theta times the first
   seed pair's separation, then nearest-seed assignment,
3. refine_clusters: weight-averaged centroid per cluster and the
   power update w_k = sum(w^2) / sum(w).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import ScenarioConfig, containing_cube, cube_centers


class ClusteringError(ValueError):
    """Invalid clustering input."""


@dataclass
class ClusterReport:
    """Clusters of cube indices with their refined centers and powers."""

    clusters: list[list[int]]
    centers: list[tuple[float, float, float]]
    powers: list[float]
    mmd_theta: float
    delta_db: float


def sparsify(omega: np.ndarray, delta_db: float) -> tuple[np.ndarray, np.ndarray]:
    """Indices and values of entries within delta_db of the peak.

    Nonpositive entries never survive (powers are physical); an all-zero
    input yields an empty candidate set.
    """
    if delta_db >= 0:
        raise ClusteringError(f"delta_db must be negative, got {delta_db}")
    omega = np.asarray(omega, dtype=float)
    positive = omega > 0
    if not positive.any():
        return np.array([], dtype=int), np.array([])
    peak = omega[positive].max()
    keep = positive & (20.0 * np.log10(np.where(positive, omega, 1.0) / peak) >= delta_db)
    idx = np.flatnonzero(keep)
    return idx, omega[idx]


def mmd_cluster(points: np.ndarray, weights: np.ndarray,
                theta: float = 0.5) -> list[list[int]]:
    """Max-min-distance partition of weighted points.

    Seeds: the heaviest point, then the point farthest from it, then
    repeatedly the point maximizing its distance to the nearest seed while
    that distance exceeds theta * d(seed1, seed2). Members go to their
    nearest seed. Returns lists of local indices, one per seed, in seed
    order. Ties break toward the lowest index.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    weights = np.asarray(weights, dtype=float)
    q = len(points)
    if q == 0:
        raise ClusteringError("clustering needs at least one candidate")
    if not 0 < theta < 1:
        raise ClusteringError(f"theta must be in (0, 1), got {theta}")
    if q == 1:
        return [[0]]

    seeds = [int(np.argmax(weights))]
    dist_to_seed = np.linalg.norm(points - points[seeds[0]], axis=1)
    second = int(np.argmax(dist_to_seed))
    d12 = dist_to_seed[second]
    if d12 == 0.0:
        return [list(range(q))]
    seeds.append(second)

    min_dist = np.minimum(dist_to_seed, np.linalg.norm(points - points[second], axis=1))
    while True:
        candidate = int(np.argmax(min_dist))
        if min_dist[candidate] <= theta * d12:
            break
        seeds.append(candidate)
        min_dist = np.minimum(min_dist, np.linalg.norm(points - points[candidate], axis=1))

    seed_points = points[seeds]
    assign = np.argmin(np.linalg.norm(points[:, None, :] - seed_points[None, :, :], axis=2),
                       axis=1)
    return [list(np.flatnonzero(assign == k)) for k in range(len(seeds))]


def refine_clusters(cfg: ScenarioConfig, indices: np.ndarray, values: np.ndarray,
                    clusters: list[list[int]], theta: float,
                    delta_db: float) -> tuple[np.ndarray, ClusterReport]:
    """Collapse each cluster to a weighted centroid and energy-weighted power.

    The centroid is continuous; the sparse vector entry goes to the cube
    containing it. Clusters landing in the same cube add their powers.
    """
    if np.any(values <= 0):
        raise ClusteringError("cluster weights must be positive")
    centers_all = cube_centers(cfg)
    omega_star = np.zeros(cfg.n_cubes)
    report_clusters: list[list[int]] = []
    centers: list[tuple[float, float, float]] = []
    powers: list[float] = []
    for members in clusters:
        cube_idx = indices[members]
        w = values[members]
        centroid = (w[:, None] * centers_all[cube_idx]).sum(axis=0) / w.sum()
        power = float((w * w).sum() / w.sum())
        omega_star[containing_cube(cfg, centroid)] += power
        report_clusters.append([int(i) for i in cube_idx])
        centers.append(tuple(float(x) for x in centroid))
        powers.append(power)
    return omega_star, ClusterReport(report_clusters, centers, powers, theta, delta_db)

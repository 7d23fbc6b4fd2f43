"""Recovery and map-quality metrics.

Sparse-signal error is 10 log10 of the (unsquared) residual-to-signal norm
ratio; a `squared` flag gives the conventional squared-norm variant. Map
error is an RMSE over cubes, computed in dBm by default so shadowed regions
count, with a -200 dBm floor standing in for log of zero.
"""
from __future__ import annotations

import math

import numpy as np

MSE_DB_FLOOR = -300.0
DBM_FLOOR = -200.0


class MetricError(ValueError):
    """Invalid metric input."""


def mse_db(omega_est: np.ndarray, omega_true: np.ndarray,
           squared: bool = False) -> float:
    """10 log10(||est - true|| / ||true||), floored at -300 dB."""
    est = np.asarray(omega_est, dtype=float)
    true = np.asarray(omega_true, dtype=float)
    if est.shape != true.shape:
        raise MetricError("vectors must share a shape")
    denom = float(np.linalg.norm(true))
    if denom == 0.0:
        raise MetricError("true vector must be nonzero")
    ratio = float(np.linalg.norm(est - true)) / denom
    if squared:
        ratio = ratio * ratio
    if ratio == 0.0:
        return MSE_DB_FLOOR
    return max(10.0 * math.log10(ratio), MSE_DB_FLOOR)


def watts_to_dbm(x: np.ndarray, floor: float = DBM_FLOOR) -> np.ndarray:
    """Power in dBm with nonpositive entries pinned to the floor."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, floor)
    positive = x > 0
    out[positive] = np.maximum(10.0 * np.log10(x[positive] * 1e3), floor)
    return out


def rmse(x_est: np.ndarray, x_true: np.ndarray, domain: str = "dbm") -> float:
    """Root-mean-square cube error; `domain` is "dbm" (default) or "linear"."""
    est = np.asarray(x_est, dtype=float)
    true = np.asarray(x_true, dtype=float)
    if est.shape != true.shape:
        raise MetricError("maps must share a shape")
    if not (np.all(np.isfinite(est)) and np.all(np.isfinite(true))):
        raise MetricError("maps must be finite")
    if domain == "dbm":
        diff = watts_to_dbm(est) - watts_to_dbm(true)
    elif domain == "linear":
        diff = est - true
    else:
        raise MetricError(f"unknown domain {domain!r}")
    return float(np.sqrt(np.mean(diff * diff)))


def hausdorff_distance(points_a: np.ndarray, points_b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two nonempty point sets."""
    a = np.atleast_2d(np.asarray(points_a, dtype=float))
    b = np.atleast_2d(np.asarray(points_b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise MetricError("point sets must be nonempty")
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def support_distortion(cfg, omega_est: np.ndarray, omega_true: np.ndarray,
                       delta_db: float = -30.0) -> float:
    """Hausdorff distance (meters) between estimated and true source cubes.

    Supports are read off after the usual peak-relative sparsification; an
    empty estimated support scores the ROI diagonal (the worst case).
    """
    from .clustering import sparsify
    from .scenario import cube_centers
    idx_est, _ = sparsify(np.asarray(omega_est, dtype=float), delta_db)
    idx_true, _ = sparsify(np.asarray(omega_true, dtype=float), delta_db)
    if len(idx_true) == 0:
        raise MetricError("true map has no sources")
    if len(idx_est) == 0:
        return float(np.linalg.norm(cfg.roi_extent))
    centers = cube_centers(cfg)
    return hausdorff_distance(centers[idx_est], centers[idx_true])


def sample_complexity_check(n: int, k: int) -> int:
    """Smallest integer sample count strictly above 2 k ln(n / k)."""
    if not 1 <= k < n:
        raise MetricError(f"need 1 <= k < n, got k={k}, n={n}")
    bound = 2.0 * k * math.log(n / k)
    return int(math.floor(bound)) + 1

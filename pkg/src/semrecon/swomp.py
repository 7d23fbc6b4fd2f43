"""Stagewise weak orthogonal matching pursuit, the greedy baseline.

Each stage admits every column whose absolute correlation with the residual
reaches `weak_param` times the best one, refits by least squares on the
grown support, and stops when the residual is small, stops shrinking, or the
stage budget runs out. Output powers are clamped nonnegative at the end.
"""
from __future__ import annotations

import numpy as np


class SwompError(ValueError):
    """Invalid pursuit request."""


def swomp_solve(phi: np.ndarray, t: np.ndarray, weak_param: float = 0.5,
                max_stages: int = 20, residual_tol: float = 1e-6) -> np.ndarray:
    """Sparse nonnegative solution of t ~ phi w by stagewise weak OMP."""
    if not 0 < weak_param <= 1:
        raise SwompError(f"weak_param must be in (0, 1], got {weak_param}")
    if max_stages < 1:
        raise SwompError("max_stages must be >= 1")
    phi = np.asarray(phi, dtype=float)
    t = np.asarray(t, dtype=float)
    m, n = phi.shape

    omega = np.zeros(n)
    support: np.ndarray = np.array([], dtype=int)
    residual = t.copy()
    t_norm = float(np.linalg.norm(t))
    if t_norm == 0.0:
        return omega
    coeffs = np.zeros(0)
    for _ in range(max_stages):
        corr = np.abs(phi.T @ residual)
        peak = corr.max()
        if peak == 0.0:
            break
        picked = np.flatnonzero(corr >= weak_param * peak)
        new_support = np.union1d(support, picked)
        if len(new_support) == len(support):
            break
        support = new_support
        # lstsq handles rank-deficient refits (minimum-norm solution)
        coeffs, *_ = np.linalg.lstsq(phi[:, support], t, rcond=None)
        residual = t - phi[:, support] @ coeffs
        if np.linalg.norm(residual) <= residual_tol * t_norm:
            break
        if len(support) >= m:
            break
    if len(support):
        omega[support] = np.maximum(coeffs, 0.0)
    return omega

"""End-to-end map recovery: solver, optional cluster refinement, synthesis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import clustering as cl
from . import sbl
from .dictionary import GainDictionary
from .sampling import SamplingPlan
from .scenario import ScenarioConfig, cube_centers
from .swomp import swomp_solve

DELTA_DB_DEFAULT = -30.0
MMD_THETA_DEFAULT = 0.5


@dataclass
class RecoveredMap:
    """Sparse source estimate and the full map it synthesizes."""

    omega_star: np.ndarray
    x_hat: np.ndarray
    method: str
    posterior: sbl.SblPosterior | None = None
    cluster_report: cl.ClusterReport | None = None


def synthesize_map(gains: np.ndarray, omega_star: np.ndarray,
                   method: str = "direct",
                   posterior: sbl.SblPosterior | None = None,
                   cluster_report: cl.ClusterReport | None = None) -> RecoveredMap:
    """Dense map from sparse sources: x_hat = gains @ omega_star."""
    omega_star = np.asarray(omega_star, dtype=float)
    x_hat = np.asarray(gains, dtype=float) @ omega_star
    return RecoveredMap(omega_star, x_hat, method, posterior, cluster_report)


def cluster_refine(cfg: ScenarioConfig, omega: np.ndarray,
                   delta_db: float = DELTA_DB_DEFAULT,
                   theta: float = MMD_THETA_DEFAULT,
                   ) -> tuple[np.ndarray, cl.ClusterReport | None]:
    """Sparsify, cluster and refine a raw coefficient vector.

    Empty candidate sets (an all-zero estimate) pass through unrefined.
    """
    indices, values = cl.sparsify(omega, delta_db)
    if len(indices) == 0:
        return np.zeros_like(omega), None
    points = cube_centers(cfg)[indices]
    clusters = cl.mmd_cluster(points, values, theta)
    return cl.refine_clusters(cfg, indices, values, clusters, theta, delta_db)


OBSERVABLE_REL_TOL = 1e-9


def recover(cfg: ScenarioConfig, dictionary: GainDictionary, plan: SamplingPlan,
            measurements: np.ndarray, solver: str = "sbl",
            clustering: bool = True,
            hyper: sbl.SblHyperparams | None = None,
            delta_db: float = DELTA_DB_DEFAULT,
            theta: float = MMD_THETA_DEFAULT,
            weak_param: float = 0.5, max_stages: int = 20,
            method_tag: str | None = None,
            observable_rel_tol: float = OBSERVABLE_REL_TOL) -> RecoveredMap:
    """Recover the sparse sources from plan measurements and synthesize
    the full map through the same dictionary.

    Cubes whose sensing column is negligible against the strongest one
    (gain-floor cubes no sample can see) are outside the estimable space;
    their coefficients are pinned to zero rather than fit.
    """
    phi = dictionary.gains[plan.indices]
    t = np.asarray(measurements, dtype=float)
    col_norm = np.linalg.norm(phi, axis=0)
    observable = col_norm > observable_rel_tol * col_norm.max()
    obs_idx = np.flatnonzero(observable)
    phi_obs = phi[:, obs_idx]

    n = dictionary.n
    omega = np.zeros(n)
    posterior = None
    if solver == "sbl":
        post = sbl.sbl_solve(phi_obs, t, hyper)
        omega[obs_idx] = np.where(post.mu > 0, post.mu, 0.0)
        mu_full = np.zeros(n)
        mu_full[obs_idx] = post.mu
        alpha_full = np.full(n, sbl.ALPHA_MAX)
        alpha_full[obs_idx] = post.alpha
        posterior = sbl.SblPosterior(
            mu_full, post.sigma, alpha_full, post.beta,
            obs_idx[post.active_set], post.objective_trace,
            post.n_iters, post.converged)
    elif solver == "swomp":
        omega[obs_idx] = swomp_solve(phi_obs, t, weak_param=weak_param,
                                     max_stages=max_stages)
    else:
        raise ValueError(f"unknown solver {solver!r}")

    report = None
    if clustering:
        omega, report = cluster_refine(cfg, omega, delta_db, theta)

    tag = method_tag or f"{solver}{'+cluster' if clustering else ''}"
    return synthesize_map(dictionary.gains, omega, tag, posterior, report)

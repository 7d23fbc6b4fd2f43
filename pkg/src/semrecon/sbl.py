"""Sparse Bayesian recovery with EM hyperparameter estimation.

Model: t = Phi w + noise, noise precision beta with Gamma(c, d) prior, and
w_i ~ N(0, 1/alpha_i) with Gamma(a, b) priors on the precisions alpha_i.
The weight posterior is Gaussian,

    Sigma = (beta Phi^T Phi + diag(alpha))^-1,    mu = beta Sigma Phi^T t,

and EM alternates that posterior with the closed-form precision updates

    alpha_i <- (1 + 2a) / (mu_i^2 + Sigma_ii + 2b)
    beta    <- (M + 2c) / (||t - Phi mu||^2 + beta_old^-1 sum_i(1 - alpha_i Sigma_ii) + 2d)

where the alpha entering the beta update is the one that produced Sigma.
Each sweep may prune columns whose posterior variance 1/alpha_i falls under
a threshold; the adaptive threshold is mean(1/alpha) - std(1/alpha) over the
columns still active. The MAP objective

    L = -1/2 (ln|C| + t^T C^-1 t) + sum_i (a ln alpha_i - b alpha_i) + c ln beta - d beta,
    C = beta^-1 I + Phi diag(alpha)^-1 Phi^T

is tracked every sweep and must not decrease across EM steps.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

ALPHA_MAX = 1e12


class RecoveryError(RuntimeError):
    """Numerical failure inside the solver."""


@dataclass(frozen=True)
class SblHyperparams:
    """Gamma hyperpriors and iteration controls.

    prune="adaptive" uses the dynamic mean-minus-std threshold; prune="fixed"
    keeps columns with 1/alpha_i > prune_threshold (0.0 disables pruning).
    """

    a: float = 1e-4
    b: float = 1e-4
    c: float = 1e-4
    d: float = 1e-4
    max_iters: int = 1000
    convergence_tol: float = 1e-4
    prune: str = "adaptive"
    prune_threshold: float = 0.0

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError("hyperprior parameters must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be > 0")
        if self.prune not in ("adaptive", "fixed"):
            raise ValueError(f"unknown prune mode {self.prune!r}")


@dataclass
class SblPosterior:
    """Converged posterior state; mu is full length with pruned entries at 0."""

    mu: np.ndarray
    sigma: np.ndarray
    alpha: np.ndarray
    beta: float
    active_set: np.ndarray
    objective_trace: list[float] = field(default_factory=list)
    n_iters: int = 0
    converged: bool = False


def posterior_update(phi: np.ndarray, t: np.ndarray, alpha: np.ndarray,
                     beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian weight posterior (mu, Sigma) by a symmetric PD solve."""
    phi = np.asarray(phi, dtype=float)
    t = np.asarray(t, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0) or beta <= 0:
        raise RecoveryError("alpha and beta must be positive")
    precision = beta * phi.T @ phi + np.diag(alpha)
    try:
        chol = sla.cho_factor(precision, lower=True)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(precision)
        raise RecoveryError(f"posterior precision not PD (cond ~ {cond:.3e})") from exc
    sigma = sla.cho_solve(chol, np.eye(phi.shape[1]))
    mu = beta * (sigma @ (phi.T @ t))
    return mu, sigma


def _posterior_moments(phi: np.ndarray, t: np.ndarray, alpha: np.ndarray,
                       beta: float) -> tuple[np.ndarray, np.ndarray]:
    """(mu, diag Sigma) through whichever of the n x n / m x m forms is
    cheaper; must agree with posterior_update to rounding."""
    m, n = phi.shape
    if m >= n:
        mu, sigma = posterior_update(phi, t, alpha, beta)
        return mu, np.diag(sigma).copy()
    # Woodbury route: C = beta^-1 I + Phi A^-1 Phi^T is m x m
    phi_over_alpha = phi / alpha
    c = np.eye(m) / beta + phi_over_alpha @ phi.T
    try:
        chol = sla.cho_factor(c, lower=True)
    except np.linalg.LinAlgError as exc:
        raise RecoveryError("marginal covariance not PD") from exc
    w = sla.cho_solve(chol, phi_over_alpha)          # C^-1 Phi A^-1
    mu = w.T @ t                                     # A^-1 Phi^T C^-1 t
    sigma_diag = 1.0 / alpha - np.einsum("ij,ij->j", phi_over_alpha, w)
    return mu, np.maximum(sigma_diag, 0.0)


def marginal_objective(phi: np.ndarray, t: np.ndarray, alpha: np.ndarray,
                       beta: float, hyper: SblHyperparams) -> float:
    """MAP objective L(alpha, beta); the quantity EM must not decrease."""
    phi = np.asarray(phi, dtype=float)
    t = np.asarray(t, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    m = phi.shape[0]
    c_mat = np.eye(m) / beta + (phi / alpha) @ phi.T
    try:
        chol = sla.cho_factor(c_mat, lower=True)
    except np.linalg.LinAlgError as exc:
        raise RecoveryError("marginal covariance not PD") from exc
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol[0]))))
    quad = float(t @ sla.cho_solve(chol, t))
    prior_alpha = float(np.sum(hyper.a * np.log(alpha) - hyper.b * alpha))
    prior_beta = hyper.c * np.log(beta) - hyper.d * beta
    return -0.5 * (logdet + quad) + prior_alpha + prior_beta


def alpha_update(mu: np.ndarray, sigma_diag: np.ndarray,
                 hyper: SblHyperparams) -> np.ndarray:
    """Stationary point of the precision surrogate."""
    denom = mu ** 2 + sigma_diag + 2.0 * hyper.b
    with np.errstate(divide="ignore"):
        alpha = (1.0 + 2.0 * hyper.a) / denom
    return np.minimum(alpha, ALPHA_MAX)


def beta_update(t: np.ndarray, phi: np.ndarray, mu: np.ndarray,
                sigma_diag: np.ndarray, alpha: np.ndarray, beta_old: float,
                hyper: SblHyperparams) -> float:
    """Stationary point of the noise-precision surrogate.

    alpha must be the precision vector that produced (mu, sigma_diag);
    beta_old^-1 sum(1 - alpha_i Sigma_ii) is tr(Sigma Phi^T Phi) in disguise.
    """
    m = len(t)
    resid = float(np.sum((t - phi @ mu) ** 2))
    trace_term = float(np.sum(1.0 - alpha * sigma_diag)) / beta_old
    denom = resid + trace_term + 2.0 * hyper.d
    if denom <= 0:
        warnings.warn("beta update denominator clamped; posterior moments "
                      "are inconsistent", RuntimeWarning)
        denom = np.finfo(float).tiny
    return (m + 2.0 * hyper.c) / denom


def prune(alpha: np.ndarray, mode: str = "adaptive",
          threshold: float = 0.0) -> np.ndarray:
    """Indices (into alpha) that survive the variance threshold.

    adaptive: keep 1/alpha_i > mean(1/alpha) - std(1/alpha), statistics over
    the entries given (the caller passes the current active set). fixed:
    keep 1/alpha_i > threshold. An empty survivor set falls back to the
    single largest-variance entry.
    """
    inv = 1.0 / np.asarray(alpha, dtype=float)
    if mode == "adaptive":
        thr = inv.mean() - inv.std()
    elif mode == "fixed":
        thr = threshold
    else:
        raise ValueError(f"unknown prune mode {mode!r}")
    keep = np.flatnonzero(inv > thr)
    if len(keep) == 0:
        warnings.warn("pruning removed every column; keeping the largest-"
                      "variance one", RuntimeWarning)
        keep = np.array([int(np.argmax(inv))])
    return keep


def sbl_solve(phi: np.ndarray, t: np.ndarray,
              hyper: SblHyperparams | None = None,
              normalize: bool = True) -> SblPosterior:
    """Alternate posterior, precision updates and pruning to convergence.

    With normalize=True (default) the EM runs on the standardized problem
    (unit-norm columns, unit-RMS measurements) and the returned posterior is
    mapped back to the input scale. The Gamma hyperpriors and the alpha = 1
    initialization are not scale-invariant, so standardizing is what makes
    the near-uniform defaults behave near-uniformly for any physical unit,
    and it puts the pruning statistics on a per-column comparable footing;
    the objective trace refers to the standardized problem.
    """
    hyper = hyper or SblHyperparams()
    phi = np.asarray(phi, dtype=float)
    t = np.asarray(t, dtype=float)
    m, n = phi.shape
    if m < 1:
        raise RecoveryError("need at least one measurement")

    if normalize:
        t_scale = float(np.sqrt(np.mean(t * t)))
        if t_scale == 0.0:
            t_scale = 1.0
        col = np.linalg.norm(phi, axis=0)
        col[col == 0.0] = 1.0
        if t_scale != 1.0 or np.any(col != 1.0):
            post = sbl_solve(phi / col, t / t_scale, hyper, normalize=False)
            back = t_scale / col
            post.mu *= back
            f_active = back[post.active_set]
            post.sigma *= np.outer(f_active, f_active)
            post.alpha /= back * back
            post.beta /= t_scale * t_scale
            return post

    active = np.arange(n)
    alpha = np.ones(n)
    var_t = float(np.var(t))
    beta = 100.0 / var_t if var_t > 0 else 1.0
    trace: list[float] = []
    n_iters = 0
    converged = False

    for n_iters in range(1, hyper.max_iters + 1):
        phi_a = phi[:, active]
        alpha_a = alpha[active]
        mu_a, sig_diag_a = _posterior_moments(phi_a, t, alpha_a, beta)
        alpha_new = alpha_update(mu_a, sig_diag_a, hyper)
        beta_new = beta_update(t, phi_a, mu_a, sig_diag_a, alpha_a, beta, hyper)
        if not (np.all(np.isfinite(alpha_new)) and np.isfinite(beta_new)):
            raise RecoveryError(f"solver diverged at iteration {n_iters}; "
                                f"objective trace: {trace}")
        trace.append(marginal_objective(phi_a, t, alpha_new, beta_new, hyper))
        delta = float(np.max(np.abs(alpha_new - alpha_a) / alpha_a))
        alpha[active] = alpha_new
        beta = beta_new
        keep = prune(alpha[active], hyper.prune, hyper.prune_threshold)
        active = active[keep]
        if delta < hyper.convergence_tol:
            converged = True
            break

    mu_full = np.zeros(n)
    phi_a = phi[:, active]
    mu_a, sigma_a = posterior_update(phi_a, t, alpha[active], beta)
    mu_full[active] = mu_a
    return SblPosterior(mu_full, sigma_a, alpha, beta, active,
                        objective_trace=trace, n_iters=n_iters,
                        converged=converged)


def gaussian_entropy(sigma: np.ndarray) -> float:
    """Differential entropy of N(mu, Sigma): (N/2)(ln 2 pi + 1) + 1/2 ln|Sigma|."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    n = sigma.shape[0]
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise RecoveryError("entropy needs a positive-definite covariance") from exc
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return 0.5 * n * (np.log(2.0 * np.pi) + 1.0) + 0.5 * logdet

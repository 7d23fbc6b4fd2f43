"""Choosing where to sample, and synthesizing the measurements.

A sampling plan is an ordered set of cube indices; semantically it is the
one-hot row-selection matrix psi, so the sensing matrix is just the selected
rows of the gain dictionary. Plans come from two selectors:

* uniform random (the baseline), and
* greedy maximization of ln det(Phi Phi^T), equivalent to picking, at every
  step, the candidate row with the largest Schur complement against the rows
  already chosen. The Schur scores double as incremental determinant factors,
  which the tests exploit.

Gram inverses carry a small ridge (scaled to the matrix trace) because highly
correlated dictionaries make them nearly singular; the ridge is numerical
only and does not change the selection on well-conditioned inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RIDGE_SCALE = 1e-10


class SamplingError(ValueError):
    """Invalid sampling request."""


@dataclass
class SamplingPlan:
    """Ordered distinct cube indices plus how they were chosen."""

    indices: np.ndarray
    n_total: int
    method: str
    seed: int | None = None
    score_trace: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=int)
        if self.indices.ndim != 1 or len(self.indices) == 0:
            raise SamplingError("plan must hold at least one index")
        if len(np.unique(self.indices)) != len(self.indices):
            raise SamplingError("plan indices must be distinct")
        if self.indices.min() < 0 or self.indices.max() >= self.n_total:
            raise SamplingError("plan index out of range")

    @property
    def m(self) -> int:
        return len(self.indices)

    @property
    def sampling_rate(self) -> float:
        return self.m / self.n_total

    def measurement_matrix(self) -> np.ndarray:
        """The explicit one-hot psi (m x n); mostly for tests."""
        psi = np.zeros((self.m, self.n_total))
        psi[np.arange(self.m), self.indices] = 1.0
        return psi


@dataclass(frozen=True)
class MeasurementVector:
    values: np.ndarray
    noise_variance: float

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise SamplingError("measurements must be finite")


def random_plan(n: int, m: int, seed: int) -> SamplingPlan:
    """m distinct uniform indices: the first m entries of a seeded permutation.

    Plans with the same seed nest as m grows, which keeps rate sweeps using
    common random numbers comparable.
    """
    if not 1 <= m <= n:
        raise SamplingError(f"need 1 <= m <= n, got m={m}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    return SamplingPlan(perm[:m], n, "random", seed=seed)


def _ridge(gram_diag_sum: float, m: int, eps_reg: float | None) -> float:
    if eps_reg is not None:
        return eps_reg
    return RIDGE_SCALE * gram_diag_sum / max(m, 1)


def mmi_objective(phi: np.ndarray, plan: SamplingPlan,
                  eps_reg: float | None = None) -> float:
    """ln det(Phi Phi^T + ridge I) for the plan's selected rows."""
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise SamplingError("dictionary must be finite")
    rows = phi[plan.indices]
    gram = rows @ rows.T
    reg = _ridge(float(np.trace(gram)), plan.m, eps_reg)
    sign, logdet = np.linalg.slogdet(gram + reg * np.eye(plan.m))
    if sign <= 0:
        raise SamplingError("selected Gram matrix is not positive definite")
    return float(logdet)


def greedy_mmi_plan(phi: np.ndarray, m: int,
                    eps_reg: float | None = None) -> SamplingPlan:
    """Deterministic greedy log-det maximization over dictionary rows.

    Step t scores every remaining row i by its Schur complement
    g_ii - g_iS (G_SS + ridge I)^{-1} g_Si with G the row Gram matrix; the
    first pick is the largest row norm (the empty-set degenerate case) and
    ties break toward the lowest index. score_trace[t] is the incremental
    log-determinant after step t, i.e. sum of log Schur scores.
    """
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[0]
    if not 1 <= m <= n:
        raise SamplingError(f"need 1 <= m <= n, got m={m}, n={n}")
    if not np.all(np.isfinite(phi)):
        raise SamplingError("dictionary must be finite")

    gram_diag = np.einsum("ij,ij->i", phi, phi)
    reg = _ridge(float(gram_diag.sum()), m, eps_reg)

    chosen: list[int] = []
    scores = gram_diag.copy().astype(float)
    # rows of V are (L^-1 g_S,.) for the incremental Cholesky L of
    # (G_SS + reg I); scores stay equal to the current Schur diagonal
    v = np.zeros((m, n))
    available = np.ones(n, dtype=bool)
    logdet = 0.0
    trace: list[float] = []
    for t in range(m):
        masked = np.where(available, scores, -np.inf)
        pick = int(np.argmax(masked))
        pivot = scores[pick] + reg
        if pivot <= 0:
            # numerically exhausted row space: fall back to heavier ridge
            pivot = reg if reg > 0 else np.finfo(float).tiny
        chosen.append(pick)
        available[pick] = False
        logdet += float(np.log(pivot))
        trace.append(logdet)
        if t + 1 == m:
            break
        g_pick = phi @ phi[pick]
        new_row = (g_pick - v[:t].T @ v[:t, pick]) / np.sqrt(pivot)
        v[t] = new_row
        scores = scores - new_row ** 2
    return SamplingPlan(np.array(chosen), n, "mmi", score_trace=trace)


def measure(x_true: np.ndarray, plan: SamplingPlan, noise_variance: float,
            seed: int) -> MeasurementVector:
    """Sample the true map at the plan's cubes with additive Gaussian noise."""
    x_true = np.asarray(x_true, dtype=float)
    if len(x_true) != plan.n_total:
        raise SamplingError("map length does not match plan")
    values = x_true[plan.indices].copy()
    if noise_variance > 0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, np.sqrt(noise_variance), size=plan.m)
    return MeasurementVector(values, noise_variance)


def mutual_information(phi_rows: np.ndarray, alpha: np.ndarray, beta: float) -> float:
    """Information (nats) the selected rows' noisy observation carries about
    the sparse signal under the Gaussian prior diag(alpha)^-1 and noise
    precision beta:

        1/2 [ ln det(beta Phi^T Phi + Lambda) - ln det(Lambda) ]

    evaluated through the m x m form 1/2 ln det(I + beta Phi Lambda^-1 Phi^T)
    for stability.
    """
    phi_rows = np.atleast_2d(np.asarray(phi_rows, dtype=float))
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0) or beta <= 0:
        raise SamplingError("alpha and beta must be positive")
    m = phi_rows.shape[0]
    core = np.eye(m) + beta * (phi_rows / alpha) @ phi_rows.T
    sign, logdet = np.linalg.slogdet(core)
    if sign <= 0:
        raise SamplingError("information matrix lost positive definiteness")
    return 0.5 * float(logdet)

"""Stagewise weak OMP baseline."""
import numpy as np
import pytest

from semrecon.swomp import SwompError, swomp_solve


class TestSwomp:
    def test_orthonormal_exact_recovery_one_stage(self):
        rng = np.random.default_rng(0)
        q, _ = np.linalg.qr(rng.normal(size=(30, 30)))
        w = np.zeros(30)
        w[[4, 11, 23]] = [2.0, 1.8, 3.0]
        t = q @ w
        got = swomp_solve(q, t, weak_param=0.5, max_stages=1)
        assert np.allclose(got, w, atol=1e-10)

    def test_zero_measurements_empty_support(self):
        rng = np.random.default_rng(1)
        phi = rng.normal(size=(10, 20))
        got = swomp_solve(phi, np.zeros(10))
        assert not got.any()

    def test_residual_nonincreasing_per_stage(self):
        rng = np.random.default_rng(2)
        phi = rng.normal(size=(40, 200))
        w = np.zeros(200)
        w[rng.choice(200, 5, replace=False)] = rng.uniform(1, 3, 5)
        t = phi @ w + 0.01 * rng.normal(size=40)
        norms = []
        for stages in range(1, 6):
            got = swomp_solve(phi, t, weak_param=0.7, max_stages=stages,
                              residual_tol=0.0)
            # recompute the residual of the unclamped least-squares fit
            support = np.flatnonzero(got)
            if len(support):
                coeffs, *_ = np.linalg.lstsq(phi[:, support], t, rcond=None)
                norms.append(np.linalg.norm(t - phi[:, support] @ coeffs))
            else:
                norms.append(np.linalg.norm(t))
        assert all(b <= a + 1e-9 for a, b in zip(norms, norms[1:]))

    def test_noiseless_sparse_recovery(self):
        rng = np.random.default_rng(3)
        phi = rng.normal(size=(40, 200))
        phi /= np.linalg.norm(phi, axis=0)
        w = np.zeros(200)
        support = rng.choice(200, 4, replace=False)
        w[support] = rng.uniform(1, 3, 4)
        t = phi @ w
        got = swomp_solve(phi, t)
        assert np.allclose(got, w, atol=1e-6)

    def test_output_nonnegative(self):
        rng = np.random.default_rng(4)
        phi = rng.normal(size=(15, 40))
        t = rng.normal(size=15)
        assert np.all(swomp_solve(phi, t) >= 0.0)

    def test_weak_param_validated(self):
        with pytest.raises(SwompError):
            swomp_solve(np.eye(2), np.ones(2), weak_param=0.0)
        with pytest.raises(SwompError):
            swomp_solve(np.eye(2), np.ones(2), weak_param=1.5)

    def test_rank_deficient_refit_survives(self):
        phi = np.ones((6, 5))  # all columns identical
        t = np.ones(6)
        got = swomp_solve(phi, t)
        assert np.all(np.isfinite(got))
        assert np.allclose(phi @ got, t, atol=1e-9)

"""Error metrics and the sample-complexity bound."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semrecon import metrics as mt
from semrecon import scenario as sc


class TestMseDb:
    def test_perfect_estimate_hits_floor(self):
        v = np.array([1.0, 2.0, 0.0])
        assert mt.mse_db(v, v) == mt.MSE_DB_FLOOR

    def test_zero_estimate_is_zero_db(self):
        v = np.array([3.0, 4.0])
        assert mt.mse_db(np.zeros(2), v) == pytest.approx(0.0)

    def test_swapped_unit_vectors(self):
        true = np.array([1.0, 0.0])
        est = np.array([0.0, 1.0])
        assert mt.mse_db(est, true) == pytest.approx(10 * math.log10(math.sqrt(2)), rel=1e-9)
        assert mt.mse_db(est, true) == pytest.approx(1.5051499783, rel=1e-6)

    def test_squared_flag_doubles_db(self):
        true = np.array([1.0, 0.0, 2.0])
        est = np.array([0.5, 0.25, 1.0])
        assert mt.mse_db(est, true, squared=True) == pytest.approx(
            2 * mt.mse_db(est, true), rel=1e-9)

    def test_zero_true_vector_rejected(self):
        with pytest.raises(mt.MetricError):
            mt.mse_db(np.ones(3), np.zeros(3))

    @given(st.integers(0, 2**31 - 1), st.floats(0.1, 100.0))
    @settings(max_examples=30)
    def test_scale_covariance(self, seed, scale):
        rng = np.random.default_rng(seed)
        true = rng.uniform(0.1, 2.0, size=6)
        est = true + rng.normal(scale=0.3, size=6)
        assert mt.mse_db(scale * est, scale * true) == pytest.approx(
            mt.mse_db(est, true), rel=1e-9, abs=1e-9)


class TestRmse:
    def test_identical_maps_zero(self):
        x = np.array([1e-6, 1e-9, 1e-3])
        assert mt.rmse(x, x) == 0.0

    def test_uniform_3db_offset(self):
        true = np.array([1e-6, 1e-7, 1e-8])
        est = true * 10 ** 0.3
        assert mt.rmse(est, true) == pytest.approx(3.0, rel=1e-9)

    def test_matches_loop_oracle(self):
        rng = np.random.default_rng(1)
        true = rng.uniform(1e-12, 1e-5, size=40)
        est = rng.uniform(1e-12, 1e-5, size=40)
        acc = 0.0
        for e, t in zip(est, true):
            acc += (10 * math.log10(e * 1e3) - 10 * math.log10(t * 1e3)) ** 2
        assert mt.rmse(est, true) == pytest.approx(math.sqrt(acc / 40), rel=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(2)
        a = rng.uniform(1e-12, 1e-5, size=20)
        b = rng.uniform(1e-12, 1e-5, size=20)
        assert mt.rmse(a, b) == pytest.approx(mt.rmse(b, a), rel=1e-12)

    def test_zero_power_floored(self):
        true = np.array([0.0, 1e-6])
        est = np.array([0.0, 1e-6])
        assert mt.rmse(est, true) == 0.0

    def test_linear_domain_flag(self):
        true = np.array([1.0, 2.0])
        est = np.array([2.0, 4.0])
        assert mt.rmse(est, true, domain="linear") == pytest.approx(
            math.sqrt((1 + 4) / 2), rel=1e-12)

    def test_nonfinite_rejected(self):
        with pytest.raises(mt.MetricError):
            mt.rmse(np.array([np.inf]), np.array([1.0]))


class TestSupportDistortion:
    def cfg(self):
        return sc.ScenarioConfig(roi_extent=(100.0, 100.0, 50.0), grid_dims=(10, 10, 10))

    def test_exact_support_zero_distance(self):
        cfg = self.cfg()
        omega = np.zeros(cfg.n_cubes)
        omega[[10, 500]] = [2.0, 2.0]
        assert mt.support_distortion(cfg, omega, omega) == 0.0

    def test_one_cell_offset(self):
        cfg = self.cfg()
        true = np.zeros(cfg.n_cubes)
        est = np.zeros(cfg.n_cubes)
        true[0] = 2.0
        est[1] = 2.0  # next cube along x: 10 m apart
        assert mt.support_distortion(cfg, est, true) == pytest.approx(10.0)

    def test_empty_estimate_scores_roi_diagonal(self):
        cfg = self.cfg()
        true = np.zeros(cfg.n_cubes)
        true[3] = 1.0
        got = mt.support_distortion(cfg, np.zeros(cfg.n_cubes), true)
        assert got == pytest.approx(np.linalg.norm((100.0, 100.0, 50.0)))

    def test_hausdorff_hand_case(self):
        a = np.array([[0.0, 0.0, 0.0]])
        b = np.array([[3.0, 4.0, 0.0], [0.0, 1.0, 0.0]])
        # directed a->b: 1; directed b->a: 5
        assert mt.hausdorff_distance(a, b) == pytest.approx(5.0)


class TestSampleComplexity:
    def test_paper_scale_k4(self):
        assert mt.sample_complexity_check(1000, 4) == 45

    def test_paper_scale_k16(self):
        assert mt.sample_complexity_check(1000, 16) == 133

    def test_k_near_n_limit(self):
        n = 1000
        k = n - 1
        bound = 2 * k * math.log(n / k)
        assert mt.sample_complexity_check(n, k) == int(math.floor(bound)) + 1
        assert mt.sample_complexity_check(n, k) <= 3

    def test_rejects_k_not_below_n(self):
        with pytest.raises(mt.MetricError):
            mt.sample_complexity_check(10, 10)

    @given(st.integers(2, 5000), st.data())
    @settings(max_examples=50)
    def test_always_strictly_above_bound(self, n, data):
        k = data.draw(st.integers(1, n - 1))
        m = mt.sample_complexity_check(n, k)
        assert m > 2 * k * math.log(n / k)
        assert m - 1 <= 2 * k * math.log(n / k)

"""Grid geometry, truth vectors and the free-space propagation model."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semrecon import scenario as sc


def make_cfg(**kw):
    defaults = dict(roi_extent=(100.0, 100.0, 50.0), grid_dims=(10, 10, 10),
                    frequency_hz=1e9)
    defaults.update(kw)
    return sc.ScenarioConfig(**defaults)


class TestConfigValidation:
    def test_valid_config_builds(self):
        cfg = make_cfg()
        assert cfg.n_cubes == 1000
        assert cfg.cell_size == (10.0, 10.0, 5.0)

    def test_rejects_zero_extent(self):
        with pytest.raises(sc.ScenarioError):
            make_cfg(roi_extent=(0.0, 100.0, 50.0))

    def test_rejects_bad_grid(self):
        with pytest.raises(sc.ScenarioError):
            make_cfg(grid_dims=(0, 10, 10))

    def test_rejects_negative_noise(self):
        with pytest.raises(sc.ScenarioError):
            make_cfg(noise_variance=-1.0)

    def test_rejects_transmitter_outside_roi(self):
        with pytest.raises(sc.ScenarioError):
            make_cfg(transmitters=(sc.Transmitter((150.0, 5.0, 5.0), 2.0),))

    def test_rejects_building_outside_roi(self):
        with pytest.raises(sc.ScenarioError):
            make_cfg(buildings=(sc.AxisAlignedBox((90, 90, 0), (120, 95, 10)),))

    def test_rejects_nonpositive_power(self):
        with pytest.raises(sc.ScenarioError):
            sc.Transmitter((1.0, 1.0, 1.0), 0.0)

    def test_rejects_inverted_box(self):
        with pytest.raises(sc.ScenarioError):
            sc.AxisAlignedBox((5.0, 5.0, 5.0), (1.0, 9.0, 9.0))

    def test_rejects_path_loss_below_one(self):
        with pytest.raises(sc.ScenarioError):
            make_cfg(path_loss_exponent=0.5)


class TestIndexing:
    def test_first_cube_center(self):
        cfg = make_cfg()
        assert np.allclose(sc.cube_center(cfg, 0), (5.0, 5.0, 2.5))

    def test_last_cube_center(self):
        cfg = make_cfg()
        n = sc.linear_index(cfg, 9, 9, 9)
        assert np.allclose(sc.cube_center(cfg, n), (95.0, 95.0, 47.5))

    def test_single_cube_center(self):
        cfg = make_cfg(roi_extent=(2.0, 2.0, 2.0), grid_dims=(1, 1, 1))
        assert np.allclose(sc.cube_center(cfg, 0), (1.0, 1.0, 1.0))

    def test_out_of_range_raises(self):
        cfg = make_cfg()
        with pytest.raises(sc.ScenarioError):
            sc.cube_center(cfg, 1000)
        with pytest.raises(sc.ScenarioError):
            sc.grid_coords(cfg, -1)

    @given(st.integers(1, 7), st.integers(1, 7), st.integers(1, 7), st.data())
    def test_roundtrip_identity(self, nx, ny, nz, data):
        cfg = sc.ScenarioConfig(roi_extent=(1.0, 2.0, 3.0), grid_dims=(nx, ny, nz))
        n = data.draw(st.integers(0, cfg.n_cubes - 1))
        assert sc.linear_index(cfg, *sc.grid_coords(cfg, n)) == n

    def test_cube_centers_matches_scalar(self):
        cfg = make_cfg(grid_dims=(3, 4, 5))
        centers = sc.cube_centers(cfg)
        for n in range(cfg.n_cubes):
            assert np.allclose(centers[n], sc.cube_center(cfg, n))


class TestContainingCube:
    def test_interior_point(self):
        cfg = make_cfg()
        assert sc.containing_cube(cfg, (5.0, 5.0, 2.5)) == 0

    def test_boundary_goes_to_upper_cell(self):
        # cells are half-open [min, max): x = 10 starts the second column
        cfg = make_cfg()
        assert sc.containing_cube(cfg, (10.0, 0.0, 0.0)) == 1

    def test_roi_max_face_clamps_to_last_cube(self):
        cfg = make_cfg()
        assert sc.containing_cube(cfg, (100.0, 100.0, 50.0)) == cfg.n_cubes - 1

    def test_outside_raises(self):
        cfg = make_cfg()
        with pytest.raises(sc.ScenarioError):
            sc.containing_cube(cfg, (101.0, 0.0, 0.0))


class TestSparseTruth:
    def test_single_transmitter_power(self):
        cfg = make_cfg(transmitters=(sc.Transmitter((25.0, 5.0, 2.0), 2.0),))
        omega = sc.sparse_truth(cfg)
        assert omega[sc.containing_cube(cfg, (25.0, 5.0, 2.0))] == 2.0
        assert np.count_nonzero(omega) == 1

    def test_no_transmitters_zero_vector(self):
        omega = sc.sparse_truth(make_cfg())
        assert not omega.any()

    def test_colocated_transmitters_sum(self):
        txs = (sc.Transmitter((25.0, 5.0, 2.0), 1.0),
               sc.Transmitter((26.0, 6.0, 2.1), 1.0))
        cfg = make_cfg(transmitters=txs)
        omega = sc.sparse_truth(cfg)
        assert np.count_nonzero(omega) == 1
        assert omega.max() == pytest.approx(2.0)

    @given(st.integers(0, 2**31 - 1), st.integers(1, 6))
    @settings(max_examples=25, deadline=None)
    def test_power_conserved_and_support_bounded(self, seed, k):
        rng = np.random.default_rng(seed)
        txs = tuple(
            sc.Transmitter(tuple(rng.random(3) * (100, 100, 50)), float(rng.uniform(0.5, 3)))
            for _ in range(k))
        cfg = make_cfg(transmitters=txs)
        omega = sc.sparse_truth(cfg)
        assert np.count_nonzero(omega) <= k
        assert omega.sum() == pytest.approx(sum(t.power_watts for t in txs))


class TestDistance:
    def test_345_triangle(self):
        assert sc.euclidean_distance((0, 0, 0), (3, 4, 0)) == 5.0

    def test_identical_points(self):
        assert sc.euclidean_distance((1, 2, 3), (1, 2, 3)) == 0.0

    def test_unit_diagonal(self):
        assert sc.euclidean_distance((0, 0, 0), (1, 1, 1)) == pytest.approx(math.sqrt(3))


class TestFreeSpaceRss:
    def test_reference_value_1ghz_100m(self):
        # hand evaluation: 1*1*(0.299792458)^2*2 / ((4pi)^2 * 100^2)
        cfg = make_cfg()
        got = sc.free_space_rss(cfg, 100.0, 2.0)
        assert got == pytest.approx(1.138276942e-7, rel=5e-3)
        assert got == pytest.approx(0.299792458**2 * 2 / ((4 * math.pi) ** 2 * 1e4), rel=1e-12)

    def test_inverse_square_law(self):
        cfg = make_cfg()
        assert sc.free_space_rss(cfg, 200.0, 2.0) == pytest.approx(
            sc.free_space_rss(cfg, 100.0, 2.0) / 4.0)

    def test_zero_power(self):
        assert sc.free_space_rss(make_cfg(), 10.0, 0.0) == 0.0

    def test_zero_distance_raises(self):
        with pytest.raises(sc.ScenarioError):
            sc.free_space_rss(make_cfg(), 0.0, 1.0)

    @given(st.floats(1.0, 1e4), st.floats(1.05, 2.0), st.floats(0.1, 10.0))
    @settings(max_examples=50)
    def test_strictly_decreasing_in_distance(self, d, factor, p):
        cfg = make_cfg(path_loss_exponent=2.3)
        assert sc.free_space_rss(cfg, d * factor, p) < sc.free_space_rss(cfg, d, p)

    @given(st.floats(1.0, 1e3), st.floats(0.1, 10.0), st.floats(0.5, 4.0))
    @settings(max_examples=50)
    def test_linear_in_power(self, d, p, scale):
        cfg = make_cfg()
        assert sc.free_space_rss(cfg, d, p * scale) == pytest.approx(
            scale * sc.free_space_rss(cfg, d, p), rel=1e-12)


class TestTotalRss:
    def test_single_transmitter_equals_free_space(self):
        tx = sc.Transmitter((10.0, 10.0, 10.0), 2.0)
        cfg = make_cfg(transmitters=(tx,))
        pos = (40.0, 50.0, 10.0)
        d = sc.euclidean_distance(tx.position, pos)
        assert sc.total_rss_at(cfg, pos) == pytest.approx(sc.free_space_rss(cfg, d, 2.0))

    def test_two_equidistant_transmitters_double(self):
        txs = (sc.Transmitter((10.0, 50.0, 10.0), 2.0),
               sc.Transmitter((90.0, 50.0, 10.0), 2.0))
        cfg = make_cfg(transmitters=txs)
        single = sc.free_space_rss(cfg, 40.0, 2.0)
        assert sc.total_rss_at(cfg, (50.0, 50.0, 10.0)) == pytest.approx(2 * single)

    def test_matches_bruteforce_sum(self):
        rng = np.random.default_rng(7)
        txs = tuple(sc.Transmitter(tuple(rng.random(3) * (100, 100, 50)),
                                   float(rng.uniform(0.5, 3))) for _ in range(4))
        cfg = make_cfg(transmitters=txs)
        pos = (3.0, 97.0, 49.0)
        expected = sum(
            sc.free_space_rss(cfg, sc.euclidean_distance(t.position, pos), t.power_watts)
            for t in txs)
        assert sc.total_rss_at(cfg, pos) == pytest.approx(expected, rel=1e-12)

    def test_position_on_transmitter_raises(self):
        cfg = make_cfg(transmitters=(sc.Transmitter((10.0, 10.0, 10.0), 2.0),))
        with pytest.raises(sc.ScenarioError):
            sc.total_rss_at(cfg, (10.0, 10.0, 10.0))


class TestDefaultScenario:
    def test_benchmark_parameters(self):
        cfg = sc.default_scenario(k=4, seed=0)
        assert cfg.roi_extent == (100.0, 100.0, 50.0)
        assert cfg.grid_dims == (10, 10, 10)
        assert cfg.cell_size == (10.0, 10.0, 5.0)
        assert cfg.frequency_hz == 1e9
        assert len(cfg.transmitters) == 4
        assert all(t.power_watts == 2.0 for t in cfg.transmitters)

    def test_seeded_reproducibility(self):
        a = sc.default_scenario(k=4, seed=3)
        b = sc.default_scenario(k=4, seed=3)
        assert a.transmitters == b.transmitters

    def test_distinct_cubes(self):
        cfg = sc.default_scenario(k=16, seed=1)
        cubes = {sc.containing_cube(cfg, t.position) for t in cfg.transmitters}
        assert len(cubes) == 16

    def test_transmitters_avoid_buildings(self):
        cfg = sc.default_scenario(k=8, seed=2)
        for t in cfg.transmitters:
            assert not any(b.contains(t.position) for b in cfg.buildings)

import math

import numpy as np
import pytest

from su2heat.sampler import (Histogram2D, MCConfig, chi_square_test,
                             empirical_density, eigenfunction_moment,
                             model_cell_probabilities, sample_coordinates,
                             simulate_paths)


class TestConfig:
    def test_invariants(self):
        with pytest.raises(ValueError):
            MCConfig(n_paths=10, step=1e-3, t_final=0.5)
        with pytest.raises(ValueError):
            MCConfig(n_paths=100, step=-1.0, t_final=0.5)

    def test_brownian_clock_doubles_heat_time(self):
        # generator of the matrix SDE is (X^2+Y^2)/2; p_t needs 2t of
        # Brownian time
        assert MCConfig(n_paths=100, step=1e-3, t_final=0.5).n_steps == 1000


class TestSimulation:
    def test_short_time_concentration(self):
        cfg = MCConfig(n_paths=200, step=1e-8, t_final=5e-9, seed=1)
        r, theta, z = sample_coordinates(cfg)
        assert np.max(r) < 1e-3 and np.max(np.abs(z)) < 1e-3

    def test_unitarity(self):
        cfg = MCConfig(n_paths=500, step=1e-2, t_final=1.0, seed=3)
        a, b = simulate_paths(cfg)
        assert np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1.0)) < 1e-12

    def test_seed_reproducibility(self):
        cfg = MCConfig(n_paths=300, step=1e-3, t_final=0.1, seed=42)
        a1, b1 = simulate_paths(cfg)
        a2, b2 = simulate_paths(cfg)
        assert np.array_equal(a1, a2) and np.array_equal(b1, b2)

    def test_seed_sensitivity(self):
        c1 = MCConfig(n_paths=300, step=1e-3, t_final=0.1, seed=1)
        c2 = MCConfig(n_paths=300, step=1e-3, t_final=0.1, seed=2)
        a1, _ = simulate_paths(c1)
        a2, _ = simulate_paths(c2)
        assert not np.array_equal(a1, a2)

    def test_eigenfunction_moment(self):
        cfg = MCConfig(n_paths=30000, step=1e-3, t_final=0.5, seed=11)
        mean, se = eigenfunction_moment(cfg)
        assert abs(mean - math.exp(-1.0)) <= 3.5 * se

    def test_weak_error_order_one(self):
        # bias at step h shrinks by ~2 when h halves (weak order 1)
        t, n = 0.5, 400000
        exact = math.exp(-2 * t)
        biases = []
        for h in (0.05, 0.025):
            cfg = MCConfig(n_paths=n, step=h, t_final=t, seed=9)
            mean, se = eigenfunction_moment(cfg)
            biases.append(mean - exact)
        ratio = biases[0] / biases[1]
        assert 1.4 < ratio < 3.5


class TestHistogram:
    def test_invariants(self):
        with pytest.raises(ValueError):
            Histogram2D(np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0]),
                        np.zeros((2, 1)), 0)
        with pytest.raises(ValueError):
            Histogram2D(np.array([0.0, 1.0]), np.array([0.0, 1.0]),
                        np.ones((1, 1)), 5)

    def test_counts_sum(self):
        cfg = MCConfig(n_paths=5000, step=2e-3, t_final=0.3, seed=5)
        r, _, z = sample_coordinates(cfg)
        hist = empirical_density(r, z)
        assert hist.total == 5000
        assert int(hist.counts.sum()) == 5000

    def test_z_marginal_symmetric(self):
        cfg = MCConfig(n_paths=40000, step=1e-3, t_final=0.5, seed=6)
        _, _, z = sample_coordinates(cfg)
        assert abs(np.mean(z)) <= 3.5 * np.std(z) / math.sqrt(len(z))

    def test_mass_moves_toward_equator(self):
        # stationary marginal is sin(2r): mass near r = pi/2 grows with t
        out = {}
        for t in (0.2, 1.0):
            cfg = MCConfig(n_paths=20000, step=2e-3, t_final=t, seed=7)
            r, _, _ = sample_coordinates(cfg)
            out[t] = np.mean(r > 1.2)
        assert out[1.0] > out[0.2]

    def test_chi_square_against_model(self):
        cfg = MCConfig(n_paths=30000, step=1e-3, t_final=0.5, seed=8)
        r, _, z = sample_coordinates(cfg)
        hist = empirical_density(r, z)
        probs = model_cell_probabilities(0.5, hist)
        stat, dof, p, merged = chi_square_test(hist, probs)
        assert p > 0.001

    def test_small_sample_merges_cells(self):
        cfg = MCConfig(n_paths=400, step=2e-3, t_final=0.2, seed=9)
        r, _, z = sample_coordinates(cfg)
        hist = empirical_density(r, z)
        probs = model_cell_probabilities(0.2, hist)
        _, dof, _, merged = chi_square_test(hist, probs)
        assert merged > 0
        assert dof < hist.counts.size - 1

    def test_equilibrium_matches_haar(self):
        # at t = 10 the law is Haar: marginal sin(2r) x uniform z
        cfg = MCConfig(n_paths=20000, step=5e-3, t_final=10.0, seed=10)
        r, _, z = sample_coordinates(cfg)
        hist = empirical_density(r, z)
        r_lo = np.cos(2 * hist.r_edges[:-1])
        r_hi = np.cos(2 * hist.r_edges[1:])
        probs_r = (r_lo - r_hi) / 2.0
        probs_z = np.diff(hist.z_edges) / (2 * np.pi)
        probs = probs_r[:, None] * probs_z[None, :]
        stat, dof, p, _ = chi_square_test(hist, probs)
        assert p > 0.001

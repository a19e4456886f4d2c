"""Monte Carlo oracle: hypoelliptic diffusion on SU(2) matrices.

The matrix Stratonovich equation dX = X (X o dB^1 + Y o dB^2), X_0 = 1 has
generator (X^2 + Y^2)/2, i.e. half the heat generator, so the law of the
process at Brownian time 2t has density p_t against Haar measure.
``MCConfig.t_final`` is the heat time; the integrator therefore runs
``round(2 t_final / step)`` steps of size ``step`` on the Brownian clock.

The step is the group exponential X_{k+1} = X_k exp(sqrt(h) xi_1 X +
sqrt(h) xi_2 Y) with iid standard normal (xi_1, xi_2) (weak order 1).  The
exponential of M = [[0, w], [-conj(w), 0]] is closed form:
cos(|w|) I + (sin(|w|)/|w|) M.  States are stored as the top matrix row
(a11, a12); the bottom row is determined by unitarity.

Randomness is counter-based (Philox) with a fixed block layout: paths are
processed in blocks of ``_BLOCK`` and block b draws from key (seed, b), so
the sample set depends only on the seed, not on scheduling or chunk count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .geometry import coords_from_entries
from .quadrature import QuadratureSpec, gauss_grid_1d
from .su2_kernel import pt_spectral_grid

_BLOCK = 8192
_REPROJECT_EVERY = 100
_UNITARITY_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class MCConfig:
    """Simulation request: paths, Brownian step, heat time, seed."""

    n_paths: int
    step: float
    t_final: float
    seed: int = 0

    def __post_init__(self):
        if self.n_paths < 100:
            raise ValueError("n_paths must be >= 100")
        if self.step <= 0 or self.t_final <= 0:
            raise ValueError("step and t_final must be positive")

    @property
    def n_steps(self):
        n = int(round(2.0 * self.t_final / self.step))
        if n < 1:
            raise ValueError("t_final/step rounds to zero steps")
        return n


@dataclass(frozen=True)
class Histogram2D:
    """Counts of (r, z) samples on a rectangular grid."""

    r_edges: np.ndarray
    z_edges: np.ndarray
    counts: np.ndarray
    total: int

    def __post_init__(self):
        if np.any(np.diff(self.r_edges) <= 0) or np.any(np.diff(self.z_edges) <= 0):
            raise ValueError("histogram edges must be strictly increasing")
        if int(self.counts.sum()) != self.total:
            raise ValueError("histogram counts do not sum to total")


def _simulate_block(cfg: MCConfig, block_id: int, block_size: int):
    rng = np.random.Generator(np.random.Philox(key=[cfg.seed, block_id]))
    h = cfg.step
    sqh = math.sqrt(h)
    a = np.ones(block_size, dtype=complex)       # a11
    b = np.zeros(block_size, dtype=complex)      # a12
    max_drift = 0.0
    for step in range(cfg.n_steps):
        xi = rng.standard_normal((2, block_size))
        w = sqh * (xi[0] + 1j * xi[1])
        m = np.abs(w)
        cosm = np.cos(m)
        sincm = np.where(m > 0, np.sin(np.where(m > 0, m, 1.0)) /
                         np.where(m > 0, m, 1.0), 1.0)
        ew = sincm * w
        a, b = a * cosm - b * np.conj(ew), a * ew + b * cosm
        if (step + 1) % _REPROJECT_EVERY == 0:
            norm_sq = np.abs(a) ** 2 + np.abs(b) ** 2
            max_drift = max(max_drift, float(np.max(np.abs(norm_sq - 1.0))))
            scale = 1.0 / np.sqrt(norm_sq)
            a *= scale
            b *= scale
    norm_sq = np.abs(a) ** 2 + np.abs(b) ** 2
    max_drift = max(max_drift, float(np.max(np.abs(norm_sq - 1.0))))
    assert max_drift <= _UNITARITY_DRIFT_TOL, \
        f"unitarity drift {max_drift:.3e} above tolerance"
    return a, b


def simulate_paths(cfg: MCConfig):
    """Simulate all paths; returns the matrix rows (a11, a12) at t_final.

    Deterministic given the seed (fixed Philox block layout).
    """
    a_parts, b_parts = [], []
    n_blocks = (cfg.n_paths + _BLOCK - 1) // _BLOCK
    for blk in range(n_blocks):
        size = min(_BLOCK, cfg.n_paths - blk * _BLOCK)
        a, b = _simulate_block(cfg, blk, size)
        a_parts.append(a)
        b_parts.append(b)
    return np.concatenate(a_parts), np.concatenate(b_parts)


def sample_coordinates(cfg: MCConfig):
    """Cylindric coordinates (r, theta, z) of the simulated endpoints."""
    a, b = simulate_paths(cfg)
    return coords_from_entries(a, b)


def empirical_density(r, z, r_edges=None, z_edges=None) -> Histogram2D:
    """Bin samples into a (r, z) histogram over the chart."""
    r_edges = np.linspace(0.0, np.pi / 2, 13) if r_edges is None else np.asarray(r_edges)
    z_edges = np.linspace(-np.pi, np.pi, 13) if z_edges is None else np.asarray(z_edges)
    counts, _, _ = np.histogram2d(r, z, bins=(r_edges, z_edges))
    return Histogram2D(r_edges, z_edges, counts, int(counts.sum()))


def model_cell_probabilities(t, hist: Histogram2D, order=6):
    """Cell probabilities of the marginal density p_t(r, z) sin(2r)/(2 pi)
    by per-cell tensor Gauss quadrature."""
    nr = len(hist.r_edges) - 1
    nz = len(hist.z_edges) - 1
    probs = np.empty((nr, nz))
    nodes, weights = np.polynomial.legendre.leggauss(order)
    r_nodes, r_w = [], []
    for i in range(nr):
        a, b = hist.r_edges[i], hist.r_edges[i + 1]
        r_nodes.append(0.5 * (a + b) + 0.5 * (b - a) * nodes)
        r_w.append(0.5 * (b - a) * weights)
    z_nodes, z_w = [], []
    for j in range(nz):
        a, b = hist.z_edges[j], hist.z_edges[j + 1]
        z_nodes.append(0.5 * (a + b) + 0.5 * (b - a) * nodes)
        z_w.append(0.5 * (b - a) * weights)
    r_all = np.concatenate(r_nodes)
    z_all = np.concatenate(z_nodes)
    vals, _ = pt_spectral_grid(t, r_all[:, None], z_all[None, :])
    dens = vals * np.sin(2.0 * r_all)[:, None] / (2.0 * np.pi)
    for i in range(nr):
        for j in range(nz):
            block = dens[i * order:(i + 1) * order, j * order:(j + 1) * order]
            probs[i, j] = r_w[i] @ block @ z_w[j]
    return probs


def chi_square_test(hist: Histogram2D, probs, min_expected=5.0):
    """Pearson chi-square of the histogram against model cell probabilities.

    Cells with expected count below ``min_expected`` are pooled into one
    merged cell before the statistic is formed.  Returns (stat, dof,
    p_value, n_merged).
    """
    expected = probs.ravel() * hist.total
    observed = hist.counts.ravel()
    small = expected < min_expected
    exp_used = list(expected[~small])
    obs_used = list(observed[~small])
    n_merged = int(np.sum(small))
    if n_merged:
        exp_used.append(float(expected[small].sum()))
        obs_used.append(float(observed[small].sum()))
    exp_used = np.asarray(exp_used)
    obs_used = np.asarray(obs_used)
    # renormalize the tiny mismatch between cell-sum and 1 (chart coverage)
    exp_used *= obs_used.sum() / exp_used.sum()
    stat = float(np.sum((obs_used - exp_used) ** 2 / exp_used))
    dof = len(exp_used) - 1
    p = float(stats.chi2.sf(stat, dof))
    return stat, dof, p, n_merged


def eigenfunction_moment(cfg: MCConfig):
    """(mean, stderr) of cos(r) cos(z) = Re a11 over the sample set.

    The exact heat expectation is e^{-2 t_final}.
    """
    a, _ = simulate_paths(cfg)
    vals = np.real(a)
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    return mean, stderr

"""Gaveau's Heisenberg heat kernel and the dilation limit of the SU(2) kernel.

With respect to Lebesgue measure r dr dtheta dz,

    h_t(r, z) = (1/16 pi^2) Int_R e^{i lam z/2} (lam/sinh(lam t))
                e^{-(r^2/4) lam coth(lam t)} d lam
              = (1/8 pi^2) Int_0^inf cos(lam z/2) (lam/sinh(lam t))
                e^{-(r^2/4) lam coth(lam t)} d lam,

with the removable lam = 0 singularity taking the values
lam/sinh(lam t) -> 1/t and lam coth(lam t) -> 1/t.  The scaling identity
h_t(r,z) = t^{-2} h_1(r/sqrt t, z/t) follows by substituting lam -> lam/t.
The SU(2) kernel dilates onto it:  t^2 p_t(sqrt(t) r, t z) -> 2 pi^2
h_1(r, z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Jet2
from .quadrature import DEFAULT_SPEC, QuadratureSpec, adaptive_quad, gauss_grid_1d
from .su2_kernel import pt


@dataclass(frozen=True)
class HeisPoint:
    """Cylindric Heisenberg coordinates (theta suppressed by symmetry)."""

    r: float
    z: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("HeisPoint requires r >= 0")


def _integrand_factors(lam, t, r):
    lam = np.asarray(lam, dtype=float)
    small = np.abs(lam * t) < 1e-8
    lam_safe = np.where(small, 1.0, lam)
    ratio = np.where(small, 1.0 / t, lam_safe / np.sinh(lam_safe * t))
    coth = np.where(small, 1.0 / t, lam_safe / np.tanh(lam_safe * t))
    return ratio * np.exp(-(r * r / 4.0) * coth)


def gaveau_kernel(t, p: HeisPoint, spec: QuadratureSpec | None = None) -> float:
    """h_t at a point by adaptive quadrature of the cosine form."""
    if t <= 0:
        raise ValueError("gaveau_kernel requires t > 0")
    spec = spec or DEFAULT_SPEC
    r, z = p.r, p.z
    # tail majorant ~ 2 lam e^{-lam (t + r^2/4)}
    rate = t + r * r / 4.0
    lam_max = (50.0 + math.log1p(1.0 / rate)) / rate + 10.0

    def f(lam):
        return np.cos(lam * z / 2.0) * _integrand_factors(lam, t, r)

    osc_panels = max(8, int(lam_max * abs(z) / 12.0) + 8)
    val, _ = adaptive_quad(f, 0.0, lam_max, spec, initial_panels=osc_panels)
    return val / (8.0 * np.pi ** 2)


def gaveau_grid(t, r, z, n_panels=96, order=12):
    """Vectorized h_t (and its r, z partials) on point arrays.

    Returns (h, hr, hz) sharing one composite Gauss lambda-grid; used by
    the moment and Fisher-information quadratures where pointwise adaptive
    calls would be wasteful.
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    rate = t + np.min(r) ** 2 / 4.0
    lam_max = (50.0 + math.log1p(1.0 / rate)) / rate + 10.0
    zmax = float(np.max(np.abs(z)))
    n_panels = max(n_panels, int(lam_max * zmax / 12.0) + 16)
    lam, w = gauss_grid_1d(0.0, lam_max, n_panels, order)

    shape = r.shape
    rf = r.reshape(-1, 1)
    zf = z.reshape(-1, 1)
    lam_t = lam * t
    small = np.abs(lam_t) < 1e-8
    lam_safe = np.where(small, 1.0, lam)
    ratio = np.where(small, 1.0 / t, lam_safe / np.sinh(np.where(small, 1.0, lam_t)))
    coth = np.where(small, 1.0 / t, lam_safe / np.tanh(np.where(small, 1.0, lam_t)))
    base = ratio[None, :] * np.exp(-(rf ** 2 / 4.0) * coth[None, :])
    cosz = np.cos(lam[None, :] * zf / 2.0)
    sinz = np.sin(lam[None, :] * zf / 2.0)
    h = (base * cosz) @ w / (8.0 * np.pi ** 2)
    hr = (base * cosz * (-(rf / 2.0) * coth[None, :])) @ w / (8.0 * np.pi ** 2)
    hz = (base * (-sinz) * (lam[None, :] / 2.0)) @ w / (8.0 * np.pi ** 2)
    return h.reshape(shape), hr.reshape(shape), hz.reshape(shape)


def heis_gamma(j: Jet2) -> float:
    """Heisenberg carre du champ for theta-independent f: fr^2 + r^2 fz^2."""
    if j.r < 0:
        raise ValueError("heis_gamma requires r >= 0")
    return j.fr ** 2 + j.r ** 2 * j.fz ** 2


def dilation_limit_error(t, r, z) -> float:
    """|t^2 p_t(sqrt(t) r, t z) - 2 pi^2 h_1(r, z)| at a Heisenberg point."""
    if math.sqrt(t) * r > np.pi / 2 - 1e-9:
        raise ValueError("sqrt(t) r must stay inside the chart")
    val = t * t * pt(t, math.sqrt(t) * r, t * z).value
    lim = 2.0 * np.pi ** 2 * gaveau_kernel(1.0, HeisPoint(r, z))
    return abs(val - lim)


def fisher_information(r_max=8.0, z_max=40.0, n_r=160, n_z=220) -> float:
    """(1/2) Int h_1 GammaH(ln h_1) r dr dtheta dz over the truncated box.

    This is the t -> 0 limit of t C(t); the known Heisenberg value is 1.
    Composite Gauss on [0, r_max] x [0, z_max] (z-evenness doubles it).
    Cells where h_1 has decayed below 1e-13 of its peak are dropped: the
    quadrature noise there would swamp the log-gradient while the true
    mass h GammaH(ln h) is negligible at the 1e-2 accuracy target.
    """
    rg, wr = gauss_grid_1d(1e-6, r_max, n_r // 8, 8)
    zg, wz = gauss_grid_1d(0.0, z_max, n_z // 8, 8)
    R, Z = np.meshgrid(rg, zg, indexing="ij")
    h, hr, hz = gaveau_grid(1.0, R, Z)
    keep = h > 1e-13 * np.max(h)
    h_safe = np.where(keep, h, 1.0)
    gam = (hr / h_safe) ** 2 + R ** 2 * (hz / h_safe) ** 2
    integrand = np.where(keep, h * gam * R, 0.0)
    inner = integrand @ wz
    total = wr @ inner
    # theta gives 2 pi, evenness in z gives 2, definition has 1/2
    return float(2.0 * np.pi * total)

"""Carnot-Caratheodory distance from the identity and small-time kernel
asymptotics.

Off the cut locus the squared distance comes from the unique root
theta*(r, z) in [-pi, pi] of

    F(theta) = theta - z - cos(r) sin(theta) arccos(u)/sqrt(1-u^2) = 0,
    u = cos(r) cos(theta),

whose strict monotonicity (the theta-derivative equals the explicitly
positive saddle factor) certifies plain bisection.  The defining equation
turns the quotient form (theta-z)^2 tan^2 r / sin^2 theta into the
everywhere-stable  d^2 = sin^2(r) arccos(u*)^2 / (1 - u*^2),  which is the
form evaluated here; at theta* = 0 it reduces exactly to r^2.

On the cut locus (r = 0):  d^2(0, z) = 2 pi |z| - z^2, diameter pi^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeCurvatureTerm, NoBracketError
from .su2_kernel import pt

R_MIN_CUTLOCUS = 1e-3
_BISECT_ITERS = 200


@dataclass(frozen=True)
class DistanceResult:
    theta_star: float
    d_squared: float
    residual: float
    on_cut_locus: bool

    @property
    def distance(self):
        return math.sqrt(self.d_squared)


def _rhs_factor(r, theta):
    """cos(r) arccos(u)/sqrt(1-u^2) with u = cos r cos theta (u < 1 for r>0)."""
    u = math.cos(r) * math.cos(theta)
    return math.cos(r) * math.acos(u) / math.sqrt(1.0 - u * u)


def theta_star(r, z) -> tuple[float, float]:
    """Root of the distance equation and its residual, r strictly interior.

    F is strictly increasing on [-pi, pi] with F(-pi) = -pi - z <= 0 and
    F(pi) = pi - z >= 0 (sin(theta) kills the transcendental part at the
    endpoints), so bisection always converges; 200 iterations drive the
    interval below double resolution.
    """
    r = float(r)
    z = float(z)
    if not 0.0 < r < np.pi / 2:
        raise ValueError("theta_star requires r strictly inside (0, pi/2)")

    def F(th):
        return th - z - math.sin(th) * _rhs_factor(r, th)

    a, b = -np.pi, np.pi
    fa, fb = F(a), F(b)
    if fa > 0.0 or fb < 0.0:
        raise NoBracketError(
            f"F does not bracket a root on [-pi, pi] at (r={r}, z={z})")
    for _ in range(_BISECT_ITERS):
        m = 0.5 * (a + b)
        fm = F(m)
        if fm == 0.0:
            return m, 0.0
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
        if b - a < 1e-17:
            break
    root = 0.5 * (a + b)
    return root, F(root)


def cc_distance(r, z) -> DistanceResult:
    """Squared CC distance from the identity to the point (r, any theta, z)."""
    r = float(r)
    z = float(z)
    if r < R_MIN_CUTLOCUS:
        za = abs(z)
        return DistanceResult(0.0, 2.0 * np.pi * za - za * za, 0.0, True)
    if z == 0.0:
        return DistanceResult(0.0, r * r, 0.0, False)
    th, res = theta_star(r, z)
    u = math.cos(r) * math.cos(th)
    d2 = math.sin(r) ** 2 * math.acos(u) ** 2 / (1.0 - u * u)
    return DistanceResult(th, d2, res, False)


def small_time_asymptotic(t, r, z) -> float:
    """Leading Laplace-method value of p_t off the cut locus.

    For z = 0 this is (r/sin r) sqrt(1/(1 - r cot r)) sqrt(pi)
    e^{-r^2/4t} / (4 t^{3/2}); in general the saddle sits at i theta* and
    the second-derivative factor 1 - u arccos(u)/sqrt(1-u^2) must be
    positive (asserted; a violation signals a root-finder failure).
    """
    r = float(r)
    z = float(z)
    t = float(t)
    if not 0.0 < r < np.pi / 2:
        raise ValueError("small_time_asymptotic requires r in (0, pi/2)")
    res = cc_distance(r, z)
    u = math.cos(r) * math.cos(res.theta_star)
    curv = 1.0 - u * math.acos(u) / math.sqrt(1.0 - u * u)
    if curv <= 0.0:
        raise NegativeCurvatureTerm(
            f"saddle factor {curv} <= 0 at (r={r}, z={z})")
    pref = (1.0 / math.sin(r)) * math.acos(u) / math.sqrt(curv)
    return pref * math.sqrt(np.pi) * math.exp(-res.d_squared / (4.0 * t)) \
        / (4.0 * t ** 1.5)


def loglimit_distance(t, r, z) -> float:
    """-4 t ln p_t(r, z); converges to d^2(r, z) as t -> 0."""
    val = pt(t, r, z).value
    return -4.0 * t * math.log(val)

"""Heat kernel factor q_t on the 3-sphere: spectral and theta forms.

``q_t(x) = sum_{m>=0} (m+1) e^{-m(m+2)t} U_m(x)`` is the density of the
round-sphere heat semigroup at the pole against ``(2/pi) sqrt(1-x^2) dx``.
Poisson summation turns it into a rapidly converging Gaussian lattice sum
for small t, which also continues analytically to arguments ``x = cosh s
>= 1``.  Three representations are provided with certified tail bounds and
a dispatcher; a vectorized log-domain evaluator supports the kernel
integral representation, whose integrand pairs a growing ``e^{s^2/4t}``
with a decaying Gaussian.

Conventions for the theta forms (exact identities, not asymptotics):

* trig, ``x = cos(theta)``, ``theta in (0, pi)``::

      q_t = pref * (1/sin theta) * sum_k (theta+2k pi) exp(-(theta+2k pi)^2/4t)

* hyperbolic, ``x = cosh(s)``::

      q_t = pref * e^{s^2/4t} * (s + corr(s)) / sinh(s)
      corr = sum_{k>=1} (2 s cos(k pi s/t) - 4 k pi sin(k pi s/t)) e^{-k^2 pi^2/t}

with ``pref = sqrt(pi) e^t / (4 t^{3/2})``.  Lattice terms are paired
(+-k around 0, or around the nearest odd multiple of pi) so the removable
zeros of the numerator against ``sin theta`` never cancel catastrophically.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import OverflowGuard, TruncationCapError

QT_SPECTRAL_CAP = 4000
T_CROSS = 0.35          # spectral (above) vs theta (below) crossover


class QtRep(enum.Enum):
    SPECTRAL = "spectral"
    THETA_TRIG = "theta_trig"
    THETA_HYP = "theta_hyp"


@dataclass(frozen=True)
class QtEval:
    value: float
    abs_err: float
    representation: QtRep


def _prefactor_log(t):
    return 0.5 * np.log(np.pi) + t - np.log(4.0) - 1.5 * np.log(t)


def _theta_pairs(t):
    """Number of +-k lattice pairs needed for < 1e-20 relative tails."""
    return int(np.sqrt(50.0 * t) / np.pi) + 2


def qt_spectral(t: float, x: float, eps: float = 1e-14) -> QtEval:
    """Truncated Chebyshev series with a rigorous tail bound.

    On [-1, 1] the bound uses |U_m| <= m+1; for x > 1 it uses
    U_m(cosh s) <= e^{(m+1)s}/sinh(s).  Raises TruncationCapError when the
    required number of terms exceeds the cap (t too small).
    """
    if t <= 0:
        raise ValueError("qt_spectral requires t > 0")
    x = float(x)
    s = float(np.arccosh(x)) if x > 1.0 else 0.0
    total = 1.0
    um2, um1 = 1.0, 2.0 * x
    m = 1
    while True:
        term = (m + 1) * np.exp(-m * (m + 2) * t) * um1
        total += term
        # one-sided tail majorant from the next term, geometric beyond
        if x > 1.0:
            nxt = (m + 2) * np.exp(-(m + 1) * (m + 3) * t + (m + 2) * s) \
                / max(np.sinh(s), 1e-300)
        else:
            nxt = (m + 2) ** 2 * np.exp(-(m + 1) * (m + 3) * t)
        ratio = np.exp(-(2 * m + 3) * t + (s if x > 1.0 else 0.0)) * 2.0
        if ratio < 0.5 and nxt / (1.0 - ratio) < eps:
            return QtEval(float(total), float(nxt / (1.0 - ratio)), QtRep.SPECTRAL)
        m += 1
        if m > QT_SPECTRAL_CAP:
            raise TruncationCapError(
                f"qt_spectral: > {QT_SPECTRAL_CAP} terms needed at t={t}; "
                "use a theta representation")
        um2, um1 = um1, 2.0 * x * um1 - um2


def _trig_bracket(t, theta):
    """sum_k (theta+2k pi) e^{-((theta+2k pi)^2 - theta^2)/4t} / sin(theta),
    with the k = 0 term's theta/sin(theta) included.  Vectorized.

    Valid for theta in (0, pi/2]; relative to e^{-theta^2/4t}.
    """
    theta = np.asarray(theta, dtype=float)
    sin_t = np.sin(theta)
    t_over_sin = theta / np.where(sin_t == 0.0, 1.0, sin_t)
    t_over_sin = np.where(theta == 0.0, 1.0, t_over_sin)
    total = t_over_sin.copy()
    for k in range(1, _theta_pairs(t) + 1):
        ep = np.exp(-(k * k * np.pi ** 2 + k * np.pi * theta) / t)
        em = np.exp(-(k * k * np.pi ** 2 - k * np.pi * theta) / t)
        total += t_over_sin * (ep + em)
        u = k * np.pi * theta / t
        small = u < 1.0
        # -2k pi (e^{-(k^2 pi^2 - k pi theta)/t} - e^{-(k^2 pi^2 + k pi theta)/t}) / sin
        sinhc = np.where(small, np.sinh(np.where(small, u, 0.0)) /
                         np.where(small & (u > 0), u, 1.0), 1.0)
        stable = -4.0 * k * np.pi * np.exp(-k * k * np.pi ** 2 / t) \
            * (k * np.pi / t) * t_over_sin * sinhc
        direct = -2.0 * k * np.pi * (em - ep) / np.where(sin_t == 0.0, 1.0, sin_t)
        total += np.where(small, stable, direct)
    return total


def _trig_bracket_near_pi(t, theta):
    """Same bracket for theta in (pi/2, pi), paired around odd multiples
    of pi; relative to e^{-theta^2/4t}.  Vectorized."""
    theta = np.asarray(theta, dtype=float)
    eps_ = theta - np.pi          # in (-pi/2, 0)
    sin_e = np.sin(eps_)
    total = np.zeros_like(theta)
    for j in range(0, _theta_pairs(t) + 1):
        m = (2 * j + 1) * np.pi
        # exponents relative to theta^2/4t; both <= 0 on this branch
        rel_m = -((m - eps_) ** 2 - theta ** 2) / (4.0 * t)
        rel_p = -((m + eps_) ** 2 - theta ** 2) / (4.0 * t)
        c = m * eps_ / (2.0 * t)
        small = np.abs(c) < 1.0
        base = np.exp(-(m * m + eps_ ** 2 - theta ** 2) / (4.0 * t))
        stable = base * (2.0 * m * np.sinh(np.where(small, c, 0.0))
                         - 2.0 * eps_ * np.cosh(np.where(small, c, 0.0))) \
            / np.where(sin_e == 0.0, 1.0, sin_e)
        stable = np.where(eps_ == 0.0, base * (m * m / (2.0 * t) - 1.0) * 2.0, stable)
        direct = ((m - eps_) * np.exp(rel_m) - (m + eps_) * np.exp(rel_p)) \
            / np.where(sin_e == 0.0, 1.0, sin_e)
        total += np.where(small, stable, direct)
    return total


def qt_theta_trig(t: float, theta: float) -> QtEval:
    """Poisson-summed form at x = cos(theta), theta in (0, pi).

    The removable singularities at theta -> 0 and theta -> pi are handled
    by symmetric lattice pairing; no caller-side margin is needed.
    """
    if t <= 0:
        raise ValueError("qt_theta_trig requires t > 0")
    theta = float(theta)
    if not 0.0 <= theta < np.pi:
        raise ValueError("theta must lie in [0, pi)")
    bracket = (_trig_bracket(t, theta) if theta <= np.pi / 2
               else _trig_bracket_near_pi(t, theta))
    log_v = _prefactor_log(t) - theta ** 2 / (4.0 * t)
    value = float(np.exp(log_v) * bracket)
    # dropped pairs are below 1e-20 relative by construction of _theta_pairs
    return QtEval(value, abs(value) * 1e-16, QtRep.THETA_TRIG)


def _hyp_corr_over_s(t, s):
    """corr(s)/s for the hyperbolic branch; finite at s = 0. Vectorized."""
    s = np.asarray(s, dtype=float)
    total = np.zeros_like(s)
    for k in range(1, _theta_pairs(t) + 1):
        u = k * np.pi * s / t
        total += (2.0 * np.cos(u)
                  - 4.0 * (k * np.pi) ** 2 / t * np.sinc(u / np.pi)) \
            * np.exp(-k * k * np.pi ** 2 / t)
    return total


def _log_s_over_sinh(s):
    """log(s / sinh s), stable for all s >= 0. Vectorized."""
    s = np.asarray(s, dtype=float)
    small = s < 1e-8
    mid = (~small) & (s < 30.0)
    out = np.where(small, -s * s / 6.0, 0.0)
    s_mid = np.where(mid, s, 1.0)
    out = np.where(mid, np.log(s_mid / np.sinh(s_mid)), out)
    big = s >= 30.0
    s_big = np.where(big, s, 1.0)
    out = np.where(big, np.log(2.0 * s_big) - s_big, out)
    return out


def qt_theta_hyp(t: float, s: float) -> QtEval:
    """Analytic continuation q_t(cosh s), s >= 0.

    Raises OverflowGuard when s^2/4t exceeds the double exponent range;
    callers then switch to :func:`qt_log`.
    """
    if t <= 0 or s < 0:
        raise ValueError("qt_theta_hyp requires t > 0 and s >= 0")
    log_v = qt_log_hyp(t, s)
    if log_v > 700.0:
        raise OverflowGuard(
            f"q_t(cosh s) overflows at t={t}, s={s}; use qt_log")
    value = float(np.exp(log_v))
    return QtEval(value, abs(value) * 1e-15, QtRep.THETA_HYP)


def qt_log_hyp(t: float, s) -> np.ndarray:
    """log q_t(cosh s); vectorized in s >= 0."""
    s = np.asarray(s, dtype=float)
    return (_prefactor_log(t) + s * s / (4.0 * t) + _log_s_over_sinh(s)
            + np.log1p(_hyp_corr_over_s(t, s)))


def qt_log_trig(t: float, theta) -> np.ndarray:
    """log q_t(cos theta); vectorized in theta, valid on [0, pi)."""
    theta = np.asarray(theta, dtype=float)
    low = theta <= np.pi / 2
    bracket = np.where(low, _trig_bracket(t, np.where(low, theta, 0.5)),
                       _trig_bracket_near_pi(t, np.where(low, 2.0, theta)))
    return _prefactor_log(t) - theta ** 2 / (4.0 * t) + np.log(bracket)


def qt_log(t: float, x) -> np.ndarray:
    """log q_t(x) for x > -1 (trig branch) and any x >= 1 (hyp branch).

    Vectorized; this is the form consumed by the kernel integral
    representation, where the Gaussian factor cancels the growth.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    hyp = x >= 1.0
    if np.any(hyp):
        out[hyp] = qt_log_hyp(t, np.arccosh(np.where(hyp, x, 1.0))[hyp])
    if np.any(~hyp):
        theta = np.arccos(np.clip(np.where(~hyp, x, 0.0), -1.0, 1.0))
        out[~hyp] = qt_log_trig(t, theta)[~hyp]
    return out


def qt(t: float, x: float, eps: float = 1e-12) -> QtEval:
    """Dispatching evaluator for q_t.

    Spectral for t >= T_CROSS; theta-trig for x in [-1+1e-9, 1) at small t;
    theta-hyp for x >= 1 at small t.
    """
    if t <= 0:
        raise ValueError("qt requires t > 0")
    if x < -1.0 + 1e-9:
        raise ValueError("qt requires x >= -1 + 1e-9 (theta = pi pole)")
    if t >= T_CROSS:
        return qt_spectral(t, x, eps)
    if x >= 1.0:
        return qt_theta_hyp(t, float(np.arccosh(x)))
    return qt_theta_trig(t, float(np.arccos(x)))

"""The subelliptic heat kernel p_t(r, z) on SU(2).

Representations:

* spectral double series (large and moderate t), with term-wise jets;
* integral of the sphere factor against a complex Gaussian (small t),
  evaluated in the log domain so the ``e^{s^2/4t}`` growth of the analytic
  continuation cancels against the Gaussian before exponentiation;
* exact theta-type closed form on the cut locus r = 0 (all t);
* auxiliary closed forms: diagonal value, Green function of ``1 - L``,
  the forward Laplace-transform identity, and the pole-subtracted shifted
  series p*_t(r, z + 4it) with its decay ratio Phi(t).

Eigenvalues are ``lambda_{n,k} = 4k(k+|n|+1) + 2|n|`` with multiplicity
weight ``2k+|n|+1``; the +-n terms are paired into cosines so every value
is manifestly real.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (PoleAtOrigin, SlowDecayError, TruncationCapError)
from .geometry import Jet2
from .polynomials import K_CAP, N_CAP, jacobi_iter
from .quadrature import DEFAULT_SPEC, QuadratureSpec, adaptive_quad
from .sphere_kernel import qt_log

T_SPECTRAL_MIN = 0.01      # below this no spectral plan is attempted
T_CROSS = 0.35             # spectral above, integral below
R_MIN_CUTLOCUS = 1e-3      # dispatcher switches to the closed form


class KernelRep(enum.Enum):
    SPECTRAL = "spectral"
    INTEGRAL = "integral"
    CUTLOCUS_CLOSED = "cutlocus"


@dataclass(frozen=True)
class KernelEval:
    value: float
    abs_err: float
    representation: KernelRep


@dataclass(frozen=True)
class TruncationPlan:
    """Series cutoffs with the rigorous bound they achieve."""

    n_max: int
    k_max: int
    eps: float
    achieved_bound: float


def lambda_nk(n, k):
    """Spectral eigenvalue of -L on the (n, k) mode."""
    an = abs(n)
    return 4 * k * (k + an + 1) + 2 * an


def _log_term_bound(n, k, t, log_c, jet):
    """log of the majorant (2k+n+1) C(k+n, k) c^n e^{-lambda t},
    optionally inflated by a polynomial derivative-growth factor."""
    lb = (math.log(2 * k + n + 1)
          + math.lgamma(k + n + 1) - math.lgamma(k + 1) - math.lgamma(n + 1)
          + n * log_c - lambda_nk(n, k) * t)
    if jet:
        lb += 2.0 * math.log((n + 2.0) * (k + 2.0) * 3.0)
    return lb


def plan_truncation(t, eps=1e-10, cos_r_max=1.0, jet=False) -> TruncationPlan:
    """Smallest rectangular (n_max, k_max) whose tail majorant meets eps.

    ``cos_r_max`` is the largest cos(r) over the evaluation points; the
    plan shrinks rapidly away from the cut locus.  Raises
    TruncationCapError when the caps (k <= 200, n <= 400) cannot meet eps,
    which signals that t is too small for the spectral representation at
    these points.
    """
    if t < T_SPECTRAL_MIN:
        raise TruncationCapError(
            f"spectral representation not planned below t = {T_SPECTRAL_MIN}")
    log_c = math.log(cos_r_max) if cos_r_max < 1.0 else 0.0
    log_eps_term = math.log(eps) - math.log(16.0 * (N_CAP + 1))
    k_max = 0
    n_max = None
    prev_row = None
    row_tail = 0.0
    for n in range(N_CAP + 1):
        row = 0.0
        k_stop = None
        prev_b = None
        for k in range(K_CAP + 1):
            lb = _log_term_bound(n, k, t, log_c, jet)
            b = math.exp(min(lb, 700.0))
            if k >= 1 and prev_b is not None and b < prev_b \
                    and lb < log_eps_term:
                k_stop = k
                break
            row += b
            prev_b = b
        if k_stop is None:
            raise TruncationCapError(
                f"k cap {K_CAP} exhausted at n={n}, t={t}")
        k_max = max(k_max, k_stop)
        if n >= 1 and prev_row is not None and row < prev_row:
            ratio = row / prev_row
            tail = row * ratio / (1.0 - ratio) if ratio < 0.95 else np.inf
            if row + tail < eps / 2.0:
                n_max = n
                row_tail = row + tail
                break
        prev_row = row
    if n_max is None:
        raise TruncationCapError(
            f"n cap {N_CAP} exhausted at t={t}, cos_r_max={cos_r_max}")
    achieved = row_tail + (n_max + 1) * math.exp(log_eps_term) * 4.0
    return TruncationPlan(n_max, k_max, eps, achieved)


def _spectral_arrays(t, r, z, plan: TruncationPlan, jet=False):
    """Vectorized spectral sum; returns f or dict of f and its partials.

    r and z may be mutually broadcastable (e.g. a sparse tensor grid); the
    k-recurrences then run on the r-axis only and the z-phases broadcast in
    at accumulation time.
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    shape = np.broadcast_shapes(r.shape, z.shape)
    x = np.cos(2.0 * r)
    C = np.cos(r)
    sr = np.sin(r)
    s2r = np.sin(2.0 * r)
    c2r = np.cos(2.0 * r)
    nder = 2 if jet else 0

    f = np.zeros(shape)
    if jet:
        fr = np.zeros(shape)
        fz = np.zeros(shape)
        frr = np.zeros(shape)
        frz = np.zeros(shape)
        fzz = np.zeros(shape)

    # n = 0 row
    for k, (P, D, S) in enumerate(jacobi_iter(0, x, plan.k_max, nder)):
        w = (2 * k + 1) * math.exp(-lambda_nk(0, k) * t)
        f += w * P
        if jet:
            fr += w * (-2.0 * s2r) * D
            frr += w * (-4.0 * c2r * D + 4.0 * s2r ** 2 * S)

    Cpp = None
    Cprev = np.ones_like(C)
    Cn = C.copy()
    for n in range(1, plan.n_max + 1):
        cos_nz = np.cos(n * z)
        if jet:
            sin_nz = np.sin(n * z)
        inner = np.zeros_like(x)
        innerD = np.zeros_like(x) if jet else None
        innerS = np.zeros_like(x) if jet else None
        for k, (P, D, S) in enumerate(jacobi_iter(n, x, plan.k_max, nder)):
            w = (2 * k + n + 1) * math.exp(-lambda_nk(n, k) * t)
            inner += w * P
            if jet:
                innerD += w * D
                innerS += w * S
        g = Cn * inner
        f += 2.0 * cos_nz * g
        if jet:
            gp = -n * Cprev * sr * inner - 2.0 * s2r * Cn * innerD
            gpp = (-n * Cn * inner
                   + 4.0 * n * Cprev * sr * s2r * innerD
                   + 4.0 * s2r ** 2 * Cn * innerS
                   - 4.0 * c2r * Cn * innerD)
            if n >= 2:
                gpp = gpp + n * (n - 1) * Cpp * sr ** 2 * inner
            fr += 2.0 * cos_nz * gp
            frr += 2.0 * cos_nz * gpp
            fz += -2.0 * n * sin_nz * g
            frz += -2.0 * n * sin_nz * gp
            fzz += -2.0 * n * n * cos_nz * g
        Cpp = Cprev
        Cprev = Cn
        Cn = Cn * C
    if not jet:
        return f
    return {"f": f, "fr": fr, "fz": fz, "frr": frr, "frz": frz, "fzz": fzz}


def pt_spectral_grid(t, r, z, eps=1e-10):
    """Spectral kernel values on arrays; returns (values, achieved_bound)."""
    cmax = float(np.max(np.cos(np.asarray(r, dtype=float))))
    plan = plan_truncation(t, eps, cos_r_max=cmax)
    return _spectral_arrays(t, r, z, plan), plan.achieved_bound


def pt_spectral_jet_grid(t, r, z, eps=1e-10):
    """Spectral kernel jets on arrays; dict with f, fr, fz, frr, frz, fzz."""
    cmax = float(np.max(np.cos(np.asarray(r, dtype=float))))
    plan = plan_truncation(t, eps, cos_r_max=cmax, jet=True)
    return _spectral_arrays(t, r, z, plan, jet=True)


def pt_spectral(t, r, z, eps=1e-10) -> KernelEval:
    """Spectral series at a point (pairs +-n into cosines; exactly even in z)."""
    vals, bound = pt_spectral_grid(t, np.asarray(float(r)), np.asarray(float(z)), eps)
    return KernelEval(float(vals), bound, KernelRep.SPECTRAL)


def pt_spectral_jet(t, r, z, eps=1e-10) -> Jet2:
    """Term-wise differentiated spectral series at an interior point."""
    d = pt_spectral_jet_grid(t, np.asarray(float(r)), np.asarray(float(z)), eps)
    return Jet2(float(r), float(z), float(d["f"]), float(d["fr"]),
                float(d["fz"]), float(d["frr"]), float(d["frz"]), float(d["fzz"]))


def pt_cutlocus(t, z) -> KernelEval:
    """Exact closed form on the cut locus r = 0, valid for all t > 0.

    p_t(0,z) = (pi^2 e^t / 4t^2) e^{-(2 pi |z| - z^2)/4t}
               sum_k e^{-k(k+1) pi^2/t} W_k(|z|, t)
    with W_k = ((2k+1) + 2k w)/(1+w)^2, w = e^{-pi(|z|+2k pi)/2t}; terms
    with negative argument are rescaled by 1/w^2 so nothing overflows.
    """
    if t <= 0:
        raise ValueError("pt_cutlocus requires t > 0")
    za = abs(float(z))
    total = 0.0
    k = 0
    scale = None
    while True:
        done = True
        for kk in (k, -k) if k > 0 else (0,):
            a = za + 2.0 * kk * np.pi
            if a >= 0:
                w = math.exp(-np.pi * a / (2.0 * t))
                frac = ((2 * kk + 1) + 2 * kk * w) / (1.0 + w) ** 2
            else:
                wi = math.exp(np.pi * a / (2.0 * t))   # = 1/w <= 1
                frac = ((2 * kk + 1) * wi * wi + 2 * kk * wi) / (wi + 1.0) ** 2
            term = math.exp(-kk * (kk + 1) * np.pi ** 2 / t) * frac
            total += term
            if scale is None:
                scale = abs(term) + 1e-300
            if abs(term) > 1e-18 * scale:
                done = False
        if k > 0 and done:
            break
        k += 1
        if k > 10000:
            break
    value = (np.pi ** 2 * math.exp(t) / (4.0 * t * t)
             * math.exp(-(2.0 * np.pi * za - za * za) / (4.0 * t)) * total)
    return KernelEval(float(value), abs(value) * 1e-15, KernelRep.CUTLOCUS_CLOSED)


def _integral_log_magnitude(t, r, z):
    """Callable y -> log |Gaussian * q_t| for the integral representation."""
    lcr = math.log(math.cos(r)) if r > 0 else 0.0

    def logmag(y):
        y = np.asarray(y, dtype=float)
        x = math.cos(r) * np.cosh(y)
        return (z * z - y * y) / (4.0 * t) + qt_log(t, x)

    return logmag, lcr


def pt_integral(t, r, z, spec: QuadratureSpec | None = None,
                r_min=R_MIN_CUTLOCUS) -> KernelEval:
    """Integral representation
    ``p_t = (4 pi t)^{-1/2} Int e^{-(y+iz)^2/4t} q_t(cos r cosh y) dy``.

    The +-y conjugate symmetry makes the imaginary part vanish identically,
    so the real even part ``e^{(z^2-y^2)/4t} cos(yz/2t) q_t`` is integrated
    over [0, Y_max] and doubled.  Evaluation runs in the log domain; the
    reported error inflates the quadrature estimate by the measured
    cancellation (ratio of Int|f| to |Int f|).
    """
    if t <= 0:
        raise ValueError("pt_integral requires t > 0")
    r = float(r)
    z = float(np.asarray(z))
    if not 0.0 <= r < np.pi / 2:
        raise ValueError("pt_integral requires r in [0, pi/2)")
    if t < 0.1 and r < r_min:
        raise SlowDecayError(
            f"integral representation ill-conditioned at r={r} < {r_min} "
            f"for t={t} < 0.1; use the cut-locus closed form")
    spec = spec or DEFAULT_SPEC
    logmag, _ = _integral_log_magnitude(t, r, z)
    hump = math.acosh(1.0 / max(math.cos(r), 1e-12)) if r < np.pi / 2 else 0.0
    y_hard = min(hump, 30.0) + 60.0 + z * z / max(4.0 * t, 1.0)
    probe = np.linspace(0.0, y_hard, 4001)
    lm = logmag(probe)
    peak = float(np.max(lm))
    above = np.nonzero(lm >= peak - 120.0)[0]
    y_max = float(probe[above[-1]]) + 2.0 * (probe[1] - probe[0]) + 0.5

    freq = abs(z) / (2.0 * t)

    def f_even(y):
        return np.exp(logmag(y) - peak) * np.cos(y * z / (2.0 * t))

    def f_abs(y):
        return np.exp(logmag(y) - peak)

    panels = max(8, int(y_max * freq / 3.0) + 8)
    val, err = adaptive_quad(f_even, 0.0, y_max, spec, initial_panels=panels)
    mass, _ = adaptive_quad(f_abs, 0.0, y_max, spec, initial_panels=8)
    norm = 2.0 * math.exp(peak) / math.sqrt(4.0 * np.pi * t)
    value = norm * val
    cancellation = mass / max(abs(val), 1e-300)
    abs_err = norm * err + abs(value) * 1e-15 * cancellation
    return KernelEval(float(value), float(abs_err), KernelRep.INTEGRAL)


def pt(t, r, z, eps=1e-10) -> KernelEval:
    """Dispatcher: cut-locus form at r < r_min, spectral for t >= 0.35,
    integral otherwise."""
    if t <= 0:
        raise ValueError("pt requires t > 0")
    r = float(r)
    if r < R_MIN_CUTLOCUS:
        return pt_cutlocus(t, z)
    if t >= T_CROSS:
        return pt_spectral(t, r, z, eps)
    return pt_integral(t, r, z)


def pt_diagonal(t) -> float:
    """p_t(0, 0) from the better-conditioned of the two diagonal forms.

    The spectral diagonal needs no polynomial values (P_k(1) = 1), so it is
    summed directly with its own caps; the theta form is the cut-locus
    closed form at z = 0.  They agree to ~1e-10 on t in [0.05, 5].
    """
    if t <= 0:
        raise ValueError("pt_diagonal requires t > 0")
    if t < T_CROSS:
        return pt_cutlocus(t, 0.0).value
    return _pt_diagonal_spectral(t)


def _pt_diagonal_spectral(t) -> float:
    total = 0.0
    for n in range(0, 100000):
        row = 0.0
        k = 0
        while True:
            term = (2 * k + n + 1) * math.exp(-lambda_nk(n, k) * t)
            row += term
            if term < 1e-18 * (total + row + 1.0):
                break
            k += 1
        row *= (1.0 if n == 0 else 2.0)
        total += row
        if n >= 1 and row < 1e-18 * total:
            break
    return total


def green_function(r, z) -> float:
    """Green function of 1 - L:
    G(r,z) = (1/8 pi) (1 - 2 cos r cos z + cos^2 r)^{-1/2}."""
    r = float(r)
    z = float(z)
    if abs(r) < 1e-15 and abs(z) < 1e-15:
        raise PoleAtOrigin("green_function has its pole at (0, 0)")
    q = 1.0 - 2.0 * math.cos(r) * math.cos(z) + math.cos(r) ** 2
    return 1.0 / (8.0 * np.pi * math.sqrt(q))


def laplace_check(lam, r, z, spec: QuadratureSpec | None = None):
    """Both sides of the forward Laplace identity; returns (lhs, rhs).

    lhs = Int_0^inf p_t e^{-t - lam/t} dt;
    rhs = Int_R dy / (8 pi^2 (cosh sqrt(y^2+4 lam) - cos r cos(z+iy))).
    The rhs integrand is complex; +-y pairing leaves twice its real part,
    and the residual imaginary part of the symmetrized integrand is
    asserted below 1e-8 relative.
    """
    if lam <= 0:
        raise ValueError("laplace_check requires lam > 0")
    spec = spec or QuadratureSpec(abs_tol=1e-12, rel_tol=1e-8,
                                  max_refinements=4000)
    r = float(r)
    z = float(z)

    t_lo = max(0.005, min(0.02, lam / 45.0))
    t_hi = max(50.0, 2.0 * math.sqrt(lam) + 10.0)

    def lhs_integrand(ts):
        ts = np.atleast_1d(ts)
        return np.array([pt(tv, r, z).value * math.exp(-tv - lam / tv)
                         for tv in ts])

    lhs, _ = adaptive_quad(lhs_integrand, t_lo, t_hi, spec, initial_panels=24)

    def rhs_complex(y):
        y = np.asarray(y, dtype=float)
        root = np.sqrt(y * y + 4.0 * lam)
        den = (np.cosh(root)
               - math.cos(r) * (math.cos(z) * np.cosh(y)
                                - 1j * math.sin(z) * np.sinh(y)))
        return 1.0 / (8.0 * np.pi ** 2 * den)

    def rhs_sym_real(y):
        c = rhs_complex(y) + rhs_complex(-y)
        return np.real(c)

    y_hi = 60.0 + 2.0 * math.sqrt(lam)
    rhs, _ = adaptive_quad(rhs_sym_real, 0.0, y_hi, spec, initial_panels=16)

    probe = np.linspace(0.0, y_hi, 257)
    imag_resid = float(np.max(np.abs(np.imag(rhs_complex(probe)
                                             + rhs_complex(-probe)))))
    assert imag_resid <= 1e-8 * max(abs(rhs), 1e-300), \
        "conjugate symmetry violated in Laplace rhs"
    return float(lhs), float(rhs)


def _star_plan(t, cos_r_max=1.0, eps=1e-14):
    """Truncation for the shifted series; the e^{4nt} continuation weight
    is folded into the majorant (net k >= 1 decay e^{-4k(k+n+1)t + 2nt})."""
    log_c = math.log(cos_r_max) if cos_r_max < 1.0 else 0.0
    n_max, k_max = None, 1
    prev_row = None
    for n in range(N_CAP + 1):
        row = 0.0
        k_stop = None
        prev_b = None
        for k in range(1, K_CAP + 1):
            lb = (math.log(2 * k + n + 1)
                  + math.lgamma(k + n + 1) - math.lgamma(k + 1)
                  - math.lgamma(n + 1)
                  + n * log_c + (-4 * k * (k + n + 1) + 2 * n) * t)
            b = math.exp(min(lb, 700.0))
            if k >= 2 and prev_b is not None and b < prev_b and b < eps / 64.0:
                k_stop = k
                break
            row += b
            prev_b = b
        if k_stop is None:
            raise TruncationCapError(f"p*_t k cap exhausted at t={t}")
        k_max = max(k_max, k_stop)
        if n >= 1 and prev_row is not None and row < prev_row and row < eps / 8.0:
            n_max = n
            break
        prev_row = row
    if n_max is None:
        raise TruncationCapError(f"p*_t n cap exhausted at t={t}")
    return n_max, k_max


def pt_star_shifted(t, r, z):
    """p*_t(r, z + 4it): pole-subtracted kernel on the shifted contour.

    The k = 0 part sums in closed form to 1/(1-w)^2 - 1 with
    w = cos(r) e^{-6t} e^{iz}; the k >= 1 double series is truncated with
    the continuation weight folded into the tail bound.  Complex-valued.
    """
    if t < 0.5:
        raise ValueError("pt_star_shifted is supported for t >= 0.5")
    r_arr = np.asarray(r, dtype=float)
    z_arr = np.asarray(z, dtype=float)
    C = np.cos(r_arr)
    w = C * math.exp(-6.0 * t) * np.exp(1j * z_arr)
    total = 1.0 / (1.0 - w) ** 2 - 1.0

    n_max, k_max = _star_plan(t, float(np.max(C)))
    x = np.cos(2.0 * r_arr)
    # n = 0, k >= 1
    for k, (P, _, _) in enumerate(jacobi_iter(0, x, k_max)):
        if k == 0:
            continue
        total = total + (2 * k + 1) * math.exp(-lambda_nk(0, k) * t) * P
    Cn = C.copy()
    for n in range(1, n_max + 1):
        phase_p = np.exp(1j * n * z_arr) * math.exp(-4.0 * n * t)
        phase_m = np.exp(-1j * n * z_arr) * math.exp(4.0 * n * t)
        inner = np.zeros_like(x)
        for k, (P, _, _) in enumerate(jacobi_iter(n, x, k_max)):
            if k == 0:
                continue
            inner += (2 * k + n + 1) * math.exp(-lambda_nk(n, k) * t) * P
        total = total + (phase_p + phase_m) * Cn * inner
        Cn = Cn * C
    if total.shape == ():
        return complex(total)
    return total


def phi_ratio(t, grid_n=30) -> float:
    """Phi(t) = sup over an (r, z) grid of |p*_t(r, z+4it)| / p_t(r, z)."""
    r = np.linspace(0.0, np.pi / 2, grid_n)
    z = np.linspace(-np.pi, np.pi, grid_n)
    R, Z = np.meshgrid(r, z, indexing="ij", sparse=True)
    star = np.abs(pt_star_shifted(t, R, Z))
    p, _ = pt_spectral_grid(t, R, Z, eps=1e-12)
    return float(np.max(star / p))

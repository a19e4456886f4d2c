"""Functional-inequality constants and numerical verifiers.

Implements the sharp time-dependent constants

    A(t) = -(1/4) d/dt Int p_t^2 dmu
         = (1/2) sum_{n,k} lambda_{n,k} (2k+|n|+1) e^{-2 lambda_{n,k} t}
    C(t) = (1/2) Int Gamma(p_t)/p_t dmu

and grid verifiers for the first gradient bound, the reverse Poincare
inequality, both Li-Yau forms, the Harnack-ratio probe, the global
sqrt(Gamma(ln p_t)) bound, the L^p gradient-constant lower bound, and the
short-time moment of the frame-change lemma.  All margins are reported as
RHS - LHS, so a valid inequality yields nonnegative margins up to
quadrature noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distance import cc_distance
from .errors import TruncationCapError
from .geometry import gamma_arrays, generator_arrays
from .quadrature import QuadratureSpec, haar_integrate
from .su2_kernel import (lambda_nk, pt, pt_diagonal, pt_spectral_grid,
                         pt_spectral_jet_grid)

MARGIN_TOL = 1e-9

_INEQ_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-8, max_refinements=64)


@dataclass(frozen=True)
class VerifyReport:
    """Margins of an inequality sweep; violations count margins < -tol."""

    min_margin: float
    argmin: tuple
    n_points: int
    n_violations: int
    name: str = ""

    @classmethod
    def from_margins(cls, margins, t, r, z, name="", tol=MARGIN_TOL):
        margins = np.asarray(margins, dtype=float)
        idx = int(np.argmin(margins))
        rf = np.broadcast_to(r, margins.shape).ravel()
        zf = np.broadcast_to(z, margins.shape).ravel()
        return cls(float(margins.ravel()[idx]),
                   (float(t), float(rf[idx]), float(zf[idx])),
                   margins.size,
                   int(np.sum(margins.ravel() < -tol)),
                   name)


class TestFunction:
    """Scalar field with analytic jets and, where known, exact P_t action.

    ``jet_arrays(r, z)`` returns the six-field dict of value and partials;
    ``pt_jet_arrays(t, r, z)`` the same for P_t f when exact (eigenfunction
    scaling or kernel time-shift); ``pt_square(t, r, z)`` the closed-form
    P_t(f^2) when the square stays inside the eigenfunction algebra.
    """

    def __init__(self, name, jet_arrays, eigenvalue=None, constant=0.0,
                 pt_jet_arrays=None, pt_square=None):
        self.name = name
        self._jets = jet_arrays
        self.eigenvalue = eigenvalue
        self.constant = constant
        self._pt_jets = pt_jet_arrays
        self._pt_square = pt_square

    def jet_arrays(self, r, z):
        return self._jets(r, z)

    def values(self, r, z):
        return self._jets(r, z)["f"]

    def pt_jet_arrays(self, t, r, z):
        if self.eigenvalue is not None:
            jets = self._jets(r, z)
            s = math.exp(self.eigenvalue * t)
            out = {k: s * v for k, v in jets.items()}
            # an additive constant is invariant under P_t
            out["f"] = out["f"] + self.constant * (1.0 - s)
            return out
        if self._pt_jets is not None:
            return self._pt_jets(t, r, z)
        raise ValueError(f"no exact P_t action for {self.name}")

    def pt_square(self, t, r, z):
        if self._pt_square is None:
            return None
        return self._pt_square(t, r, z)


def _cos_jets(shift):
    def jets(r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        cr, sr = np.cos(r), np.sin(r)
        cz, sz = np.cos(z - shift), np.sin(z - shift)
        return {"f": cr * cz, "fr": -sr * cz, "fz": -cr * sz,
                "frr": -cr * cz, "frz": sr * sz, "fzz": -cr * cz}
    return jets


def _sin_jets():
    def jets(r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        cr, sr = np.cos(r), np.sin(r)
        cz, sz = np.cos(z), np.sin(z)
        return {"f": cr * sz, "fr": -sr * sz, "fz": cr * cz,
                "frr": -cr * sz, "frz": -sr * cz, "fzz": -cr * sz}
    return jets


def _pt_square_cos(shift):
    # (cos r cos(z-c))^2 = cos^2 r/2 + cos^2 r cos(2z-2c)/2, eigen-decomposed
    def pt_sq(t, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        return (0.25 + 0.25 * math.exp(-8.0 * t) * np.cos(2.0 * r)
                + 0.5 * math.exp(-4.0 * t) * np.cos(r) ** 2
                * np.cos(2.0 * (z - shift)))
    return pt_sq


def eigen_cos(shift=0.0) -> TestFunction:
    """f = cos r cos(z - shift); L f = -2 f with exact P_t(f^2)."""
    return TestFunction(f"cos_r_cos_z_shift_{shift:g}", _cos_jets(shift),
                        eigenvalue=-2.0, pt_square=_pt_square_cos(shift))


def positive_cos() -> TestFunction:
    """f = 2 + cos r cos z (positive; affine image of the eigenfunction)."""
    base = _cos_jets(0.0)

    def jets(r, z):
        out = base(r, z)
        out = dict(out)
        out["f"] = out["f"] + 2.0
        return out

    def pt_sq(t, r, z):
        # (2 + u)^2 = 4 + 4u + u^2
        u = base(r, z)["f"]
        return (4.0 + 4.0 * math.exp(-2.0 * t) * u
                + _pt_square_cos(0.0)(t, r, z))

    return TestFunction("two_plus_cos", jets, eigenvalue=-2.0, constant=2.0,
                        pt_square=pt_sq)


def kernel_function(s, z_shift=0.0) -> TestFunction:
    """f = p_s(r, z - z_shift); P_t f = p_{t+s}(r, z - z_shift) exactly."""
    def jets(r, z):
        return pt_spectral_jet_grid(s, r, np.asarray(z) - z_shift)

    def pt_jets(t, r, z):
        return pt_spectral_jet_grid(t + s, r, np.asarray(z) - z_shift)

    return TestFunction(f"kernel_s_{s:g}_shift_{z_shift:g}", jets,
                        pt_jet_arrays=pt_jets)


def span_function(phi) -> TestFunction:
    """f = cos(phi) cos r cos z + sin(phi) cos r sin z (eigenvalue -2)."""
    cj, sj = _cos_jets(0.0), _sin_jets()
    a, b = math.cos(phi), math.sin(phi)

    def jets(r, z):
        u, v = cj(r, z), sj(r, z)
        return {k: a * u[k] + b * v[k] for k in u}

    def pt_sq(t, r, z):
        r = np.asarray(r, dtype=float)
        z = np.asarray(z, dtype=float)
        c2 = np.cos(r) ** 2
        # u^2, v^2, uv in the eigenfunction algebra:
        ptu2 = 0.25 + 0.25 * math.exp(-8.0 * t) * np.cos(2 * r) \
            + 0.5 * math.exp(-4.0 * t) * c2 * np.cos(2 * z)
        ptv2 = 0.25 + 0.25 * math.exp(-8.0 * t) * np.cos(2 * r) \
            - 0.5 * math.exp(-4.0 * t) * c2 * np.cos(2 * z)
        ptuv = 0.5 * math.exp(-4.0 * t) * c2 * np.sin(2 * z)
        return a * a * ptu2 + b * b * ptv2 + 2.0 * a * b * ptuv

    return TestFunction(f"span_phi_{phi:g}", jets, eigenvalue=-2.0,
                        pt_square=pt_sq)


# ---------------------------------------------------------------------------
# constants A(t), C(t)

A_CONST_N_MAX = 20000
A_CONST_K_MAX = 2000


def a_const(t) -> float:
    """A(t) = (1/2) sum lambda_{n,k} (2k+|n|+1) e^{-2 lambda_{n,k} t}.

    Pure exponential sums (P_k(1) = 1 on the diagonal), so no polynomial
    caps apply; adaptive cutoffs with relative floor 1e-18.
    """
    if t < 0.01:
        raise TruncationCapError("a_const supported for t >= 0.01")
    total = 0.0
    for n in range(A_CONST_N_MAX):
        row = 0.0
        k = 0
        while True:
            lam = lambda_nk(n, k)
            term = lam * (2 * k + n + 1) * math.exp(-2.0 * lam * t)
            row += term
            if term < 1e-18 * (total + row + 1e-300) and k >= 1:
                break
            k += 1
            if k > A_CONST_K_MAX:
                raise TruncationCapError("a_const k cap exhausted")
        row *= (1.0 if n == 0 else 2.0)
        total += row
        if n >= 2 and row < 1e-18 * total:
            break
    return 0.5 * total


def c_const(t, spec: QuadratureSpec | None = None, r_margin=1e-3) -> float:
    """C(t) = (1/2) Int Gamma(p_t)/p_t dmu by reduced 2D quadrature of the
    spectral jets (t >= 0.05)."""
    if t < 0.05:
        raise TruncationCapError("c_const supported for t >= 0.05")
    spec = spec or QuadratureSpec(abs_tol=1e-14, rel_tol=1e-6,
                                  max_refinements=16)

    def integrand(R, Z):
        jets = pt_spectral_jet_grid(t, R, Z, eps=1e-10)
        return gamma_arrays(jets["fr"], jets["fz"], R) / jets["f"]

    val, _ = haar_integrate(integrand, spec, r_margin=r_margin)
    return 0.5 * val


# ---------------------------------------------------------------------------
# gradient-bound verifiers (identity-point checks)

_R_IDENTITY = 1e-6      # identity evaluated just inside the jet domain


def _variance_under_haar(f: TestFunction, spec=None) -> float:
    spec = spec or _INEQ_SPEC
    mean, _ = haar_integrate(lambda R, Z: f.values(R, Z), spec)
    sq, _ = haar_integrate(lambda R, Z: f.values(R, Z) ** 2, spec)
    return sq - mean * mean


def first_gradient_bound_check(f: TestFunction, t) -> VerifyReport:
    """Gamma(P_t f)(0) <= A(t) Var_mu(f), checked at the identity."""
    jets = f.pt_jet_arrays(t, np.asarray(_R_IDENTITY), np.asarray(0.0))
    lhs = float(gamma_arrays(jets["fr"], jets["fz"], _R_IDENTITY))
    rhs = a_const(t) * _variance_under_haar(f)
    return VerifyReport(rhs - lhs, (t, 0.0, 0.0), 1,
                        int(rhs - lhs < -MARGIN_TOL),
                        f"first_gradient[{f.name}]")


def reverse_poincare_check(f: TestFunction, t, grid_n=20,
                           c_value=None) -> VerifyReport:
    """Gamma(P_t f)(g) <= C(t) (P_t f^2 (g) - (P_t f)^2 (g)).

    With a closed-form P_t(f^2) the margin is swept over a grid of base
    points g; otherwise the check runs at the identity with the Haar
    quadrature P_t action (the proof's left-invariance reduction).
    """
    ct = c_value if c_value is not None else c_const(t)
    sq = f.pt_square(t, np.asarray(_R_IDENTITY), np.asarray(0.0))
    if sq is not None:
        R, Z = _interior_grid(grid_n)
        jets = f.pt_jet_arrays(t, R, Z)
        lhs = gamma_arrays(jets["fr"], jets["fz"], R)
        var = f.pt_square(t, R, Z) - jets["f"] ** 2
        margins = ct * var - lhs
        return VerifyReport.from_margins(margins, t, R, Z,
                                         f"reverse_poincare[{f.name}]")
    jets = f.pt_jet_arrays(t, np.asarray(_R_IDENTITY), np.asarray(0.0))
    lhs = float(gamma_arrays(jets["fr"], jets["fz"], _R_IDENTITY))
    mean_sq, _ = haar_integrate(
        lambda R, Z: pt_spectral_grid(t, R, Z)[0] * f.values(R, Z) ** 2,
        _INEQ_SPEC)
    mean = float(jets["f"])
    margin = ct * (mean_sq - mean * mean) - lhs
    return VerifyReport(margin, (t, 0.0, 0.0), 1,
                        int(margin < -MARGIN_TOL),
                        f"reverse_poincare[{f.name}]")


def poincare_sharpness_probe(t, n_phi=8, grid_n=24, c_value=None) -> float:
    """max over span functions and base points of LHS/RHS; documents how
    close the simple eigenfunction span comes to the sharp constant."""
    ct = c_value if c_value is not None else c_const(t)
    R, Z = _interior_grid(grid_n)
    best = 0.0
    for phi in np.linspace(0.0, np.pi, n_phi, endpoint=False):
        f = span_function(phi)
        jets = f.pt_jet_arrays(t, R, Z)
        lhs = gamma_arrays(jets["fr"], jets["fz"], R)
        var = f.pt_square(t, R, Z) - jets["f"] ** 2
        ratio = lhs / (ct * var)
        best = max(best, float(np.max(ratio)))
    return best


# ---------------------------------------------------------------------------
# Li-Yau verifiers

def _interior_grid(grid_n, margin=1e-3):
    r = np.linspace(margin, np.pi / 2 - margin, grid_n)
    z = np.linspace(-np.pi + margin, np.pi - margin, grid_n)
    return np.meshgrid(r, z, indexing="ij", sparse=True)


def _log_kernel_fields(t, R, Z, s=1e-3):
    """Gamma(ln P), (Z ln P)^2 and L P/P for P = p_{t+s} on a grid."""
    jets = pt_spectral_jet_grid(t + s, R, Z, eps=1e-11)
    p = jets["f"]
    gam_log = gamma_arrays(jets["fr"] / p, jets["fz"] / p, R)
    z_log_sq = (jets["fz"] / p) ** 2
    lp_over_p = generator_arrays(jets["fr"], jets["frr"], jets["fzz"], R) / p
    return gam_log, z_log_sq, lp_over_p


def li_yau_check(t, alpha, grid_n=40, s=1e-3) -> VerifyReport:
    """Polynomial-rate Li-Yau inequality applied to f = p_s (P_t f = p_{t+s}):

    Gamma(ln P_t f) + (t/a)(Z ln P_t f)^2
      <= ((3a-1)/(a-1) - 2t/a) L P_t f / P_t f
         + t/a - (3a-1)/(a-1) + (3a-1)^2/((a-2) t).
    """
    if alpha <= 2:
        raise ValueError("li_yau_check requires alpha > 2")
    R, Z = _interior_grid(grid_n)
    gam_log, z_log_sq, lp_over_p = _log_kernel_fields(t, R, Z, s)
    a = float(alpha)
    lhs = gam_log + (t / a) * z_log_sq
    rhs = (((3 * a - 1) / (a - 1) - 2 * t / a) * lp_over_p
           + t / a - (3 * a - 1) / (a - 1)
           + (3 * a - 1) ** 2 / ((a - 2) * t))
    return VerifyReport.from_margins(rhs - lhs, t, R, Z,
                                     f"li_yau[alpha={alpha}]")


def li_yau_exponential_check(t, alpha, grid_n=40, s=1e-3) -> VerifyReport:
    """Exponential-rate Li-Yau variant:

    Gamma(ln P_t f) + (3/2)(1 - e^{-8t/3a})(Z ln P_t f)^2
      <= 6 (-1 + 1/3a)^2 (a/(a-2)) e^{-16t/3a}/(1 - e^{-8t/3a})
         - 3 (-1 + 1/3a) (a/(a-1)) e^{-8t/3a} L P_t f / P_t f.
    """
    if alpha <= 2:
        raise ValueError("li_yau_exponential_check requires alpha > 2")
    R, Z = _interior_grid(grid_n)
    gam_log, z_log_sq, lp_over_p = _log_kernel_fields(t, R, Z, s)
    a = float(alpha)
    q = math.exp(-8.0 * t / (3.0 * a))
    lhs = gam_log + 1.5 * (1.0 - q) * z_log_sq
    rhs = (6.0 * (-1.0 + 1.0 / (3 * a)) ** 2 * (a / (a - 2)) * q * q / (1.0 - q)
           - 3.0 * (-1.0 + 1.0 / (3 * a)) * (a / (a - 1)) * q * lp_over_p)
    return VerifyReport.from_margins(rhs - lhs, t, R, Z,
                                     f"li_yau_exp[alpha={alpha}]")


# ---------------------------------------------------------------------------
# Harnack probe, global gradient bound, L^p constants, moment lemma

@dataclass(frozen=True)
class HarnackProbe:
    ratio: float
    log_ratio: float
    log_time_ratio: float
    delta_sq_over_gap: float
    delta_lower: float


def harnack_ratio(t1, t2, p1, p2) -> HarnackProbe:
    """Measured kernel ratio p_{t1}(p1)/p_{t2}(p2) with the normalized
    exponents of the Harnack form; delta is the triangle lower bound
    |d(p1) - d(p2)| (the true pairwise distance may be larger)."""
    if not 0.0 < t1 < t2:
        raise ValueError("harnack_ratio requires 0 < t1 < t2")
    v1 = pt(t1, p1.r, p1.z).value
    v2 = pt(t2, p2.r, p2.z).value
    d1 = cc_distance(p1.r, p1.z).distance
    d2 = cc_distance(p2.r, p2.z).distance
    delta = abs(d1 - d2)
    return HarnackProbe(v1 / v2, math.log(v1 / v2), math.log(t2 / t1),
                        delta * delta / (t2 - t1), delta)


def fit_harnack_constants(probes) -> tuple[float, float]:
    """Least-squares (A1, A2) with ln ratio ~ A1 ln(t2/t1) + A2 d^2/(t2-t1)."""
    x = np.array([[p.log_time_ratio, p.delta_sq_over_gap] for p in probes])
    y = np.array([p.log_ratio for p in probes])
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return float(coef[0]), float(coef[1])


def grad_log_kernel_ratio(t, r, z) -> float:
    """sqrt(Gamma(ln p_t))(r, z) / (d(r, z)/t + 1/sqrt(t))."""
    jets = pt_spectral_jet_grid(t, np.asarray(float(r)), np.asarray(float(z)))
    p = jets["f"]
    gam = float(gamma_arrays(jets["fr"] / p, jets["fz"] / p, np.asarray(float(r))))
    d = cc_distance(r, z).distance
    return math.sqrt(gam) / (d / t + 1.0 / math.sqrt(t))


def lp_bound_probe(p, t) -> tuple[float, float]:
    """(sup-point LHS, RHS/C_p) of the L^p gradient bound at f = cos r cos z.

    sqrt(Gamma(P_t f)) = e^{-2t} sin r peaks at r = pi/2 where the large-t
    P_t average of sin^p r is the Haar moment 2/(p+2); the implied lower
    bound is C_p >= (lhs/rhs) -> (1 + p/2)^{1/p}.
    """
    if p <= 1:
        raise ValueError("lp_bound_probe requires p > 1")
    moment, _ = haar_integrate(lambda R, Z: np.sin(R) ** p, _INEQ_SPEC)
    lhs = math.exp(-2.0 * t) * 1.0
    rhs_over_cp = math.exp(-2.0 * t) * moment ** (1.0 / p)
    return lhs, rhs_over_cp


def cp_lower_bound(p) -> float:
    """Quadrature-backed C_p lower bound (1 + p/2)^{1/p}."""
    lhs, rhs = lp_bound_probe(p, 0.0)
    return lhs / rhs


def lemma_limit_moment(q, t, grid_margin=1e-3) -> float:
    """Int (sin 2r)^q Gamma(ln p_t)^{q/2} p_t dmu (bounded as t -> 0)."""
    if not 0.02 <= t <= 1.0:
        raise ValueError("lemma_limit_moment supported for t in [0.02, 1]")

    def integrand(R, Z):
        jets = pt_spectral_jet_grid(t, R, Z, eps=1e-10)
        p = jets["f"]
        gam = gamma_arrays(jets["fr"] / p, jets["fz"] / p, R)
        return np.sin(2.0 * R) ** q * gam ** (q / 2.0) * p

    spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-5, max_refinements=16)
    val, _ = haar_integrate(integrand, spec, r_margin=grid_margin)
    return val

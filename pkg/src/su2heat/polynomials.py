"""Jacobi polynomials P_k^{0,n} and Chebyshev U_m with derivatives.

The (0, n) Jacobi family is evaluated by the standard three-term recurrence
specialized to alpha=0, beta=n (normalization P_k^{0,n}(1) = 1); first and
second derivatives ride along on the differentiated recurrence, so no
division by (1 - x^2) ever occurs.  Degree caps are generous relative to
what kernel truncation requests for t >= 0.01 and guard against silent
quality loss beyond the validated range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TruncationCapError

K_CAP = 200
N_CAP = 600


@dataclass(frozen=True)
class PolyIndex:
    """Degree k and second Jacobi parameter n (both nonnegative)."""

    k: int
    n: int

    def __post_init__(self):
        if self.k < 0 or self.n < 0:
            raise ValueError("PolyIndex requires k >= 0 and n >= 0")


def _check_caps(k, n):
    if k > K_CAP or n > N_CAP:
        raise TruncationCapError(
            f"Jacobi order (k={k}, n={n}) beyond validated caps "
            f"({K_CAP}, {N_CAP})")


def jacobi_iter(n, x, k_max, derivatives=0):
    """Yield (P_k, dP_k, d2P_k) for k = 0..k_max at x, rolling storage.

    The differentiated three-term recurrence is used throughout, so no
    division by (1 - x^2) occurs and the iteration is stable on [-1, 1].
    Entries beyond ``derivatives`` are None.  ``x`` may be an array.
    """
    _check_caps(k_max, n)
    x = np.asarray(x, dtype=float)
    one = np.ones_like(x)
    zero = np.zeros_like(x)
    p2, d2_, s2 = one, zero, zero
    yield (p2, d2_ if derivatives >= 1 else None, s2 if derivatives >= 2 else None)
    if k_max == 0:
        return
    p1 = 0.5 * ((n + 2.0) * x - n)
    d1 = np.full_like(x, 0.5 * (n + 2.0))
    s1 = zero
    yield (p1, d1 if derivatives >= 1 else None, s1 if derivatives >= 2 else None)
    for k in range(2, k_max + 1):
        a = 2.0 * k * (k + n) * (2 * k + n - 2)
        b1 = (2 * k + n - 1.0) * (2 * k + n) * (2 * k + n - 2)
        b0 = -(2 * k + n - 1.0) * n * n
        c = 2.0 * (k - 1) * (k + n - 1) * (2 * k + n)
        lin = b0 + b1 * x
        p0 = (lin * p1 - c * p2) / a
        if derivatives >= 1:
            d0 = (lin * d1 + b1 * p1 - c * d2_) / a
        if derivatives >= 2:
            s0 = (lin * s1 + 2.0 * b1 * d1 - c * s2) / a
        yield (p0, d0 if derivatives >= 1 else None, s0 if derivatives >= 2 else None)
        p2, p1 = p1, p0
        if derivatives >= 1:
            d2_, d1 = d1, d0
        if derivatives >= 2:
            s2, s1 = s1, s0


def jacobi_columns(k_max, n, x, derivatives=0):
    """All P_k^{0,n}(x) for k = 0..k_max, vectorized in x.

    Returns an array of shape (k_max+1, *x.shape) or, with
    ``derivatives`` in {1, 2}, a tuple of that many +1 such arrays
    (values, first, second derivative).
    """
    x = np.asarray(x, dtype=float)
    rows = list(jacobi_iter(n, x, k_max, derivatives))
    P = np.stack([r[0] for r in rows])
    if derivatives == 0:
        return P
    D = np.stack([r[1] for r in rows])
    if derivatives == 1:
        return P, D
    S = np.stack([r[2] for r in rows])
    return P, D, S


def jacobi_p(idx: PolyIndex, x) -> float:
    """P_k^{0,n}(x) with normalization P_k^{0,n}(1) = 1."""
    return float(jacobi_columns(idx.k, idx.n, np.asarray(x, dtype=float))[idx.k])


def jacobi_p_dx(idx: PolyIndex, x) -> float:
    """d/dx of P_k^{0,n} at x."""
    _, D = jacobi_columns(idx.k, idx.n, np.asarray(x, dtype=float), derivatives=1)
    return float(D[idx.k])


def chebyshev_u(m: int, x):
    """Chebyshev polynomial of the second kind, U_m(cos t) = sin((m+1)t)/sin t.

    The recurrence gives the polynomial extension for |x| > 1 as well.
    """
    if m < 0:
        raise ValueError("chebyshev_u needs m >= 0")
    x = np.asarray(x, dtype=float)
    if m == 0:
        return np.ones_like(x) if x.shape else 1.0
    prev = np.ones_like(x)
    cur = 2.0 * x
    for _ in range(m - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur if x.shape else float(cur)

"""Cylindric coordinates on SU(2), Haar measure, and the Gamma operators.

A point is parametrized as ``exp(r (cos(theta) X + sin(theta) Y)) exp(z Z)``
with ``r in [0, pi/2]``, ``theta in [0, 2pi)``, ``z in [-pi, pi]``, where
X, Y, Z are the Pauli-type generators fixed below.  The subelliptic
generator is ``L = X^2 + Y^2``; for fields depending only on (r, z) all
first- and second-order invariants reduce to explicit (r, z) expressions,
implemented here on :class:`Jet2` carriers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChartWarning, SingularAtBoundary

HALF_PI = np.pi / 2

# Lie algebra basis: [Z,X]=2Y, [X,Y]=2Z, [Y,Z]=2X
PAULI_X = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, 1j], [1j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1j, 0.0], [0.0, -1j]], dtype=complex)

_UNITARITY_TOL = 1e-12


def reduce_angle(z):
    """Reduce an angle to [-pi, pi] by the nearest multiple of 2 pi."""
    return z - 2.0 * np.pi * np.round(np.asarray(z) / (2.0 * np.pi))


@dataclass(frozen=True)
class CylCoord:
    """Cylindric coordinates (r, theta, z) of a point of SU(2).

    z is stored reduced to [-pi, pi]; r = pi/2 is admitted (closed chart)
    but operations singular there say so.
    """

    r: float
    theta: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.r <= HALF_PI + 1e-15):
            raise ValueError(f"r={self.r} outside [0, pi/2]")
        object.__setattr__(self, "z", float(reduce_angle(self.z)))


@dataclass(frozen=True)
class GroupElement:
    """A 2x2 special unitary matrix, stored entrywise."""

    a11: complex
    a12: complex
    a21: complex
    a22: complex

    def __post_init__(self):
        m = self.matrix
        if np.max(np.abs(m.conj().T @ m - np.eye(2))) > _UNITARITY_TOL:
            raise ValueError("matrix is not unitary within 1e-12")
        if abs(np.linalg.det(m) - 1.0) > _UNITARITY_TOL:
            raise ValueError("determinant differs from 1 by more than 1e-12")

    @property
    def matrix(self):
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @classmethod
    def from_array(cls, m):
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def __matmul__(self, other):
        return GroupElement.from_array(self.matrix @ other.matrix)

    def inverse(self):
        return GroupElement(np.conj(self.a11), np.conj(self.a21),
                            np.conj(self.a12), np.conj(self.a22))


@dataclass(frozen=True)
class Jet2:
    """Value and (r, z) partials up to second order of a scalar field,
    together with the evaluation point."""

    r: float
    z: float
    f: float
    fr: float = 0.0
    fz: float = 0.0
    frr: float = 0.0
    frz: float = 0.0
    fzz: float = 0.0

    def as_tuple(self):
        return (self.f, self.fr, self.fz, self.frr, self.frz, self.fzz)


def to_matrix(c: CylCoord) -> GroupElement:
    """Group element of cylindric coordinates.

    Entries: a11 = cos(r) e^{iz}, a12 = sin(r) e^{i(theta - z)},
    a21 = -conj(a12), a22 = conj(a11).
    """
    cr, sr = np.cos(c.r), np.sin(c.r)
    a11 = cr * np.exp(1j * c.z)
    a12 = sr * np.exp(1j * (c.theta - c.z))
    return GroupElement(a11, a12, -np.conj(a12), np.conj(a11))


def from_matrix(g: GroupElement) -> CylCoord:
    """Chart inverse: r = arccos|a11|, z = arg(a11), theta = arg(a12) + z.

    At the degenerate chart points |a11| in {0, 1} the unidentifiable angle
    (theta at r = 0, z at r = pi/2) is set to 0 and a
    :class:`DegenerateChartWarning` is emitted.
    """
    mod = min(abs(g.a11), 1.0)
    r = float(np.arccos(mod))
    if mod >= 1.0 - 1e-15:          # r = 0: theta unidentifiable
        warnings.warn("r = 0: theta not identifiable, set to 0",
                      DegenerateChartWarning, stacklevel=2)
        return CylCoord(0.0, 0.0, float(np.angle(g.a11)))
    if mod <= 1e-15:                # r = pi/2: z unidentifiable
        warnings.warn("r = pi/2: z not identifiable, set to 0",
                      DegenerateChartWarning, stacklevel=2)
        return CylCoord(HALF_PI, float(np.angle(g.a12)), 0.0)
    z = float(np.angle(g.a11))
    theta = float(np.angle(g.a12)) + z
    return CylCoord(r, theta % (2.0 * np.pi), z)


def coords_from_entries(a11, a12):
    """Vectorized chart inverse from matrix entries, canonical at degeneracies.

    Returns arrays (r, theta, z).  Used by the Monte Carlo sampler.
    """
    a11 = np.asarray(a11)
    a12 = np.asarray(a12)
    mod = np.clip(np.abs(a11), 0.0, 1.0)
    r = np.arccos(mod)
    z = np.where(mod > 1e-15, np.angle(a11), 0.0)
    theta = np.where((mod < 1.0 - 1e-15) & (mod > 1e-15),
                     np.mod(np.angle(a12) + z, 2.0 * np.pi), 0.0)
    return r, theta, z


def gamma(j: Jet2) -> float:
    """Carre du champ for a theta-independent field: fr^2 + tan^2(r) fz^2."""
    r = j.r
    if np.isclose(r, HALF_PI, atol=1e-14):
        if j.fz != 0.0:
            raise SingularAtBoundary("gamma at r = pi/2 with fz != 0")
        return j.fr ** 2
    return j.fr ** 2 + np.tan(r) ** 2 * j.fz ** 2


def gamma2(j: Jet2) -> float:
    """Iterated carre du champ, sum-of-squares form.

    Gamma_2 = frr^2 + (tan^2 r fzz - (2/sin 2r) fr)^2
              + 2 (fz/cos^2 r + tan r frz)^2,  valid for 0 < r < pi/2.
    """
    r = j.r
    if np.isclose(r, 0.0, atol=1e-14) or np.isclose(r, HALF_PI, atol=1e-14) \
            or not 0.0 < r < HALF_PI:
        raise SingularAtBoundary("gamma2 has coefficient poles at r in {0, pi/2}")
    tr = np.tan(r)
    term2 = tr ** 2 * j.fzz - 2.0 / np.sin(2.0 * r) * j.fr
    term3 = j.fz / np.cos(r) ** 2 + tr * j.frz
    return j.frr ** 2 + term2 ** 2 + 2.0 * term3 ** 2


def gamma_bilinear(j1: Jet2, j2: Jet2) -> float:
    """Polarized Gamma(f, g) = fr gr + tan^2(r) fz gz."""
    return j1.fr * j2.fr + np.tan(j1.r) ** 2 * j1.fz * j2.fz


def apply_generator(j: Jet2):
    """L f = frr + 2 cotan(2r) fr + tan^2(r) fzz for theta-independent f."""
    r = j.r
    return j.frr + 2.0 / np.tan(2.0 * r) * j.fr + np.tan(r) ** 2 * j.fzz


def generator_arrays(fr, frr, fzz, r):
    """Vectorized L f from partial-derivative arrays."""
    r = np.asarray(r, dtype=float)
    return frr + 2.0 / np.tan(2.0 * r) * fr + np.tan(r) ** 2 * fzz


def gamma_arrays(fr, fz, r):
    """Vectorized Gamma from first-derivative arrays."""
    r = np.asarray(r, dtype=float)
    return fr ** 2 + np.tan(r) ** 2 * fz ** 2


def gamma2_arrays(fr, fz, frr, frz, fzz, r):
    """Vectorized sum-of-squares Gamma_2 on interior points."""
    r = np.asarray(r, dtype=float)
    tr = np.tan(r)
    term2 = tr ** 2 * fzz - 2.0 / np.sin(2.0 * r) * fr
    term3 = fz / np.cos(r) ** 2 + tr * frz
    return frr ** 2 + term2 ** 2 + 2.0 * term3 ** 2


def gamma2_expanded_arrays(fr, fz, frr, frz, fzz, r):
    """Gamma_2 in the expanded form with signed cross terms.

    Algebraically identical to :func:`gamma2_arrays`; kept separate because
    positivity of this form is a real numerical statement (the
    sum-of-squares form is nonnegative by construction).
    """
    r = np.asarray(r, dtype=float)
    tr = np.tan(r)
    c2, c4 = np.cos(r) ** 2, np.cos(r) ** 4
    return (frr ** 2 + 2.0 * tr ** 2 * frz ** 2 + tr ** 4 * fzz ** 2
            + 2.0 / c4 * fz ** 2 + 4.0 / np.sin(2.0 * r) ** 2 * fr ** 2
            + 4.0 * tr / c2 * fz * frz - 2.0 * tr / c2 * fr * fzz)

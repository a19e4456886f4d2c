import numpy as np
import pytest

from su2heat.errors import DegenerateChartWarning, SingularAtBoundary
from su2heat.geometry import (CylCoord, GroupElement, Jet2, apply_generator,
                              from_matrix, gamma, gamma2, gamma2_arrays,
                              gamma2_expanded_arrays, gamma_bilinear,
                              reduce_angle, to_matrix)
from su2heat.quadrature import QuadratureSpec, haar_integrate, haar_integrate_3d

SPEC = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11)


def cos_field_jet(r, z):
    return Jet2(r, z, np.cos(r) * np.cos(z), -np.sin(r) * np.cos(z),
                -np.cos(r) * np.sin(z), -np.cos(r) * np.cos(z),
                np.sin(r) * np.sin(z), -np.cos(r) * np.cos(z))


class TestMatrixChart:
    def test_identity(self):
        m = to_matrix(CylCoord(0.0, 0.0, 0.0)).matrix
        assert np.allclose(m, np.eye(2))

    def test_pi_third(self):
        m = to_matrix(CylCoord(np.pi / 3, 0.0, 0.0)).matrix
        expected = np.array([[0.5, np.sqrt(3) / 2], [-np.sqrt(3) / 2, 0.5]])
        assert np.allclose(m, expected, atol=1e-15)

    def test_r_zero_collapses_theta(self):
        m1 = to_matrix(CylCoord(0.0, 0.3, np.pi / 2)).matrix
        m2 = to_matrix(CylCoord(0.0, 2.2, np.pi / 2)).matrix
        assert np.allclose(m1, m2)
        assert np.allclose(m1, np.diag([1j, -1j]))

    def test_from_matrix_identity_is_canonical(self):
        with pytest.warns(DegenerateChartWarning):
            c = from_matrix(GroupElement(1.0, 0.0, 0.0, 1.0))
        assert (c.r, c.theta, c.z) == (0.0, 0.0, 0.0)

    def test_from_matrix_simple(self):
        g = GroupElement(0.5, np.sqrt(3) / 2, -np.sqrt(3) / 2, 0.5)
        c = from_matrix(g)
        assert abs(c.r - np.pi / 3) < 1e-14
        assert abs(c.theta) < 1e-14 and abs(c.z) < 1e-14

    def test_round_trip_oracle(self):
        c = CylCoord(0.7, 2.1, -0.4)
        back = from_matrix(to_matrix(c))
        assert abs(back.r - 0.7) < 1e-10
        assert abs(back.theta - 2.1) < 1e-10
        assert abs(back.z + 0.4) < 1e-10

    def test_round_trip_random(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            c = CylCoord(rng.uniform(0.05, np.pi / 2 - 0.05),
                         rng.uniform(0, 2 * np.pi),
                         rng.uniform(-np.pi, np.pi))
            m = to_matrix(c)
            m2 = to_matrix(from_matrix(m))
            assert np.max(np.abs(m.matrix - m2.matrix)) < 1e-10

    def test_unitarity_enforced(self):
        with pytest.raises(ValueError):
            GroupElement(1.1, 0.0, 0.0, 1.0)

    def test_group_product_and_inverse(self):
        g = to_matrix(CylCoord(0.8, 1.0, 0.5))
        h = to_matrix(CylCoord(0.4, 2.0, -1.0))
        prod = g @ h
        assert np.allclose((g.inverse() @ prod).matrix, h.matrix, atol=1e-13)

    def test_z_reduction(self):
        assert abs(reduce_angle(3 * np.pi) - (-np.pi)) < 1e-12 or \
            abs(reduce_angle(3 * np.pi) - np.pi) < 1e-12
        assert abs(CylCoord(0.3, 0.0, 2 * np.pi + 0.1).z - 0.1) < 1e-14


class TestHaar:
    def test_normalized(self):
        val, _ = haar_integrate(
            lambda R, Z: np.ones(np.broadcast_shapes(R.shape, Z.shape)), SPEC)
        assert abs(val - 1.0) < 1e-10

    def test_gamma_eigenfunction_moment(self):
        # Gamma(cos r cos z) = sin^2 r integrates to 1/2
        val, _ = haar_integrate(lambda R, Z: np.sin(R) ** 2 + 0.0 * Z, SPEC)
        assert abs(val - 0.5) < 1e-10

    @pytest.mark.parametrize("p,expected", [(3, 2 / 5), (2, 1 / 2), (5, 2 / 7)])
    def test_sin_power_moment(self, p, expected):
        # antiderivative oracle: d/dr (2 sin^{p+2} r/(p+2)) = 2 sin^{p+1} r cos r
        val, _ = haar_integrate(lambda R, Z: np.sin(R) ** p + 0.0 * Z, SPEC)
        assert abs(val - expected) < 1e-10

    def test_theta_product_rule_matches_reduced(self):
        val3, _ = haar_integrate_3d(
            lambda R, TH, Z: np.cos(R) ** 2 * np.cos(Z) ** 2, SPEC)
        val2, _ = haar_integrate(
            lambda R, Z: np.cos(R) ** 2 * np.cos(Z) ** 2, SPEC)
        assert abs(val3 - val2) < 1e-10


class TestGamma:
    def test_eigenfunction_gamma(self):
        for (r, z) in [(0.3, 0.2), (1.0, -2.0), (1.4, 3.0)]:
            j = cos_field_jet(r, z)
            assert abs(gamma(j) - np.sin(r) ** 2) < 1e-13

    def test_constant(self):
        assert gamma(Jet2(0.5, 0.1, 3.0)) == 0.0
        assert gamma2(Jet2(0.5, 0.1, 3.0)) == 0.0

    def test_linear_z(self):
        j = Jet2(np.pi / 4, 0.0, 0.0, fz=1.0)
        assert abs(gamma(j) - 1.0) < 1e-14
        assert abs(gamma2(j) - 8.0) < 1e-12

    def test_gamma2_z_general(self):
        r = 0.9
        j = Jet2(r, 0.0, 0.0, fz=1.0)
        assert abs(gamma2(j) - 2.0 / np.cos(r) ** 4) < 1e-12

    def test_boundary_singularities(self):
        with pytest.raises(SingularAtBoundary):
            gamma2(Jet2(0.0, 0.0, 1.0, fr=1.0))
        with pytest.raises(SingularAtBoundary):
            gamma2(Jet2(np.pi / 2, 0.0, 1.0, fz=1.0))
        with pytest.raises(SingularAtBoundary):
            gamma(Jet2(np.pi / 2, 0.0, 1.0, fz=1.0))

    def test_gamma2_nonnegative_random_jets(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            j = Jet2(rng.uniform(0.01, np.pi / 2 - 0.01), 0.0,
                     *rng.normal(size=6))
            assert gamma2(j) >= 0.0

    def test_sos_equals_expanded(self):
        rng = np.random.default_rng(5)
        r = rng.uniform(0.05, np.pi / 2 - 0.05, size=100)
        parts = rng.normal(size=(5, 100))
        sos = gamma2_arrays(*parts, r)
        exp = gamma2_expanded_arrays(*parts, r)
        assert np.max(np.abs(sos - exp) / (1.0 + np.abs(sos))) < 1e-12

    def test_gamma2_defining_bracket_oracle(self):
        # Gamma_2(f) = (L Gamma(f) - 2 Gamma(f, Lf))/2 via finite differences
        r0, z0 = 0.6, 0.3

        def gamma_field(r, z):
            return gamma(cos_field_jet(r, z))

        def lf_field(r, z):
            return apply_generator(cos_field_jet(r, z))

        h = 1e-4

        def fd_jet(field, r, z):
            f0 = field(r, z)
            fr = (field(r + h, z) - field(r - h, z)) / (2 * h)
            fz = (field(r, z + h) - field(r, z - h)) / (2 * h)
            frr = (field(r + h, z) - 2 * f0 + field(r - h, z)) / h ** 2
            fzz = (field(r, z + h) - 2 * f0 + field(r, z - h)) / h ** 2
            frz = (field(r + h, z + h) - field(r + h, z - h)
                   - field(r - h, z + h) + field(r - h, z - h)) / (4 * h * h)
            return Jet2(r, z, f0, fr, fz, frr, frz, fzz)

        lgamma_f = apply_generator(fd_jet(gamma_field, r0, z0))
        gamma_f_lf = gamma_bilinear(cos_field_jet(r0, z0), fd_jet(lf_field, r0, z0))
        bracket = 0.5 * lgamma_f - gamma_f_lf
        assert abs(gamma2(cos_field_jet(r0, z0)) - bracket) < 1e-6

    def test_analytic_jets_match_finite_differences(self):
        rng = np.random.default_rng(11)
        h = 1e-5
        for _ in range(20):
            r, z = rng.uniform(0.1, 1.4), rng.uniform(-3.0, 3.0)
            j = cos_field_jet(r, z)
            f = lambda rr, zz: np.cos(rr) * np.cos(zz)
            fd_gamma = ((f(r + h, z) - f(r - h, z)) / (2 * h)) ** 2 \
                + np.tan(r) ** 2 * ((f(r, z + h) - f(r, z - h)) / (2 * h)) ** 2
            assert abs(gamma(j) - fd_gamma) < 1e-6

import numpy as np
import pytest
import sympy as sp

from su2heat.errors import TruncationCapError
from su2heat.polynomials import (K_CAP, N_CAP, PolyIndex, chebyshev_u,
                                 jacobi_columns, jacobi_p, jacobi_p_dx)
from su2heat.quadrature import QuadratureSpec, adaptive_quad

X = sp.symbols("x")


def rodrigues(k, n):
    """Brute-force differentiation oracle for P_k^{0,n}."""
    expr = (1 + X) ** n * (1 - X ** 2) ** k
    return sp.expand((-1) ** k / (2 ** k * sp.factorial(k) * (1 + X) ** n)
                     * sp.diff(expr, X, k))


class TestJacobi:
    def test_degree_zero(self):
        for n in (0, 1, 5):
            for x in (-1.0, 0.0, 0.7, 1.0):
                assert jacobi_p(PolyIndex(0, n), x) == 1.0

    def test_degree_one_closed_form(self):
        # Rodrigues gives P_1^{0,n}(x) = ((n+2)x - n)/2, so P_1^{0,2}(0) = -1
        for n in range(6):
            for x in (-0.5, 0.0, 0.3, 1.0):
                assert abs(jacobi_p(PolyIndex(1, n), x)
                           - ((n + 2) * x - n) / 2) < 1e-14
        assert abs(jacobi_p(PolyIndex(1, 2), 0.0) + 1.0) < 1e-15

    def test_normalization_at_one(self):
        for k in range(11):
            for n in range(11):
                assert abs(jacobi_p(PolyIndex(k, n), 1.0) - 1.0) < 1e-12

    def test_rodrigues_oracle(self):
        for k in range(7):
            for n in range(7):
                poly = rodrigues(k, n)
                for x in (-0.9, -0.3, 0.25, 0.5, 0.8):
                    expected = float(poly.subs(X, sp.Rational(x).limit_denominator(10 ** 6)))
                    assert abs(jacobi_p(PolyIndex(k, n), x) - expected) < 1e-12

    def test_rodrigues_k3_n1(self):
        expected = float(rodrigues(3, 1).subs(X, sp.Rational(1, 2)))
        assert abs(jacobi_p(PolyIndex(3, 1), 0.5) - expected) < 1e-12

    def test_recurrence_vs_rodrigues_high_degree(self):
        for k in (8, 10):
            for n in (7, 10):
                poly = rodrigues(k, n)
                x = sp.Rational(13, 100)
                expected = float(poly.subs(X, x))
                got = jacobi_p(PolyIndex(k, n), 0.13)
                assert abs(got - expected) < 1e-10 * max(1.0, abs(expected))

    def test_against_scipy_large_n(self):
        from scipy.special import eval_jacobi
        rng = np.random.default_rng(0)
        for _ in range(30):
            k = int(rng.integers(0, 40))
            n = int(rng.integers(0, N_CAP + 1))
            x = float(rng.uniform(-1, 1))
            got = jacobi_p(PolyIndex(k, n), x)
            ref = float(eval_jacobi(k, 0, n, x))
            assert abs(got - ref) < 1e-9 * max(1.0, abs(ref))

    def test_caps_enforced(self):
        with pytest.raises(TruncationCapError):
            jacobi_p(PolyIndex(K_CAP + 1, 0), 0.5)
        with pytest.raises(TruncationCapError):
            jacobi_p(PolyIndex(0, N_CAP + 1), 0.5)


class TestJacobiDerivative:
    def test_degree_zero(self):
        assert jacobi_p_dx(PolyIndex(0, 4), 0.3) == 0.0

    def test_degree_one_constant(self):
        for x in (-0.5, 0.2, 0.9):
            assert abs(jacobi_p_dx(PolyIndex(1, 2), x) - 2.0) < 1e-14

    @pytest.mark.parametrize("k,n,x", [(2, 3, 0.25), (4, 1, -0.4), (6, 5, 0.6)])
    def test_finite_difference(self, k, n, x):
        h = 1e-6
        fd = (jacobi_p(PolyIndex(k, n), x + h)
              - jacobi_p(PolyIndex(k, n), x - h)) / (2 * h)
        assert abs(jacobi_p_dx(PolyIndex(k, n), x) - fd) < 1e-8

    def test_second_derivative_consistency(self):
        # differentiated recurrence vs finite differences of the first derivative
        _, D, S = jacobi_columns(6, 3, np.array(0.2), derivatives=2)
        h = 1e-6
        _, Dp = jacobi_columns(6, 3, np.array(0.2 + h), derivatives=1)
        _, Dm = jacobi_columns(6, 3, np.array(0.2 - h), derivatives=1)
        fd = (Dp - Dm) / (2 * h)
        assert np.max(np.abs(S - fd)) < 1e-7


class TestEigenrelation:
    def test_gn_operator(self):
        # G_n = (1-x^2) d2 + (n - (2+n)x) d has eigenvalue -k(k+n+1)
        h = 1e-4
        xs = np.linspace(-0.9, 0.9, 19)
        for k in range(7):
            for n in range(7):
                idx = PolyIndex(k, n)
                p0 = np.array([jacobi_p(idx, x) for x in xs])
                pp = np.array([jacobi_p(idx, x + h) for x in xs])
                pm = np.array([jacobi_p(idx, x - h) for x in xs])
                d1 = (pp - pm) / (2 * h)
                d2 = (pp - 2 * p0 + pm) / h ** 2
                g = (1 - xs ** 2) * d2 + (n - (2 + n) * xs) * d1
                assert np.max(np.abs(g + k * (k + n + 1) * p0)) < 1e-6


class TestOrthogonality:
    @pytest.mark.parametrize("n", [0, 1, 3])
    def test_weighted_orthogonality(self, n):
        spec = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11)
        for j in range(6):
            for k in range(j, 6):
                def f(x, j=j, k=k):
                    pj = jacobi_columns(j, n, x)[j]
                    pk = jacobi_columns(k, n, x)[k]
                    return pj * pk * (1 + x) ** n
                val, _ = adaptive_quad(f, -1.0, 1.0, spec)
                expected = 2.0 ** (n + 1) / (2 * k + n + 1) if j == k else 0.0
                assert abs(val - expected) < 1e-8


class TestChebyshev:
    def test_m0(self):
        assert chebyshev_u(0, 0.4) == 1.0

    def test_m1(self):
        assert abs(chebyshev_u(1, 0.3) - 0.6) < 1e-15

    def test_defining_identity_zero(self):
        assert abs(chebyshev_u(2, 0.5)) < 1e-14  # sin(pi)/sin(pi/3) = 0

    def test_defining_identity_random(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            m = int(rng.integers(0, 25))
            x = float(rng.uniform(0.05, np.pi - 0.05))
            assert abs(chebyshev_u(m, np.cos(x))
                       - np.sin((m + 1) * x) / np.sin(x)) < 1e-10

    def test_hyperbolic_extension(self):
        # recurrence extends to x > 1: U_m(cosh s) = sinh((m+1)s)/sinh(s)
        for m in (1, 3, 7):
            for s in (0.2, 1.0):
                assert abs(chebyshev_u(m, np.cosh(s))
                           - np.sinh((m + 1) * s) / np.sinh(s)) < 1e-9

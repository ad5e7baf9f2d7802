import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import random_spectrum
from potex import operators as ops
from potex.exceptions import AdmissibilityError, DomainError, TruncationMismatchError, UnsupportedProblemError
from potex.operators import DiagonalOperator, ProblemSpec
from potex.sphharm import SphericalSpectrum, parseval_norm

D = ProblemSpec.dirichlet
N = ProblemSpec.neumann
R = ProblemSpec.robin
LN2 = math.log(2)


def robin_exact(a, b, k, r):
    """Robin trace multiplier at radius r = 2^j with exact rationals."""
    a, b, r = Fraction(a), Fraction(b), Fraction(r)
    return (a * r ** -(k + 1) - b * (k + 1) * r ** -(k + 2)) / (a - b * (k + 1))


class TestProblemSpec:
    def test_fixed_coefficients(self):
        assert (D(3).a, D(3).b) == (1.0, 0.0)
        assert (N(3).a, N(3).b) == (0.0, 1.0)

    def test_admissibility(self):
        R(1, -1, 50)
        with pytest.raises(AdmissibilityError):
            R(1, 1, 8)  # vanishes at k=0
        with pytest.raises(AdmissibilityError):
            R(3, 1, 8)  # vanishes at k=2
        R(3, 1, 1)  # k=2 not in range
        with pytest.raises(AdmissibilityError):
            R(0, 0, 0)

    def test_offset(self):
        assert D(0).offset == 1 and N(0).offset == 2
        with pytest.raises(UnsupportedProblemError):
            R(1, -1, 3).offset


class TestDiagonalOperator:
    def test_apply_linear(self, rng):
        op = DiagonalOperator(rng.standard_normal(6))
        s1, s2 = random_spectrum(rng, 5), random_spectrum(rng, 5)
        lhs = op(s1 * 2.0 + s2)
        rhs = op(s1) * 2.0 + op(s2)
        np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-13)

    def test_norm_bound_and_equality(self, rng):
        sig = rng.standard_normal(9)
        op = DiagonalOperator(sig)
        s = random_spectrum(rng, 8)
        assert parseval_norm(op(s)) <= op.norm() * parseval_norm(s) * (1 + 1e-14)
        kstar = int(np.argmax(np.abs(sig)))
        single = SphericalSpectrum.unit(8, kstar, 0)
        assert parseval_norm(op(single)) == pytest.approx(op.norm(), rel=1e-15)

    def test_truncation_mismatch(self):
        with pytest.raises(TruncationMismatchError):
            DiagonalOperator(np.ones(3))(SphericalSpectrum.zeros(4))

    def test_norm_of_energy(self, rng):
        op = DiagonalOperator(rng.standard_normal(7))
        s = random_spectrum(rng, 6)
        assert op.norm_of(s.degree_energy()) == pytest.approx(parseval_norm(op(s)), rel=1e-13)


class TestGenerators:
    def test_values(self):
        assert ops.generator(D(4))[0] == -1
        assert ops.generator(N(4))[0] == -2
        np.testing.assert_array_equal(ops.generator(D(3)).multipliers, [-1, -2, -3, -4])
        with pytest.raises(UnsupportedProblemError):
            ops.generator(R(1, -1, 3))

    def test_inverse(self):
        assert ops.inverse_generator(D(4))[1] == -0.5
        assert ops.inverse_generator(N(4))[0] == -0.5
        for spec in (D(10), N(10)):
            comp = ops.generator(spec) @ ops.inverse_generator(spec)
            np.testing.assert_allclose(comp.multipliers, 1.0, rtol=1e-15)

    @pytest.mark.parametrize("f", [ops.semigroup, ops.inverse_semigroup, ops.inverse_generator])
    def test_robin_unsupported(self, f):
        args = (R(1, -1, 3), 0.1) if f is not ops.inverse_generator else (R(1, -1, 3),)
        with pytest.raises(UnsupportedProblemError):
            f(*args)


class TestSemigroups:
    def test_identity_at_zero(self):
        for spec in (D(7), N(7)):
            np.testing.assert_array_equal(ops.semigroup(spec, 0).multipliers, 1.0)
            np.testing.assert_array_equal(ops.inverse_semigroup(spec, 0).multipliers, 1.0)

    def test_exact_values(self):
        assert ops.semigroup(D(0), LN2)[0] == pytest.approx(0.5, rel=1e-15)
        assert ops.semigroup(N(0), LN2)[0] == pytest.approx(0.25, rel=1e-15)
        assert ops.inverse_semigroup(D(0), 1.0)[0] == pytest.approx(math.exp(-1), rel=1e-15)

    def test_inverse_semigroup_law(self):
        for spec in (D(20), N(20)):
            lhs = ops.inverse_semigroup(spec, 0.3) @ ops.inverse_semigroup(spec, 0.7)
            np.testing.assert_allclose(lhs.multipliers, ops.inverse_semigroup(spec, 1.0).multipliers, rtol=1e-15, atol=1e-15)

    def test_negative_time(self):
        with pytest.raises(DomainError):
            ops.semigroup(D(2), -0.1)

    @pytest.mark.parametrize("spec", [D(30), N(30)])
    @pytest.mark.parametrize("family", ["trace", "inverse"])
    def test_defect_grid(self, spec, family):
        g = np.linspace(0, 5, 10)
        assert max(ops.semigroup_defect(spec, s, t, family) for s in g for t in g) <= 1e-14

    def test_strong_continuity(self):
        for spec in (D(6), N(6)):
            h = SphericalSpectrum.unit(6, 4, -2)
            ts = np.geomspace(1, 1e-8, 30)
            errs = [parseval_norm(ops.semigroup(spec, t)(h) - h) for t in ts]
            assert np.all(np.diff(errs) < 0) and errs[-1] < 1e-6


class TestResolvents:
    def test_dirichlet_by_quadrature(self):
        val, _ = integrate.quad(lambda u: math.exp(-u) * math.exp(-u), 0, math.inf)
        assert val == pytest.approx(0.5, abs=1e-12)
        assert ops.resolvent(D(0), "A", 1.0)[0] == pytest.approx(val, abs=1e-12)

    def test_neumann_values(self):
        assert ops.resolvent(N(0), "A", 1.0)[0] == pytest.approx(1 / 3, rel=1e-15)
        assert ops.resolvent(N(0), "A_inverse", 1.0)[0] == pytest.approx(2 / 3, rel=1e-15)

    def test_is_inverse_of_lambda_minus_generator(self):
        for spec in (D(12), N(12)):
            for lam in (0.1, 1.0, 7.5):
                a = ops.generator(spec).multipliers
                np.testing.assert_allclose(ops.resolvent(spec, "A", lam).multipliers * (lam - a), 1.0, rtol=1e-14)
                ainv = ops.inverse_generator(spec).multipliers
                np.testing.assert_allclose(
                    ops.resolvent(spec, "A_inverse", lam).multipliers * (lam - ainv), 1.0, rtol=1e-14
                )

    @pytest.mark.parametrize("spec", [D(8), N(8)])
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_laplace_transform_representation(self, spec, lam):
        for which, fam in (("A", ops.semigroup), ("A_inverse", ops.inverse_semigroup)):
            exact = ops.resolvent(spec, which, lam).multipliers
            for k in range(9):
                val, _ = integrate.quad(lambda u: math.exp(-lam * u) * fam(spec, u)[k], 0, 40, epsabs=1e-13, limit=200)
                assert abs(val - exact[k]) <= 1e-8

    def test_domain(self):
        with pytest.raises(DomainError):
            ops.resolvent(D(2), "A", 0.0)
        with pytest.raises(ValueError):
            ops.resolvent(D(2), "B", 1.0)


class TestAbelMeans:
    def test_values(self):
        assert ops.abel_mean(D(0), "A", 1e6)[0] == pytest.approx(1 / (1 + 1e-6), rel=1e-15)
        assert ops.abel_mean(D(0), "A_inverse", 1e-3)[0] == pytest.approx(1e-3 / (1e-3 + 1), rel=1e-15)

    def test_monotone_in_degree(self):
        for spec in (D(40), N(40)):
            for lam in (1e-2, 1.0, 1e2):
                assert np.all(np.diff(ops.abel_mean(spec, "A", lam).multipliers) < 0)
                assert np.all(np.diff(ops.abel_mean(spec, "A_inverse", lam).multipliers) > 0)

    def test_abel_limit_bound(self):
        for spec in (D(50), N(50)):
            k = np.arange(51)
            for lam in np.geomspace(1, 1e6, 13):
                gap = np.abs(ops.abel_mean(spec, "A", lam).multipliers - 1)
                assert np.all(gap <= (k + 2) / lam)


class TestErgodicMean:
    def test_quadrature_oracle(self):
        for r in (math.e, math.exp(10), 1.5):
            val, _ = integrate.quad(lambda rho: rho**-2, 1, r)
            assert ops.ergodic_mean(D(0), r)[0] == pytest.approx(val / math.log(r), rel=1e-12)
        assert ops.ergodic_mean(D(0), math.e)[0] == pytest.approx(1 - math.exp(-1), rel=1e-14)
        assert ops.ergodic_mean(D(0), math.exp(10))[0] == pytest.approx((1 - math.exp(-10)) / 10, rel=1e-14)

    def test_neumann_quadrature(self):
        r = 7.0
        for k in range(6):
            val, _ = integrate.quad(lambda rho: rho ** (-1 / (k + 2) - 1), 1, r, epsabs=1e-14)
            assert ops.ergodic_mean(N(5), r)[k] == pytest.approx(val / math.log(r), rel=1e-12)

    def test_tends_to_one(self):
        np.testing.assert_allclose(ops.ergodic_mean(D(20), 1 + 1e-9).multipliers, 1.0, atol=1e-8)

    def test_log_r_form(self):
        m1 = ops.ergodic_mean(N(5), 3.0).multipliers
        m2 = ops.ergodic_mean(N(5), log_r=math.log(3.0)).multipliers
        np.testing.assert_allclose(m1, m2, rtol=1e-15)
        assert np.all(np.isfinite(ops.ergodic_mean(D(5), log_r=5000.0).multipliers))

    def test_domain(self):
        with pytest.raises(DomainError):
            ops.ergodic_mean(D(2), 1.0)


class TestRobin:
    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 10), st.floats(-10, -0.1))
    def test_identity_at_zero(self, a, b):
        np.testing.assert_allclose(ops.robin_trace(R(a, b, 10), 0.0).multipliers, 1.0, rtol=1e-14)

    def test_exact_rational(self):
        assert robin_exact(1, -1, 0, 2) == Fraction(3, 8)
        assert ops.robin_trace(R(1, -1, 0), LN2)[0] == pytest.approx(3 / 8, rel=1e-15)
        for k in range(6):
            for j in (1, 2, 3):
                want = float(robin_exact(2, -3, k, 2**j))
                assert ops.robin_trace(R(2, -3, 5), j * LN2)[k] == pytest.approx(want, rel=1e-14)

    def test_reduction_dirichlet_exact(self):
        for t in (0.0, 0.3, 2.0):
            np.testing.assert_array_equal(ops.robin_trace(R(1, 0, 12), t).multipliers, ops.semigroup(D(12), t).multipliers)

    def test_reduction_neumann(self):
        for t in (0.0, 0.3, 2.0):
            np.testing.assert_allclose(
                ops.robin_trace(R(0, 1, 12), t).multipliers, ops.semigroup(N(12), t).multipliers, rtol=1e-15
            )

    def test_defect(self):
        d = ops.semigroup_defect(R(1, -1, 0), LN2, LN2)
        exact = abs(robin_exact(1, -1, 0, 2) ** 2 - robin_exact(1, -1, 0, 4))
        assert exact == Fraction(1, 64)
        assert d == pytest.approx(0.015625, abs=1e-12)
        assert ops.semigroup_defect(R(1, -1, 10), 0.0, 0.8) <= 1e-15
        assert ops.semigroup_defect(D(10), 0.4, 1.1) <= 1e-15

    def test_defect_positive_for_genuine_robin(self):
        for a, b in [(1, -1), (2, -0.5), (-1, 3)]:
            assert ops.semigroup_defect(R(a, b, 6), 0.5, 0.5) > 1e-3


class TestInterconnection:
    def test_random(self, rng):
        for spec in (D(32), N(32)):
            for lam in np.geomspace(1e-3, 1e3, 9):
                h = random_spectrum(rng, 32)
                assert ops.interconnection_residual(spec, lam, h) <= 1e-13 * parseval_norm(h)

    def test_dirichlet_lambda_one(self, rng):
        h = random_spectrum(rng, 32)
        assert ops.interconnection_residual(D(32), 1.0, h) <= 1e-14 * parseval_norm(h)

    def test_single_mode_neumann(self):
        h = SphericalSpectrum.unit(5, 5, 3)
        assert ops.interconnection_residual(N(5), 0.01, h) <= 1e-14

    def test_zero(self):
        assert ops.interconnection_residual(D(3), 2.0, SphericalSpectrum.zeros(3)) == 0.0


class TestKFunctional:
    def test_zero(self):
        r = ops.k_functional(D(4), SphericalSpectrum.zeros(4), 0.5)
        assert r.quadratic_k == 0 and r.upper_k == 0

    def test_single_mode_quadratic(self):
        r = ops.k_functional(D(0), SphericalSpectrum.unit(0, 0, 0), 1.0)
        assert r.quadratic_k == pytest.approx(1 / math.sqrt(2), rel=1e-15)

    @pytest.mark.parametrize("spec", [D(10), N(10)])
    @pytest.mark.parametrize("k", [0, 3, 10])
    @pytest.mark.parametrize("t", [1e-3, 0.05, 0.3, 2.0])
    def test_single_mode_analytic_minimum(self, spec, k, t):
        eta = 1.7
        h = SphericalSpectrum.from_modes(10, {(k, -k): eta})
        mu = k + spec.offset
        # f(y) = eta (y + t mu) / (1 + y) over y = c mu^2 >= 0; brute scan as a second oracle
        y = np.concatenate([[0.0], np.geomspace(1e-8, 1e8, 20001)])
        scan = np.min(eta * (y + t * mu) / (1 + y))
        analytic = eta * min(1.0, t * mu)
        assert scan == pytest.approx(analytic, rel=1e-6)
        assert ops.k_functional(spec, h, t).upper_k == pytest.approx(analytic, abs=1e-8)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(1e-4, 10), st.booleans())
    def test_sandwich(self, seed, t, neumann):
        rng = np.random.default_rng(seed)
        k_max = int(rng.integers(0, 20))
        h = random_spectrum(rng, k_max) * float(rng.uniform(0.01, 10))
        spec = N(k_max) if neumann else D(k_max)
        r = ops.k_functional(spec, h, t)
        assert 0 <= r.quadratic_k <= r.upper_k <= math.sqrt(2) * r.quadratic_k

    def test_minimizer_attains_upper(self, rng):
        h = random_spectrum(rng, 8)
        spec = D(8)
        t = 0.2
        r = ops.k_functional(spec, h, t)
        g = r.minimizer_multiplier(h)
        val = parseval_norm(h - g) + t * parseval_norm(ops.generator(spec)(g))
        assert val == pytest.approx(r.upper_k, rel=1e-12)

    def test_quadratic_is_infimum(self, rng):
        # no member of a random multiplier family beats the quadratic value
        h = random_spectrum(rng, 6)
        spec = N(6)
        t = 0.4
        r = ops.k_functional(spec, h, t)
        a = ops.generator(spec)
        for _ in range(200):
            g = DiagonalOperator(rng.uniform(0, 1.2, 7))(h)
            q = math.hypot(parseval_norm(h - g), t * parseval_norm(a(g)))
            assert q >= r.quadratic_k * (1 - 1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            ops.k_functional(D(2), SphericalSpectrum.zeros(2), 0.0)

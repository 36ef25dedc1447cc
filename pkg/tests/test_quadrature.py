import math

import numpy as np
import pytest
from scipy.special import i0

from arcdist.quadrature import (
    NODE_CAP,
    TOLERANCE_NOT_REACHED,
    FunctionalResult,
    NonFiniteIntegrandError,
    QuadratureRule,
    default_sphere_rule,
    integrate_1d,
    sphere_integrate,
)
from arcdist.sphere import angles_to_xyz, random_rotation_matrix

TWO_PI = 2.0 * math.pi


class TestRuleValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            QuadratureRule("simpson", 16, 1e-6)

    def test_bad_counts_and_tol(self):
        with pytest.raises(ValueError):
            QuadratureRule("gauss_legendre", 1, 1e-6)
        with pytest.raises(ValueError):
            QuadratureRule("gauss_legendre", 16, 0.0)

    def test_result_must_be_finite(self):
        with pytest.raises(ValueError):
            FunctionalResult(math.nan, 0.0, 4)
        with pytest.raises(ValueError):
            FunctionalResult(1.0, -1e-3, 4)


class TestIntegrate1D:
    def test_sin_squared(self):
        res = integrate_1d(lambda t: np.sin(t) ** 2, 0.0, TWO_PI, QuadratureRule("periodic_trapezoid", 64, 1e-12))
        assert res.value == pytest.approx(math.pi, abs=1e-12)

    def test_constant_exact(self):
        res = integrate_1d(lambda t: np.ones_like(t), 0.0, TWO_PI, QuadratureRule("periodic_trapezoid", 512, 1e-12))
        assert res.value == pytest.approx(TWO_PI, abs=1e-14)
        assert res.error_estimate <= 1e-14

    def test_theta_sin_theta_half(self):
        # integration by parts gives pi/2 exactly
        res = integrate_1d(lambda t: t * np.sin(t) / 2.0, 0.0, math.pi, QuadratureRule("gauss_legendre", 16, 1e-12))
        assert res.value == pytest.approx(math.pi / 2, abs=1e-10)

    def test_bounds_validated(self):
        with pytest.raises(ValueError):
            integrate_1d(np.sin, 1.0, 1.0, QuadratureRule())

    def test_non_finite_integrand_raises(self):
        with pytest.raises(NonFiniteIntegrandError):
            integrate_1d(
                lambda t: np.where(t > 1.0, np.nan, 1.0), 0.0, 2.0, QuadratureRule("periodic_trapezoid", 4, 1e-6)
            )

    def test_tolerance_not_reached_flag(self):
        res = integrate_1d(
            lambda t: np.sqrt(np.abs(np.sin(t))), 0.0, TWO_PI, QuadratureRule("periodic_trapezoid", 512, 1e-15)
        )
        assert res.warning == TOLERANCE_NOT_REACHED
        assert res.nodes_used == NODE_CAP
        # the flagged value is still the best available one
        assert res.error_estimate < 1e-6

    def test_linearity(self):
        rule = QuadratureRule("periodic_trapezoid", 128, 1e-12)
        f = lambda t: np.exp(np.sin(t))
        g = lambda t: np.cos(t) ** 2
        lhs = integrate_1d(lambda t: 2.0 * f(t) - 3.0 * g(t), 0.0, TWO_PI, rule)
        rhs = 2.0 * integrate_1d(f, 0.0, TWO_PI, rule).value - 3.0 * integrate_1d(g, 0.0, TWO_PI, rule).value
        assert lhs.value == pytest.approx(rhs, abs=1e-11)

    def test_geometric_convergence_on_smooth_periodic(self):
        exact = TWO_PI * i0(1.0)
        errs = []
        for n in (4, 8, 16):
            ts = TWO_PI * np.arange(n) / n
            errs.append(abs(TWO_PI * np.mean(np.exp(np.sin(ts))) - exact))
        assert errs[1] < errs[0] / 4.0
        assert errs[2] < errs[1] / 4.0 or errs[2] < 1e-13

    def test_scalar_integrand_fallback(self):
        res = integrate_1d(lambda t: math.sin(t) ** 2, 0.0, TWO_PI, QuadratureRule("periodic_trapezoid", 64, 1e-10))
        assert res.value == pytest.approx(math.pi, abs=1e-12)

    def test_monte_carlo_stream_matches_seed(self):
        rule = QuadratureRule("monte_carlo", 5000, 1e-9, seed=3)
        a = integrate_1d(lambda t: np.sin(t) ** 2, 0.0, TWO_PI, rule)
        b = integrate_1d(lambda t: np.sin(t) ** 2, 0.0, TWO_PI, rule)
        assert a == b
        assert abs(a.value - math.pi) <= 4.0 * a.error_estimate


class TestSphereIntegrate:
    def test_area(self):
        res = sphere_integrate(lambda th, ph: np.ones_like(th), default_sphere_rule(tol=1e-10))
        assert res.value == pytest.approx(4.0 * math.pi, abs=1e-10)

    def test_z_squared(self):
        res = sphere_integrate(lambda th, ph: np.cos(th) ** 2, default_sphere_rule(tol=1e-10))
        assert res.value == pytest.approx(4.0 * math.pi / 3.0, abs=1e-10)

    def test_arccos_z(self):
        res = sphere_integrate(lambda th, ph: th, default_sphere_rule(tol=1e-8))
        assert res.value == pytest.approx(2.0 * math.pi**2, abs=1e-8)

    def test_monte_carlo_constant_is_exact(self):
        for seed in (0, 1, 99):
            res = sphere_integrate(
                lambda th, ph: np.ones_like(th), QuadratureRule("monte_carlo", 1000, 1e-9, seed=seed)
            )
            assert res.value == 4.0 * math.pi
            assert res.error_estimate == 0.0

    def test_rotation_invariance(self):
        R = random_rotation_matrix(17)
        w = np.array([0.6, -0.64, 0.48])

        def g(th, ph):
            return np.exp(angles_to_xyz(th, ph) @ w)

        def g_rot(th, ph):
            return np.exp((angles_to_xyz(th, ph) @ R.T) @ w)

        rule = default_sphere_rule(n=64, tol=1e-9)
        r0 = sphere_integrate(g, rule)
        r1 = sphere_integrate(g_rot, rule)
        allowed = 3.0 * (r0.error_estimate + r1.error_estimate) + 1e-12
        assert abs(r0.value - r1.value) <= allowed

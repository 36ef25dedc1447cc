import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arcdist.sphere import (
    SpherePoint,
    UnitVector,
    cartesian_to_spherical,
    fibonacci_sphere_points,
    geodesic_distance,
    random_rotation_matrix,
    spherical_to_cartesian,
    uniform_sphere_sample,
    uniform_unit_vectors,
)

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6)


class TestSpherePoint:
    def test_rejects_colatitude_outside_range(self):
        with pytest.raises(ValueError):
            SpherePoint(-0.1, 0.0)
        with pytest.raises(ValueError):
            SpherePoint(math.pi + 0.1, 0.0)

    @given(st.floats(min_value=0.0, max_value=math.pi), finite)
    def test_longitude_normalized(self, theta, phi):
        p = SpherePoint(theta, phi)
        assert 0.0 <= p.phi < 2.0 * math.pi

    def test_negative_epsilon_longitude(self):
        # fp mod of a tiny negative rounds up to the period; must wrap to 0
        assert SpherePoint(1.0, -1e-18).phi == 0.0


class TestUnitVector:
    @given(finite, finite, finite)
    def test_construction_normalizes(self, x, y, z):
        if math.sqrt(x * x + y * y + z * z) < 1e-6:
            return
        u = UnitVector(x, y, z)
        assert abs(u.x**2 + u.y**2 + u.z**2 - 1.0) <= 1e-12

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            UnitVector(0.0, 0.0, 0.0)


class TestConversions:
    def test_pole_is_phi_degenerate(self):
        for phi in (0.0, 1.0, 5.0):
            u = spherical_to_cartesian(SpherePoint(0.0, phi))
            assert u.as_array() == pytest.approx([0.0, 0.0, 1.0], abs=1e-15)

    def test_axis_cases(self):
        assert spherical_to_cartesian(SpherePoint(math.pi / 2, 0.0)).as_array() == pytest.approx(
            [1.0, 0.0, 0.0], abs=1e-15
        )
        assert spherical_to_cartesian(SpherePoint(math.pi / 2, math.pi / 2)).as_array() == pytest.approx(
            [0.0, 1.0, 0.0], abs=1e-15
        )

    @given(st.floats(min_value=1e-6, max_value=math.pi - 1e-6), st.floats(min_value=0.0, max_value=6.28))
    def test_round_trip_away_from_poles(self, theta, phi):
        p = SpherePoint(theta, phi)
        q = cartesian_to_spherical(spherical_to_cartesian(p))
        assert q.theta == pytest.approx(p.theta, abs=1e-9)
        assert math.cos(q.phi - p.phi) == pytest.approx(1.0, abs=1e-9)


class TestGeodesicDistance:
    def test_coincident_and_antipodal(self):
        u = UnitVector(0.3, -0.4, math.sqrt(1 - 0.25))
        assert geodesic_distance(u, u) == 0.0
        v = UnitVector(-u.x, -u.y, -u.z)
        assert geodesic_distance(u, v) == pytest.approx(math.pi, abs=1e-12)

    def test_quarter_circle(self):
        pole = UnitVector(0.0, 0.0, 1.0)
        for phi in np.linspace(0, 2 * math.pi, 7):
            eq = UnitVector(math.cos(phi), math.sin(phi), 0.0)
            assert geodesic_distance(pole, eq) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            geodesic_distance(np.array([1.0, 0.0, 0.0]), np.array([0.5, 0.0, 0.0]))

    def test_symmetry_exact_and_triangle_inequality(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            u, v, w = (x / np.linalg.norm(x) for x in rng.normal(size=(3, 3)))
            assert geodesic_distance(u, v) == geodesic_distance(v, u)
            assert geodesic_distance(u, w) <= geodesic_distance(u, v) + geodesic_distance(v, w) + 1e-9

    def test_rotation_invariance(self):
        rng = np.random.default_rng(9)
        for k in range(10):
            R = random_rotation_matrix(k)
            u, v = (x / np.linalg.norm(x) for x in rng.normal(size=(2, 3)))
            assert geodesic_distance(R @ u, R @ v) == pytest.approx(geodesic_distance(u, v), abs=1e-12)


def test_arccos_arcsin_identity_on_grid():
    xs = np.linspace(-1.0, 1.0, 20001)
    assert np.max(np.abs(np.arccos(xs) - (math.pi / 2 - np.arcsin(xs)))) <= 1e-12


class TestUniformSample:
    def test_determinism(self):
        a = uniform_sphere_sample(7, 100)
        b = uniform_sphere_sample(7, 100)
        assert a == b

    def test_zero_points_rejected(self):
        with pytest.raises(ValueError):
            uniform_sphere_sample(1, 0)

    def test_area_uniform_moments(self):
        n = 100_000
        pts = uniform_unit_vectors(123, n)
        assert abs(pts[:, 2].mean()) <= 3.0 / math.sqrt(n)
        assert abs(np.mean(pts[:, 2] > 0) - 0.5) <= 3.0 / (2.0 * math.sqrt(n))

    def test_matches_angle_stream(self):
        pts = uniform_unit_vectors(11, 50)
        sp = uniform_sphere_sample(11, 50)
        for row, p in zip(pts, sp):
            assert row == pytest.approx(spherical_to_cartesian(p).as_array(), abs=1e-12)


def test_fibonacci_design_is_unit_norm_and_deterministic():
    pts = fibonacci_sphere_points(122)
    assert pts.shape == (122, 3)
    assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) <= 1e-12
    assert np.array_equal(pts, fibonacci_sphere_points(122))


def test_random_rotation_is_orthogonal():
    for seed in range(5):
        R = random_rotation_matrix(seed)
        assert R @ R.T == pytest.approx(np.eye(3), abs=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)

"""Points on the unit sphere: coordinates, geodesic distance, uniform sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Norm deviation above which an input is rejected as not a unit vector.
_UNIT_NORM_ATOL = 1e-6


@dataclass(frozen=True)
class SpherePoint:
    """Colatitude/longitude pair: theta in [0, pi], phi normalized to [0, 2pi)."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        theta = float(self.theta)
        phi = float(self.phi)
        if not math.isfinite(theta) or not math.isfinite(phi):
            raise ValueError("SpherePoint coordinates must be finite")
        if not 0.0 <= theta <= math.pi:
            raise ValueError(f"colatitude must lie in [0, pi], got {theta}")
        phi = phi % TWO_PI
        if phi >= TWO_PI:  # fp mod can round up to the period
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class UnitVector:
    """Cartesian point on the unit sphere; normalized at construction."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        x, y, z = float(self.x), float(self.y), float(self.z)
        norm = math.sqrt(x * x + y * y + z * z)
        if not math.isfinite(norm) or norm == 0.0:
            raise ValueError("cannot normalize a zero or non-finite vector")
        object.__setattr__(self, "x", x / norm)
        object.__setattr__(self, "y", y / norm)
        object.__setattr__(self, "z", z / norm)

    @classmethod
    def from_array(cls, v: np.ndarray) -> "UnitVector":
        v = np.asarray(v, dtype=float)
        return cls(v[0], v[1], v[2])

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def spherical_to_cartesian(p: SpherePoint) -> UnitVector:
    """Convert colatitude/longitude to a Cartesian unit vector."""
    st = math.sin(p.theta)
    return UnitVector(st * math.cos(p.phi), st * math.sin(p.phi), math.cos(p.theta))


def cartesian_to_spherical(u: UnitVector) -> SpherePoint:
    """Inverse of spherical_to_cartesian; phi is degenerate at the poles."""
    theta = math.acos(min(1.0, max(-1.0, u.z)))
    phi = math.atan2(u.y, u.x)
    return SpherePoint(theta, phi)


def angles_to_xyz(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Vectorized (theta, phi) -> (..., 3) Cartesian points."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def xyz_to_angles(xyz: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized inverse of angles_to_xyz; phi in [0, 2pi)."""
    xyz = np.asarray(xyz, dtype=float)
    theta = np.arccos(np.clip(xyz[..., 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(xyz[..., 1], xyz[..., 0]), TWO_PI)
    return theta, phi


def _as_xyz(v) -> np.ndarray:
    if isinstance(v, UnitVector):
        return v.as_array()
    if isinstance(v, SpherePoint):
        return angles_to_xyz(v.theta, v.phi)
    return np.asarray(v, dtype=float)


def geodesic_distance(u, v) -> float:
    """Great-circle distance in radians, in [0, pi].

    Accepts UnitVector or any length-3 array-like; inputs must be unit
    vectors (norm within 1e-6). The dot product is clamped to [-1, 1]
    before arccos so coincident/antipodal round-off cannot produce NaN.
    """
    a = _as_xyz(u)
    b = _as_xyz(v)
    for w in (a, b):
        if abs(np.dot(w, w) - 1.0) > 2.0 * _UNIT_NORM_ATOL:
            raise ValueError(f"geodesic_distance requires unit vectors, got norm {np.linalg.norm(w)!r}")
    return float(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0)))


def geodesic_distance_many(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Distances from each row of `points` (n, 3) to the unit vector `q`."""
    return np.arccos(np.clip(np.asarray(points) @ np.asarray(q, dtype=float), -1.0, 1.0))


def sample_sphere_angles(seed: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Area-uniform (theta, phi) arrays: cos(theta) uniform on [-1, 1], phi on [0, 2pi)."""
    if n < 1:
        raise ValueError("sample count must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, TWO_PI, n)
    return np.arccos(z), phi


def uniform_sphere_sample(seed: int, n: int) -> list[SpherePoint]:
    """Deterministic area-uniform sample of n points for a fixed seed."""
    theta, phi = sample_sphere_angles(seed, n)
    return [SpherePoint(t, p) for t, p in zip(theta, phi)]


def uniform_unit_vectors(seed: int, n: int) -> np.ndarray:
    """Same sample stream as uniform_sphere_sample, as an (n, 3) array."""
    theta, phi = sample_sphere_angles(seed, n)
    return angles_to_xyz(theta, phi)


def fibonacci_sphere_points(n: int) -> np.ndarray:
    """Deterministic near-uniform (n, 3) design via the golden-angle lattice."""
    if n < 1:
        raise ValueError("design size must be >= 1")
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def random_rotation_matrix(seed: int) -> np.ndarray:
    """Seeded Haar-ish random rotation via a normalized random quaternion."""
    rng = np.random.default_rng(seed)
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )

"""Closed curve families on the unit sphere.

Families: a great circle (optionally multiply traversed), the tennis ball
seam curve, a wavy latitude circle, and a general trigonometric-series
family that contains the seam shape as a special case. Positions are
always unit vectors by construction through colatitude/longitude shape
functions (the great circle is evaluated directly in Cartesian form).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
from scipy.spatial import cKDTree

from .quadrature import FunctionalResult, QuadratureRule, default_curve_rule, integrate_1d
from .sphere import UnitVector, angles_to_xyz, xyz_to_angles

GREAT_CIRCLE = "great_circle"
TENNIS_BALL = "tennis_ball"
WAVY_CIRCLE = "wavy_circle"
TRIG_SERIES = "trig_series"
FAMILIES = (GREAT_CIRCLE, TENNIS_BALL, WAVY_CIRCLE, TRIG_SERIES)

#: Seam amplitude reproduced by arc-length calibration (reference 0.7037).
TENNIS_BALL_A = 0.7037
#: Published wavy-circle amplitude. NOTE: arc-length calibration to 4pi
#: yields ~0.28624 instead; see CalibrationReport and the README.
WAVY_CIRCLE_B = 0.1856

_FOUR_PI = 4.0 * math.pi
_TWO_PI = 2.0 * math.pi


class CurveSpecError(ValueError):
    """A curve specification failed validation."""


@dataclass(frozen=True)
class CurveDomain:
    """Parameter interval [t_i, t_f] of a curve."""

    t_i: float
    t_f: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t_i) and math.isfinite(self.t_f)):
            raise CurveSpecError("domain bounds must be finite")
        if not self.t_f > self.t_i:
            raise CurveSpecError("domain must satisfy t_f > t_i")

    @property
    def period(self) -> float:
        return self.t_f - self.t_i


@dataclass(frozen=True, eq=False)
class SphericalCurve:
    """A parameterized curve family instance on the unit sphere.

    Parameters outside the domain are wrapped periodically. An optional
    rotation (3x3 orthogonal matrix) is applied to all positions, which
    lets every functional be tested for rotation equivariance without
    re-deriving the shape functions.
    """

    family: str
    params: dict[str, Any] = field(default_factory=dict)
    domain: CurveDomain = field(default_factory=lambda: CurveDomain(0.0, 1.0))
    rotation: np.ndarray | None = None

    def _wrap(self, ts: np.ndarray) -> np.ndarray:
        t_i, t_f = self.domain.t_i, self.domain.t_f
        inside = (ts >= t_i) & (ts <= t_f)
        return np.where(inside, ts, t_i + np.mod(ts - t_i, t_f - t_i))

    def _positions_raw(self, ts: np.ndarray) -> np.ndarray:
        """Evaluate the family formulas without wrapping (smooth in t)."""
        p = self.params
        if self.family == GREAT_CIRCLE:
            ang = _TWO_PI * ts
            xyz = np.stack([np.sin(ang), np.zeros_like(ts), np.cos(ang)], axis=-1)
        elif self.family == TENNIS_BALL:
            a = p["a"]
            theta = 0.5 * math.pi - (0.5 * math.pi - a) * np.cos(ts)
            phi = 0.5 * ts + a * np.sin(2.0 * ts)
            xyz = angles_to_xyz(theta, phi)
        elif self.family == WAVY_CIRCLE:
            theta = 0.75 * math.pi + p["b"] * np.sin(10.0 * ts)
            xyz = angles_to_xyz(theta, ts)
        elif self.family == TRIG_SERIES:
            amp = p["amplitude"]
            theta = np.full_like(ts, p["theta0"])
            phi = p["phi0"] + p["phi_slope"] * ts
            for coeffs, trig, target in (
                (p["theta_cos"], np.cos, "theta"),
                (p["theta_sin"], np.sin, "theta"),
                (p["phi_sin"], np.sin, "phi"),
            ):
                if len(coeffs) == 0:
                    continue
                js = np.arange(1, len(coeffs) + 1, dtype=float)
                term = amp * (trig(np.multiply.outer(ts, js)) @ np.asarray(coeffs, dtype=float))
                if target == "theta":
                    theta = theta + term
                else:
                    phi = phi + term
            xyz = angles_to_xyz(theta, phi)
        else:  # pragma: no cover - factories validate the tag
            raise CurveSpecError(f"unknown curve family {self.family!r}")
        if self.rotation is not None:
            xyz = xyz @ np.asarray(self.rotation, dtype=float).T
        return xyz

    def positions(self, ts) -> np.ndarray:
        """(n, 3) unit-norm positions at the given parameters (wrapped)."""
        ts = np.asarray(ts, dtype=float)
        return self._positions_raw(self._wrap(ts))

    def position(self, t: float) -> UnitVector:
        return UnitVector.from_array(self.positions(np.array([t]))[0])

    def velocities(self, ts) -> np.ndarray:
        """Central-difference dr/dt with step h = period * 1e-6."""
        ts = self._wrap(np.asarray(ts, dtype=float))
        h = self.domain.period * 1e-6
        return (self._positions_raw(ts + h) - self._positions_raw(ts - h)) / (2.0 * h)

    def velocity(self, t: float) -> np.ndarray:
        return self.velocities(np.array([t]))[0]

    def speeds(self, ts) -> np.ndarray:
        return np.linalg.norm(self.velocities(ts), axis=-1)

    def angles(self, ts) -> tuple[np.ndarray, np.ndarray]:
        """Colatitude/longitude of the curve points (derived from positions)."""
        return xyz_to_angles(self.positions(ts))

    def rotated(self, rotation: np.ndarray) -> "SphericalCurve":
        return replace(self, rotation=np.asarray(rotation, dtype=float))


def great_circle(domain: tuple[float, float] = (0.0, 2.0)) -> SphericalCurve:
    """Unit-speed-in-angle great circle r(t) = (sin 2pi t, 0, cos 2pi t).

    The default domain [0, 2] traverses the circle twice (arc-length 4pi,
    but not simple); [0, 1] is a single traversal.
    """
    return SphericalCurve(GREAT_CIRCLE, {}, CurveDomain(*domain))


def tennis_ball_seam(a: float = TENNIS_BALL_A, domain: tuple[float, float] = (0.0, _FOUR_PI)) -> SphericalCurve:
    """Tennis ball seam: theta = pi/2 - (pi/2 - a) cos t, phi = t/2 + a sin 2t.

    The longitude term t/2 needs 4pi of parameter for one full turn while
    the colatitude completes two oscillations, so [0, 4pi] is the unique
    domain closing the curve in a single traversal.
    """
    if not 0.0 < a < 0.5 * math.pi:
        raise CurveSpecError(f"seam amplitude must lie in (0, pi/2), got {a}")
    return SphericalCurve(TENNIS_BALL, {"a": float(a)}, CurveDomain(*domain))


def wavy_circle(b: float = WAVY_CIRCLE_B, domain: tuple[float, float] = (0.0, _TWO_PI)) -> SphericalCurve:
    """Wavy latitude circle: theta = 3pi/4 + b sin 10t, phi = t."""
    if not 0.0 < b < 0.25 * math.pi:
        raise CurveSpecError(f"wavy amplitude must lie in (0, pi/4), got {b}")
    return SphericalCurve(WAVY_CIRCLE, {"b": float(b)}, CurveDomain(*domain))


def trig_series(
    theta_cos=(), theta_sin=(), phi_sin=(),
    theta0: float = 0.5 * math.pi,
    phi0: float = 0.0,
    phi_slope: float = 0.5,
    amplitude: float = 1.0,
    domain: tuple[float, float] = (0.0, _FOUR_PI),
) -> SphericalCurve:
    """General search family.

    theta(t) = theta0 + amplitude * sum_j (a_j cos jt + b_j sin jt)
    phi(t)   = phi0 + phi_slope * t + amplitude * sum_j c_j sin jt

    With the defaults the base curve is the equator traversed once over
    [0, 4pi]. The seam shape is the point a_1 = -(pi/2 - A), c_2 = A.
    """
    params = {
        "theta_cos": [float(v) for v in theta_cos],
        "theta_sin": [float(v) for v in theta_sin],
        "phi_sin": [float(v) for v in phi_sin],
        "theta0": float(theta0),
        "phi0": float(phi0),
        "phi_slope": float(phi_slope),
        "amplitude": float(amplitude),
    }
    return SphericalCurve(TRIG_SERIES, params, CurveDomain(*domain))


_DEFAULT_DOMAINS = {
    GREAT_CIRCLE: (0.0, 2.0),
    TENNIS_BALL: (0.0, _FOUR_PI),
    WAVY_CIRCLE: (0.0, _TWO_PI),
    TRIG_SERIES: (0.0, _FOUR_PI),
}

_FACTORIES = {
    GREAT_CIRCLE: great_circle,
    TENNIS_BALL: tennis_ball_seam,
    WAVY_CIRCLE: wavy_circle,
    TRIG_SERIES: trig_series,
}

_ALLOWED_PARAMS = {
    GREAT_CIRCLE: set(),
    TENNIS_BALL: {"a"},
    WAVY_CIRCLE: {"b"},
    TRIG_SERIES: {"theta_cos", "theta_sin", "phi_sin", "theta0", "phi0", "phi_slope", "amplitude"},
}


def from_spec(spec: dict | str | Path) -> SphericalCurve:
    """Build a curve from a JSON object {"family", "params", "domain"}.

    Accepts a dict, a JSON string, or a path to a JSON file. Unknown keys
    and malformed values raise CurveSpecError.
    """
    if isinstance(spec, Path) or (isinstance(spec, str) and not spec.lstrip().startswith("{")):
        try:
            spec = json.loads(Path(spec).read_text())
        except OSError as exc:
            raise CurveSpecError(f"cannot read curve spec file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CurveSpecError(f"curve spec file is not valid JSON: {exc}") from exc
    elif isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise CurveSpecError(f"curve spec is not valid JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise CurveSpecError("curve spec must be a JSON object")

    unknown = set(spec) - {"family", "params", "domain"}
    if unknown:
        raise CurveSpecError(f"unknown curve spec keys: {sorted(unknown)}")
    family = spec.get("family")
    if family not in FAMILIES:
        raise CurveSpecError(f"family must be one of {FAMILIES}, got {family!r}")

    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise CurveSpecError("params must be an object")
    unknown = set(params) - _ALLOWED_PARAMS[family]
    if unknown:
        raise CurveSpecError(f"unknown params for {family}: {sorted(unknown)}")

    domain = spec.get("domain", _DEFAULT_DOMAINS[family])
    if not (isinstance(domain, (list, tuple)) and len(domain) == 2):
        raise CurveSpecError("domain must be a two-element array [t_i, t_f]")
    try:
        return _FACTORIES[family](**params, domain=(float(domain[0]), float(domain[1])))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, CurveSpecError):
            raise
        raise CurveSpecError(f"invalid curve parameters: {exc}") from exc


def to_spec(curve: SphericalCurve) -> dict:
    """JSON-serializable spec for a curve (rotation is a runtime-only field)."""
    return {
        "family": curve.family,
        "params": dict(curve.params),
        "domain": [curve.domain.t_i, curve.domain.t_f],
    }


def arc_length(curve: SphericalCurve, rule: QuadratureRule | None = None) -> FunctionalResult:
    """Arc length: integral of |dr/dt| over the domain, with error estimate."""
    rule = rule or default_curve_rule()
    return integrate_1d(curve.speeds, curve.domain.t_i, curve.domain.t_f, rule)


def is_closed(curve: SphericalCurve, eps: float = 1e-8) -> bool:
    """True iff the endpoints coincide within chordal distance eps."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    ends = curve.positions(np.array([curve.domain.t_i, curve.domain.t_f]))
    return bool(np.linalg.norm(ends[0] - ends[1]) < eps)


def _golden_min_to_points(
    curve: SphericalCurve, targets: np.ndarray, centers: np.ndarray, half_width: float, n_iter: int = 18
) -> np.ndarray:
    """Per-row golden-section argmin over t of |r(t) - target| near each center."""
    a = centers - half_width
    b = centers + half_width
    invphi = 0.5 * (math.sqrt(5.0) - 1.0)

    def neg_dot(tq: np.ndarray) -> np.ndarray:
        return -np.einsum("ij,ij->i", targets, curve.positions(tq))

    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = neg_dot(x1), neg_dot(x2)
    for _ in range(n_iter):
        shrink_right = f1 < f2
        b = np.where(shrink_right, x2, b)
        a = np.where(shrink_right, a, x1)
        x1 = b - invphi * (b - a)
        x2 = a + invphi * (b - a)
        f1, f2 = neg_dot(x1), neg_dot(x2)
    return 0.5 * (a + b)


def is_simple(
    curve: SphericalCurve,
    n_samples: int = 4096,
    eps: float = 1e-4,
    max_refinements: int = 2048,
) -> tuple[bool, tuple[float, float] | None]:
    """Detect self-intersections by dense sampling plus local refinement.

    Flags the curve non-simple iff a parameter pair with circular
    separation greater than 3 * period / n_samples comes within chordal
    distance eps. A sampled pair already within eps is decisive (the
    sampled chord bounds the true minimum from above); the remaining
    candidate pairs from a KD-tree neighbor search are refined by local
    minimization of the chordal distance (alternating golden section)
    before deciding. Returns (simple, witness parameter pair or None).
    """
    if n_samples < 64:
        raise ValueError("n_samples must be >= 64")
    if not eps > 0:
        raise ValueError("eps must be positive")
    dom = curve.domain
    period = dom.period
    ts = dom.t_i + period * np.arange(n_samples) / n_samples
    pts = curve.positions(ts)

    # Degenerate point-like curve: every pair coincides.
    extent = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    if extent < eps:
        return False, (dom.t_i, dom.t_i + 0.5 * period)

    sep_min = 3.0 * period / n_samples
    adj = np.linalg.norm(np.diff(pts, axis=0, append=pts[:1]), axis=1)
    capture = max(2.0 * float(adj.max()), 2.0 * eps)

    pairs = cKDTree(pts).query_pairs(r=capture, output_type="ndarray")
    if pairs.size == 0:
        return True, None
    dt = np.abs(ts[pairs[:, 0]] - ts[pairs[:, 1]])
    circ_sep = np.minimum(dt, period - dt)
    pairs = pairs[circ_sep > sep_min]
    if pairs.size == 0:
        return True, None

    chord = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
    order = np.argsort(chord, kind="stable")
    if chord[order[0]] < eps:
        i, j = pairs[order[0]]
        return False, (float(ts[i]), float(ts[j]))

    # One representative per close-approach region: greedy suppression of
    # pairs whose sample indices sit next to an already-kept pair.
    kept: list[tuple[int, int]] = []
    radius = 4
    for idx in order[:max_refinements]:
        i, j = int(pairs[idx, 0]), int(pairs[idx, 1])
        near = any(
            (min(abs(i - a), n_samples - abs(i - a)) <= radius and min(abs(j - b), n_samples - abs(j - b)) <= radius)
            or (min(abs(i - b), n_samples - abs(i - b)) <= radius and min(abs(j - a), n_samples - abs(j - a)) <= radius)
            for a, b in kept
        )
        if not near:
            kept.append((i, j))
            if len(kept) >= 64:
                break
    keep = np.array(kept, dtype=np.int64)
    t1 = ts[keep[:, 0]]
    t2 = ts[keep[:, 1]]
    half_width = 1.5 * period / n_samples
    for _ in range(3):
        t1 = _golden_min_to_points(curve, curve.positions(t2), t1, half_width)
        t2 = _golden_min_to_points(curve, curve.positions(t1), t2, half_width)
    t1 = curve._wrap(t1)
    t2 = curve._wrap(t2)
    dist = np.linalg.norm(curve.positions(t1) - curve.positions(t2), axis=1)
    dt = np.abs(t1 - t2)
    admissible = np.minimum(dt, period - dt) > sep_min
    hits = np.nonzero(admissible & (dist < eps))[0]
    if hits.size:
        best = hits[int(np.argmin(dist[hits]))]
        return False, (float(t1[best]), float(t2[best]))
    return True, None

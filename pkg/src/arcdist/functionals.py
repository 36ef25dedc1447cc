"""Mean arc-distance functionals between sphere points and closed curves.

Conventions: distances are geodesic (radians, in [0, pi]); the mean
distance from a point to a curve is the parameter mean (dt / period), not
an arc-length-weighted mean, matching the defining integral. The sphere-
to-curve mean is the unnormalized surface integral of that field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import SphericalCurve, arc_length, is_closed
from .quadrature import (
    FunctionalResult,
    QuadratureRule,
    default_curve_rule,
    default_sphere_rule,
    integrate_1d,
    sphere_integrate,
    _leggauss,
)
from .sphere import (
    SpherePoint,
    UnitVector,
    angles_to_xyz,
    fibonacci_sphere_points,
    uniform_unit_vectors,
)

FOUR_PI = 4.0 * math.pi
HALF_PI = 0.5 * math.pi

# Cap on scratch matrix entries when crossing sphere points with curve nodes.
_CHUNK_ENTRIES = 1 << 21


@dataclass(frozen=True)
class ELResidual:
    """Stationarity residuals of the point-to-curve distance integrand.

    res_theta is the colatitude-derivative imbalance (left minus right),
    res_phi the longitude derivative; both vanish on the discrete grid
    theta = m*pi, phi = phi0 - (pi/2 + k*pi).
    """

    res_theta: float
    res_phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.res_theta) and math.isfinite(self.res_phi)):
            raise ValueError("residuals must be finite")


def _as_unit_xyz(q) -> np.ndarray:
    if isinstance(q, UnitVector):
        return q.as_array()
    if isinstance(q, SpherePoint):
        return angles_to_xyz(q.theta, q.phi)
    q = np.asarray(q, dtype=float)
    if abs(float(q @ q) - 1.0) > 2e-6:
        raise ValueError("expected a unit vector")
    return q


def mean_point_to_sphere(q, rule: QuadratureRule | None = None) -> FunctionalResult:
    """Mean geodesic distance from a fixed unit vector to the whole sphere.

    (1/4pi) * integral over S of arccos(q . x) dS; equals pi/2 for every q
    (reduce to the 1D form: integral of gamma sin(gamma)/2 over [0, pi]).
    """
    qv = _as_unit_xyz(q)
    rule = rule or default_sphere_rule()

    def g(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        return np.arccos(np.clip(angles_to_xyz(theta, phi) @ qv, -1.0, 1.0))

    res = sphere_integrate(g, rule)
    return FunctionalResult(res.value / FOUR_PI, res.error_estimate / FOUR_PI, res.nodes_used, res.warning)


def arcsin_identity_residual(q, rule: QuadratureRule | None = None) -> FunctionalResult:
    """Surface integral of arcsin(q . x) over the sphere; identically zero.

    With q = (A, B, E) and D = A cos(phi) + B sin(phi), the integrand in
    coordinates is sin(theta) * arcsin(D sin(theta) + E cos(theta)), and the
    double integral vanishes because arcsin(q . x) is odd under the antipodal
    map x -> -x. Note the vanishing holds only in aggregate: expanding
    arcsin in powers of D and E, the phi-integral of D^k is strictly
    positive for even k, so the individual terms do not vanish.
    """
    qv = _as_unit_xyz(q)
    rule = rule or default_sphere_rule()

    def g(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        return np.arcsin(np.clip(angles_to_xyz(theta, phi) @ qv, -1.0, 1.0))

    return sphere_integrate(g, rule)


def curve_to_sphere_mean_M(curve: SphericalCurve, rule: QuadratureRule | None = None) -> FunctionalResult:
    """Line integral over the curve of the constant point-to-sphere mean.

    Equals (pi/2) * arc_length, so it is 2 pi^2 for every curve of
    arc-length 4 pi. Requires a closed curve.
    """
    if not is_closed(curve):
        raise ValueError("curve_to_sphere_mean_M requires a closed curve")
    length = arc_length(curve, rule)
    return FunctionalResult(
        HALF_PI * length.value, HALF_PI * length.error_estimate, length.nodes_used, length.warning
    )


def point_to_curve_mean(
    curve: SphericalCurve,
    p,
    rule: QuadratureRule | None = None,
    arc_length_weighted: bool = False,
) -> FunctionalResult:
    """Mean geodesic distance from a sphere point to the curve.

    Default is the parameter mean (1/period) * integral of dist(p, r(t)) dt.
    With arc_length_weighted=True the integrand is weighted by |r'(t)| and
    normalized by arc length instead (reparameterization-invariant variant;
    off by default because the defining functional is the dt-mean).
    """
    qv = _as_unit_xyz(p)
    rule = rule or default_curve_rule()
    dom = curve.domain

    def dist(ts: np.ndarray) -> np.ndarray:
        return np.arccos(np.clip(curve.positions(ts) @ qv, -1.0, 1.0))

    if not arc_length_weighted:
        res = integrate_1d(dist, dom.t_i, dom.t_f, rule)
        period = dom.period
        return FunctionalResult(res.value / period, res.error_estimate / period, res.nodes_used, res.warning)

    def weighted(ts: np.ndarray) -> np.ndarray:
        return dist(ts) * curve.speeds(ts)

    num = integrate_1d(weighted, dom.t_i, dom.t_f, rule)
    den = arc_length(curve, rule)
    value = num.value / den.value
    err = (num.error_estimate + abs(value) * den.error_estimate) / den.value
    warning = num.warning or den.warning
    return FunctionalResult(value, err, num.nodes_used + den.nodes_used, warning)


def _curve_nodes_weights(curve: SphericalCurve, rule: QuadratureRule) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights (summing to the period) for the inner curve integral."""
    dom = curve.domain
    period = dom.period
    if rule.kind == "gauss_legendre":
        u, w = _leggauss(rule.n)
        ts = 0.5 * (dom.t_i + dom.t_f) + 0.5 * period * u
        return ts, 0.5 * period * w
    if rule.kind == "monte_carlo":
        rng = np.random.default_rng(rule.seed)
        ts = dom.t_i + period * rng.random(rule.n)
        return ts, np.full(rule.n, period / rule.n)
    ts = dom.t_i + period * np.arange(rule.n) / rule.n
    return ts, np.full(rule.n, period / rule.n)


def mean_distance_field(curve: SphericalCurve, points: np.ndarray, curve_rule: QuadratureRule | None = None) -> np.ndarray:
    """Vectorized parameter-mean distance from each row of `points` to the curve.

    Evaluates the inner integral at the rule's stated node count without
    refinement; used where many field values are needed at once.
    """
    curve_rule = curve_rule or default_curve_rule()
    ts, w = _curve_nodes_weights(curve, curve_rule)
    C = curve.positions(ts)
    w_mean = w / curve.domain.period
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty(points.shape[0])
    step = max(1, _CHUNK_ENTRIES // C.shape[0])
    for s in range(0, points.shape[0], step):
        sl = slice(s, min(s + step, points.shape[0]))
        out[sl] = np.arccos(np.clip(points[sl] @ C.T, -1.0, 1.0)) @ w_mean
    return out


def sphere_to_curve_mean(
    curve: SphericalCurve,
    sphere_rule: QuadratureRule | None = None,
    curve_rule: QuadratureRule | None = None,
) -> FunctionalResult:
    """Unnormalized surface integral over the sphere of the mean distance field.

    The conventional target value is area 4pi times the great-circle field
    constant pi/2, i.e. 2 pi^2. Divide by 4pi for the normalized mean. The
    error estimate reflects refinement of the outer surface integral at
    fixed inner resolution.
    """
    sphere_rule = sphere_rule or default_sphere_rule(tol=1e-6)
    curve_rule = curve_rule or default_curve_rule()

    def g(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        return mean_distance_field(curve, angles_to_xyz(theta, phi), curve_rule)

    return sphere_integrate(g, sphere_rule)


def sup_deviation_from_half_pi(
    curve: SphericalCurve,
    n_design: int = 122,
    curve_rule: QuadratureRule | None = None,
) -> tuple[float, np.ndarray]:
    """Max |mean-distance - pi/2| over a fixed near-uniform sphere design.

    Deterministic by construction (golden-angle design, fixed node count),
    so it is usable as an optimization objective. Returns (sup, argmax point).
    """
    design = fibonacci_sphere_points(n_design)
    vals = mean_distance_field(curve, design, curve_rule)
    idx = int(np.argmax(np.abs(vals - HALF_PI)))
    return float(abs(vals[idx] - HALF_PI)), design[idx]


def _min_distance_batch(
    curve: SphericalCurve,
    points: np.ndarray,
    n_scan: int,
    param_tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Global minimum distance from each point to the curve.

    Dense scan at n_scan equispaced parameters followed by golden-section
    refinement of the bracket around the best sample. The scan maximizes
    the dot product (equivalent to minimizing arccos, cheaper); ties break
    toward the smallest parameter.
    """
    dom = curve.domain
    period = dom.period
    ts = dom.t_i + period * np.arange(n_scan) / n_scan
    C = curve.positions(ts)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m = points.shape[0]

    best_idx = np.empty(m, dtype=np.int64)
    step = max(1, _CHUNK_ENTRIES // n_scan)
    for s in range(0, m, step):
        sl = slice(s, min(s + step, m))
        best_idx[sl] = np.argmax(points[sl] @ C.T, axis=1)

    dt = period / n_scan
    a = ts[best_idx] - dt
    b = ts[best_idx] + dt

    def neg_dot(tq: np.ndarray) -> np.ndarray:
        return -np.einsum("ij,ij->i", points, curve.positions(tq))

    invphi = 0.5 * (math.sqrt(5.0) - 1.0)
    n_iter = max(1, math.ceil(math.log(param_tol / (2.0 * dt)) / math.log(invphi)))
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

    t_best = curve._wrap(0.5 * (a + b))
    d_best = np.arccos(np.clip(np.einsum("ij,ij->i", points, curve.positions(t_best)), -1.0, 1.0))
    return d_best, t_best


def point_to_curve_min(curve: SphericalCurve, p, n_scan: int = 4096) -> tuple[float, float]:
    """Minimum geodesic distance from a point to the curve and its parameter.

    n_scan must be >= 64 and dense enough to bracket the global basin
    (the default resolves 10-oscillation colatitude profiles with >400
    samples per oscillation).
    """
    if n_scan < 64:
        raise ValueError("n_scan must be >= 64")
    d, t = _min_distance_batch(curve, _as_unit_xyz(p)[None, :], n_scan)
    return float(d[0]), float(t[0])


def mean_min_arc_distance(
    curve: SphericalCurve,
    n_points: int = 100_000,
    seed: int = 0,
    n_scan: int = 4096,
) -> FunctionalResult:
    """Monte Carlo mean of the minimum distance from the sphere to the curve.

    Arithmetic mean over an area-uniform sample of sphere points of the
    distance to the nearest curve point, with the sample standard error as
    the error estimate.
    """
    if n_points < 100:
        raise ValueError("n_points must be >= 100")
    points = uniform_unit_vectors(seed, n_points)
    mins, _ = _min_distance_batch(curve, points, n_scan)
    mean = float(np.mean(mins))
    stderr = float(np.std(mins, ddof=1)) / math.sqrt(n_points)
    return FunctionalResult(mean, stderr, n_points)


def el_residuals(theta: float, phi: float, p: SpherePoint) -> ELResidual:
    """Stationarity residuals of the distance integrand at (theta, phi).

    res_theta = sin(theta0) cos(theta) cos(phi0 - phi) - cos(theta0) sin(theta)
    res_phi   = sin(theta0) sin(theta) sin(phi0 - phi)
    """
    st0, ct0 = math.sin(p.theta), math.cos(p.theta)
    res_theta = st0 * math.cos(theta) * math.cos(p.phi - phi) - ct0 * math.sin(theta)
    res_phi = st0 * math.sin(theta) * math.sin(p.phi - phi)
    return ELResidual(res_theta, res_phi)

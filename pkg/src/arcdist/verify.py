"""End-to-end verification of every headline numeric claim.

Each criterion function returns table rows {claim, paper value, computed
value, tolerance, pass/fail}; informational rows carry passed=None. Two
rows fail by design of the underlying problem, with messages explaining
why (see README "Known deviations"): the wavy-circle amplitude is not
reproduced by the arc-length constraint, and the sphere-to-curve mean is
the same constant for every curve so no strict excess exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.stats import norm

from . import curves, functionals, optimize
from .quadrature import QuadratureRule, default_curve_rule
from .sphere import (
    SpherePoint,
    geodesic_distance,
    random_rotation_matrix,
    sample_sphere_angles,
    uniform_unit_vectors,
)

HALF_PI = 0.5 * math.pi
TWO_PI_SQ = 2.0 * math.pi**2
SEAM_A_REF = 0.7037
WAVY_B_REF = 0.1856
SEAM_BRACKET = (0.1, 1.4)
WAVY_BRACKET = (0.01, 0.6)


@dataclass
class ClaimRow:
    """One verification table row; passed=None marks an informational row."""

    name: str
    value: float
    paper_value: float | None = None
    tolerance: float | None = None
    passed: bool | None = None
    error_estimate: float | None = None
    message: str = ""


@dataclass(frozen=True)
class VerifySettings:
    """Verification knobs: sphere-integral rule kind, sizes, seed, budget."""

    rule: str = "gauss_legendre"
    n: int | None = None
    tol: float | None = None
    seed: int = 42
    max_evals: int = 500

    @property
    def monte_carlo(self) -> bool:
        return self.rule == "monte_carlo"

    def sphere_rule(self, seed_offset: int = 0, tol: float | None = None) -> QuadratureRule:
        if self.monte_carlo:
            return QuadratureRule("monte_carlo", self.n or 20000, 1e-9, seed=self.seed + seed_offset)
        return QuadratureRule("gauss_legendre", self.n or 128, tol or self.tol or 1e-7)


class VerifyContext:
    """Caches the calibrated curves shared by several criteria."""

    def __init__(self, settings: VerifySettings):
        self.settings = settings

    @cached_property
    def seam_calibration(self) -> optimize.CalibrationReport:
        return optimize.calibrate_arc_length(
            lambda a: curves.tennis_ball_seam(a), SEAM_BRACKET, family="tennis_ball", tol=1e-6
        )

    @cached_property
    def seam(self) -> curves.SphericalCurve:
        return curves.tennis_ball_seam(self.seam_calibration.parameter)

    @cached_property
    def wavy_calibration(self) -> optimize.CalibrationReport:
        return optimize.calibrate_arc_length(
            lambda b: curves.wavy_circle(b), WAVY_BRACKET, family="wavy_circle", tol=1e-6
        )

    @cached_property
    def wavy(self) -> curves.SphericalCurve:
        return curves.wavy_circle(self.wavy_calibration.parameter)


def _mc_tolerance(devs: np.ndarray, errs: np.ndarray) -> tuple[bool, float]:
    """Family-wise three-sigma check for k independent MC estimates.

    A literal 3-standard-error bound on each of k draws fails for some
    draw in roughly 0.27 * k percent of seeds, so the per-comparison
    quantile is Bonferroni-adjusted to keep the whole family at the
    three-sigma confidence the tolerance names (for k = 1 this is exactly
    3 standard errors).
    """
    k = devs.size
    z = float(norm.isf(0.00135 / k))
    ok = bool(np.all(devs <= z * errs))
    return ok, z * float(errs.max())


def criterion_1_point_to_sphere(ctx: VerifyContext) -> list[ClaimRow]:
    """Mean distance from 100 random unit vectors to the sphere equals pi/2."""
    s = ctx.settings
    qs = uniform_unit_vectors(s.seed + 100, 100)
    values, errs = [], []
    for i, q in enumerate(qs):
        r = functionals.mean_point_to_sphere(q, s.sphere_rule(seed_offset=i))
        values.append(r.value)
        errs.append(r.error_estimate)
    values, errs = np.array(values), np.array(errs)
    devs = np.abs(values - HALF_PI)
    worst = int(np.argmax(devs))
    if s.monte_carlo:
        ok, tol = _mc_tolerance(devs, errs)
    else:
        tol = 1e-6
        ok = bool(devs.max() <= tol)
    return [
        ClaimRow(
            "1. point-to-sphere mean (worst of 100)",
            float(values[worst]),
            paper_value=HALF_PI,
            tolerance=tol,
            passed=ok,
            error_estimate=float(errs[worst]),
            message=f"max |dev| = {devs.max():.3e}; spread = {values.max() - values.min():.3e}",
        )
    ]


def criterion_2_arcsin_identity(ctx: VerifyContext) -> list[ClaimRow]:
    """The arcsin surface integral vanishes for 20 random unit vectors."""
    s = ctx.settings
    qs = uniform_unit_vectors(s.seed + 200, 20)
    values, errs = [], []
    for i, q in enumerate(qs):
        r = functionals.arcsin_identity_residual(q, s.sphere_rule(seed_offset=1000 + i))
        values.append(r.value)
        errs.append(r.error_estimate)
    values, errs = np.array(values), np.array(errs)
    devs = np.abs(values)
    worst = int(np.argmax(devs))
    if s.monte_carlo:
        ok, tol = _mc_tolerance(devs, errs)
    else:
        tol = 1e-6
        ok = bool(devs.max() <= tol)
    return [
        ClaimRow(
            "2. arcsin identity residual (worst of 20)",
            float(values[worst]),
            paper_value=0.0,
            tolerance=tol,
            passed=ok,
            error_estimate=float(errs[worst]),
        )
    ]


def criterion_3_seam_M(ctx: VerifyContext) -> list[ClaimRow]:
    """Curve-to-sphere mean of the calibrated seam equals 2 pi^2 (rel 1e-3)."""
    res = functionals.curve_to_sphere_mean_M(ctx.seam)
    tol = 1e-3 * TWO_PI_SQ
    return [
        ClaimRow(
            "3. seam curve-to-sphere mean M",
            res.value,
            paper_value=TWO_PI_SQ,
            tolerance=tol,
            passed=abs(res.value - TWO_PI_SQ) <= tol,
            error_estimate=res.error_estimate,
        )
    ]


def criterion_4_great_circle_field(ctx: VerifyContext) -> list[ClaimRow]:
    """Mean distance from 50 random points to a great circle equals pi/2."""
    s = ctx.settings
    gc = curves.great_circle((0.0, 2.0))
    theta, phi = sample_sphere_angles(s.seed + 400, 50)
    rule = default_curve_rule(tol=1e-10)
    values = np.array(
        [functionals.point_to_curve_mean(gc, SpherePoint(t, p), rule).value for t, p in zip(theta, phi)]
    )
    devs = np.abs(values - HALF_PI)
    worst = int(np.argmax(devs))
    return [
        ClaimRow(
            "4. great-circle mean distance (worst of 50)",
            float(values[worst]),
            paper_value=HALF_PI,
            tolerance=1e-8,
            passed=bool(devs.max() <= 1e-8),
        )
    ]


def criterion_5_wavy_pole_value(ctx: VerifyContext) -> list[ClaimRow]:
    """Mean distance from (theta0=0, phi0=1) to the wavy circle is 3 pi/4."""
    curve = curves.wavy_circle(WAVY_B_REF)
    res = functionals.point_to_curve_mean(curve, SpherePoint(0.0, 1.0), default_curve_rule(tol=1e-10))
    target = 0.75 * math.pi
    return [
        ClaimRow(
            "5. wavy-circle mean distance at pole point",
            res.value,
            paper_value=2.3562,
            tolerance=1e-4,
            passed=abs(res.value - target) <= 1e-4,
            error_estimate=res.error_estimate,
        )
    ]


def criterion_6_calibration(ctx: VerifyContext) -> list[ClaimRow]:
    """Arc-length roots vs the published amplitudes (tol 5e-4 on the parameter)."""
    rows = []
    cal = ctx.seam_calibration
    dev = abs(cal.parameter - SEAM_A_REF)
    rows.append(
        ClaimRow(
            "6a. seam amplitude root of L - 4pi",
            cal.parameter,
            paper_value=SEAM_A_REF,
            tolerance=5e-4,
            passed=dev <= 5e-4,
            error_estimate=cal.residual,
            message=f"deviation {dev:.2e}; the 4pi constraint alone reproduces the reference value",
        )
    )
    cal = ctx.wavy_calibration
    dev = abs(cal.parameter - WAVY_B_REF)
    length_at_ref = curves.arc_length(curves.wavy_circle(WAVY_B_REF)).value
    rows.append(
        ClaimRow(
            "6b. wavy amplitude root of L - 4pi",
            cal.parameter,
            paper_value=WAVY_B_REF,
            tolerance=5e-4,
            passed=dev <= 5e-4,
            error_estimate=cal.residual,
            message=(
                f"computed root {cal.parameter:.6f} deviates by {dev:.4f}; the reference amplitude "
                f"does not satisfy the constraint (its arc length is {length_at_ref:.4f}, not 4pi = "
                f"{4 * math.pi:.4f}). Open question: the constraint does not determine the published "
                "value. See README: Known deviations."
            ),
        )
    )
    return rows


def criterion_7_seam_sphere_mean(ctx: VerifyContext) -> list[ClaimRow]:
    """Sphere-to-curve mean of the seam equals 2 pi^2 (rel 5e-2), plus sup-dev."""
    s = ctx.settings
    res = functionals.sphere_to_curve_mean(ctx.seam, s.sphere_rule(seed_offset=7, tol=1e-6))
    tol = 5e-2 * TWO_PI_SQ
    sup, _ = functionals.sup_deviation_from_half_pi(ctx.seam)
    return [
        ClaimRow(
            "7. seam sphere-to-curve mean",
            res.value,
            paper_value=TWO_PI_SQ,
            tolerance=tol,
            passed=abs(res.value - TWO_PI_SQ) <= tol,
            error_estimate=res.error_estimate,
        ),
        ClaimRow(
            "7i. seam sup |mean distance - pi/2| (122-design)",
            sup,
            message="informational: measured spread of the seam's mean-distance field",
        ),
    ]


def criterion_8_wavy_excess(ctx: VerifyContext) -> list[ClaimRow]:
    """Claimed strict excess of the wavy circle's sphere-to-curve mean over 2 pi^2."""
    s = ctx.settings
    res = functionals.sphere_to_curve_mean(ctx.wavy, s.sphere_rule(seed_offset=8, tol=1e-6))
    excess = res.value - TWO_PI_SQ
    return [
        ClaimRow(
            "8. wavy sphere-to-curve mean excess over 2pi^2",
            excess,
            paper_value=None,
            tolerance=3.0 * res.error_estimate,
            passed=excess > 3.0 * res.error_estimate,
            error_estimate=res.error_estimate,
            message=(
                "the surface integral of the mean-distance field equals 2 pi^2 for every curve "
                "(swap the two integrals: the inner one is the constant point-to-sphere mean), "
                "so no strict excess exists. See README: Known deviations."
            ),
        )
    ]


def criterion_9_simplicity(ctx: VerifyContext) -> list[ClaimRow]:
    """Doubled great circle is non-simple; seam and single traversal are simple."""
    rows = []
    simple, witness = curves.is_simple(curves.great_circle((0.0, 2.0)))
    rows.append(
        ClaimRow(
            "9a. doubled great circle flagged non-simple",
            float(not simple),
            paper_value=1.0,
            tolerance=0.0,
            passed=(not simple) and witness is not None,
            message=f"witness pair t = {witness}" if witness else "no witness found",
        )
    )
    simple, _ = curves.is_simple(ctx.seam)
    rows.append(
        ClaimRow(
            "9b. seam flagged simple",
            float(simple),
            paper_value=1.0,
            tolerance=0.0,
            passed=simple,
        )
    )
    simple, _ = curves.is_simple(curves.great_circle((0.0, 1.0)))
    rows.append(
        ClaimRow(
            "9c. single-traversal great circle flagged simple",
            float(simple),
            paper_value=1.0,
            tolerance=0.0,
            passed=simple,
        )
    )
    return rows


def criterion_10_el_grid(ctx: VerifyContext) -> list[ClaimRow]:
    """Distance-integrand residuals vanish on theta = m pi, phi = phi0 - (pi/2 + k pi)."""
    s = ctx.settings
    theta0, phi0 = sample_sphere_angles(s.seed + 1001, 10)
    worst = 0.0
    for t0, p0 in zip(theta0, phi0):
        p = SpherePoint(t0, p0)
        for m in range(-2, 3):
            for k in range(-2, 3):
                res = functionals.el_residuals(m * math.pi, p0 - (HALF_PI + k * math.pi), p)
                worst = max(worst, abs(res.res_theta), abs(res.res_phi))
    return [
        ClaimRow(
            "10. stationarity residuals on the discrete grid",
            worst,
            paper_value=0.0,
            tolerance=1e-14,
            passed=worst <= 1e-14,
        )
    ]


def criterion_11_properties(ctx: VerifyContext) -> list[ClaimRow]:
    """Rotation invariance, min<=mean, MC error scaling, great-circle mean-min."""
    s = ctx.settings
    rows = []

    # Rotation invariance, reported as max violation ratio (dev / allowed).
    rng = np.random.default_rng(s.seed + 1100)
    ratios = []
    R = random_rotation_matrix(s.seed + 1101)
    us = uniform_unit_vectors(s.seed + 1102, 40)
    for i in range(0, 40, 2):
        d0 = geodesic_distance(us[i], us[i + 1])
        d1 = geodesic_distance(R @ us[i], R @ us[i + 1])
        ratios.append(abs(d0 - d1) / 1e-12)
    rule = ctx.settings.sphere_rule(seed_offset=1103)
    for q in us[:3]:
        r0 = functionals.mean_point_to_sphere(q, rule)
        r1 = functionals.mean_point_to_sphere(R @ q, rule)
        allowed = 3.0 * (r0.error_estimate + r1.error_estimate) + 1e-12
        ratios.append(abs(r0.value - r1.value) / allowed)
    seam_rot = ctx.seam.rotated(R)
    crule = default_curve_rule()
    for u in us[3:8]:
        r0 = functionals.point_to_curve_mean(ctx.seam, u, crule)
        r1 = functionals.point_to_curve_mean(seam_rot, R @ u, crule)
        allowed = 3.0 * (r0.error_estimate + r1.error_estimate) + 1e-12
        ratios.append(abs(r0.value - r1.value) / allowed)
        d0, _ = functionals.point_to_curve_min(ctx.seam, u)
        d1, _ = functionals.point_to_curve_min(seam_rot, R @ u)
        ratios.append(abs(d0 - d1) / 1e-9)
    rows.append(
        ClaimRow(
            "11a. rotation invariance (max violation ratio)",
            float(max(ratios)),
            tolerance=1.0,
            passed=max(ratios) <= 1.0,
        )
    )

    # min <= mean on 200 random (curve, point) pairs: 40 curves x 5 points.
    worst_gap = -math.inf
    for i in range(40):
        kind = i % 4
        if kind == 0:
            c = curves.great_circle((0.0, 1.0 + (i % 3)))
        elif kind == 1:
            c = curves.tennis_ball_seam(0.2 + 1.2 * rng.random())
        elif kind == 2:
            c = curves.wavy_circle(0.05 + 0.65 * rng.random())
        else:
            coeffs = 0.25 * rng.standard_normal(9)
            c = curves.trig_series(coeffs[:3], coeffs[3:6], coeffs[6:], phi_slope=0.5)
        pts = uniform_unit_vectors(s.seed + 1200 + i, 5)
        mins, _ = functionals._min_distance_batch(c, pts, 4096)
        for j, u in enumerate(pts):
            mean = functionals.point_to_curve_mean(c, u, crule).value
            worst_gap = max(worst_gap, float(mins[j]) - mean)
    rows.append(
        ClaimRow(
            "11b. max(min - mean) over 200 pairs",
            worst_gap,
            tolerance=1e-9,
            passed=worst_gap <= 1e-9,
        )
    )

    # Monte Carlo sphere-to-curve mean standard error shrinks ~2x for 4x samples.
    se = []
    for n in (2000, 8000):
        r = functionals.sphere_to_curve_mean(
            ctx.seam, QuadratureRule("monte_carlo", n, 1e-9, seed=s.seed + 1300)
        )
        se.append(r.error_estimate)
    ratio = se[0] / se[1]
    rows.append(
        ClaimRow(
            "11c. MC error shrink factor for 4x samples",
            float(ratio),
            paper_value=2.0,
            tolerance=1.8,
            passed=ratio >= 1.8,
            message="pass requires shrink >= 1.8",
        )
    )

    # Great-circle mean minimum distance: closed form pi/2 - 1.
    res = functionals.mean_min_arc_distance(curves.great_circle((0.0, 2.0)), 100_000, seed=s.seed)
    target = HALF_PI - 1.0
    rows.append(
        ClaimRow(
            "11d. great-circle mean minimum distance",
            res.value,
            paper_value=target,
            tolerance=3.0 * res.error_estimate,
            passed=abs(res.value - target) <= 3.0 * res.error_estimate,
            error_estimate=res.error_estimate,
        )
    )
    res = functionals.mean_min_arc_distance(ctx.seam, 20_000, seed=s.seed + 1)
    rows.append(
        ClaimRow(
            "11i. seam mean minimum distance",
            res.value,
            error_estimate=res.error_estimate,
            message="informational: no reference value; recorded for comparison",
        )
    )
    return rows


def criterion_12_optimizer(ctx: VerifyContext) -> list[ClaimRow]:
    """Optimizer sanity: monotone trace, constraint residuals, infeasibility filter."""
    s = ctx.settings
    config = optimize.OptimizerConfig(max_evals=s.max_evals, seed=s.seed)
    report = optimize.minimize_functional(optimize.seam_seeded_family(3), "sup_dev_from_half_pi", config)
    trace = np.array(report.trace)
    max_increase = float(np.max(np.diff(trace))) if trace.size > 1 else 0.0
    rows = [
        ClaimRow(
            "12a. optimizer best-so-far trace non-increasing",
            max_increase,
            tolerance=0.0,
            passed=max_increase <= 0.0,
            message=f"final {report.best_value:.6g} <= initial {report.initial_value:.6g}; "
            f"{report.evaluations} evaluations",
        ),
        ClaimRow(
            "12b. max |arc length - 4pi| over feasible iterates",
            report.max_constraint_residual,
            tolerance=1e-4,
            passed=report.max_constraint_residual <= 1e-4,
        ),
    ]
    evaluator = optimize.make_candidate_evaluator(
        optimize.great_circle_scale_family(), optimize.OptimizerConfig(seed=s.seed)
    )
    value, _, _ = evaluator(np.array([]))
    best_curve = optimize.seam_seeded_family(3).build(np.array(report.best_shape), report.best_scale)
    best_simple, _ = curves.is_simple(best_curve)
    rows.append(
        ClaimRow(
            "12c. doubled great circle rejected as infeasible",
            float(math.isinf(value)),
            paper_value=1.0,
            tolerance=0.0,
            passed=math.isinf(value) and best_simple,
            message="injected doubled-circle candidate scores +inf; best iterate is simple",
        )
    )
    return rows


CRITERIA: list[tuple[str, Callable[[VerifyContext], list[ClaimRow]]]] = [
    ("1", criterion_1_point_to_sphere),
    ("2", criterion_2_arcsin_identity),
    ("3", criterion_3_seam_M),
    ("4", criterion_4_great_circle_field),
    ("5", criterion_5_wavy_pole_value),
    ("6", criterion_6_calibration),
    ("7", criterion_7_seam_sphere_mean),
    ("8", criterion_8_wavy_excess),
    ("9", criterion_9_simplicity),
    ("10", criterion_10_el_grid),
    ("11", criterion_11_properties),
    ("12", criterion_12_optimizer),
]


def run_criterion(cid: str, ctx: VerifyContext) -> list[ClaimRow]:
    for key, func in CRITERIA:
        if key == cid:
            return func(ctx)
    raise KeyError(f"unknown criterion {cid!r}")


def run_verification(settings: VerifySettings | None = None) -> tuple[list[ClaimRow], bool]:
    """Run all criteria; returns (rows, all_checked_rows_passed)."""
    ctx = VerifyContext(settings or VerifySettings())
    rows: list[ClaimRow] = []
    for _, func in CRITERIA:
        rows.extend(func(ctx))
    all_pass = all(r.passed for r in rows if r.passed is not None)
    return rows, all_pass


def format_table(rows: list[ClaimRow]) -> str:
    """Fixed-width text table of the verification rows."""
    header = f"{'claim':<46} {'paper value':>13} {'computed':>13} {'tolerance':>11} {'status':>6}"
    lines = [header, "-" * len(header)]
    for r in rows:
        paper = f"{r.paper_value:.6g}" if r.paper_value is not None else "-"
        tol = f"{r.tolerance:.3g}" if r.tolerance is not None else "-"
        status = "INFO" if r.passed is None else ("PASS" if r.passed else "FAIL")
        lines.append(f"{r.name:<46} {paper:>13} {r.value:>13.6g} {tol:>11} {status:>6}")
        if r.message and (r.passed is False or r.passed is None):
            lines.append(f"    note: {r.message}")
    checked = [r for r in rows if r.passed is not None]
    n_pass = sum(1 for r in checked if r.passed)
    lines.append(f"{n_pass}/{len(checked)} checked rows passed")
    return "\n".join(lines)

"""Report builders that combine the series, convex, wiman, roots and measures modules."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from zerotap.config import (
    ANNULUS_DELTA,
    DEFAULT_GRID,
    EXCLUSION_FACTOR,
    GRID_MARGIN,
    MAX_SLOPE_TOL,
    MIN_DETECTOR_TOL,
    MIN_PIECE_INTERVALS,
    SCHEMA_VERSION,
    TRUNCATION_RADIUS,
)
from zerotap.convex import LogPointSet, PiecewiseConvex, evaluate, legendre, lower_envelope
from zerotap.errors import ConvexityError, InvalidArgumentError, ProfileNotResolvedError
from zerotap.measures import (
    EmpiricalMeasure,
    RadialStats,
    angular_discrepancy,
    annulus_mass,
    empirical,
    radial_stats,
    wasserstein1,
)
from zerotap.roots import RootSet, SolverOptions, aberth_roots, critical_points, log_derivative_ratio, newton_polygon_radii
from zerotap.series import CoeffSeq, potential
from zerotap.wiman import Profile, Segmentation, detect_piecewise_harmonic, phi_profile

logger = logging.getLogger(__name__)


def make_grid(t_min: float, t_max: float, n: int) -> np.ndarray:
    if not t_min < t_max or n < 2:
        raise InvalidArgumentError(f"grid needs t_min < t_max and n >= 2, got {t_min}:{t_max}:{n}")
    return np.linspace(t_min, t_max, n)


def auto_grid(
    f: CoeffSeq,
    points: int = DEFAULT_GRID[2],
    default_grid: tuple[float, float] = DEFAULT_GRID[:2],
    truncation_radius: float = TRUNCATION_RADIUS,
) -> np.ndarray:
    """[min Newton slope - 1, max Newton slope + 1]; ``default_grid`` for monomials.

    Truncated members stop at ln(truncation_radius) + GRID_MARGIN: edges past
    the radius of validity belong to the truncation, not the family.
    """
    radii = newton_polygon_radii(f)
    if not radii:
        return make_grid(*default_grid, points)
    slopes = [s for s, _ in radii]
    t_min, t_max = min(slopes) - 1.0, max(slopes) + 1.0
    if f.truncated:
        limit = math.log(truncation_radius) + GRID_MARGIN
        if t_max > limit:
            logger.info(f"{f.label}: profile grid clipped from t={t_max:.4g} to t={limit:.4g}")
            t_max = max(limit, t_min + GRID_MARGIN)
    return make_grid(t_min, t_max, points)


# =============================================================================
# Envelope duality and modulus profile
# =============================================================================


@dataclass(frozen=True, eq=False)
class Theorem1Report:
    label: str
    V: float
    psi: PiecewiseConvex
    legendre_psi: PiecewiseConvex
    profile: Profile
    duality_residual: float
    sandwich_gap: float
    normalized: bool = True

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "label": self.label,
            "V": self.V,
            "normalized": self.normalized,
            "psi": self.psi.to_json(),
            "legendre_psi": self.legendre_psi.to_json(),
            "profile": self.profile.to_json(),
            "duality_residual": self.duality_residual,
            "sandwich_gap": self.sandwich_gap,
        }


def theorem1_check(f: CoeffSeq, t_grid) -> Theorem1Report:
    """Envelope psi_n, its conjugate and the modulus profile on one grid.

    The conjugate of psi_n at t equals (1/V) ln m(e^t) exactly, so the duality
    residual measures floating-point error only.
    """
    psi = lower_envelope(LogPointSet.from_coeffseq(f))
    lpsi = legendre(psi)
    profile = phi_profile(f, t_grid)
    residual = float(np.max(np.abs(evaluate(lpsi, profile.t_grid) - profile.lower)))
    logger.info(f"{f.label}: duality residual {residual:.3g}, sandwich gap {profile.gap:.4g}")
    return Theorem1Report(f.label, f.V, psi, lpsi, profile, residual, profile.gap, f.normalized)


# =============================================================================
# Coefficient criterion
# =============================================================================


def jentzsch_statistic(f: CoeffSeq, eps: float) -> tuple[float, float]:
    """(max_k ln|a_k| - max over the boundary windows, eps n)."""
    if not 0.0 < eps < 0.5:
        raise InvalidArgumentError(f"eps must lie in (0, 1/2), got {eps}")
    n = f.degree
    if not f.normalized:
        raise InvalidArgumentError(f"{f.label}: the coefficient criterion needs a normalized member")
    if abs(f.V - n) > 1e-9 * max(1, n):
        raise InvalidArgumentError(f"{f.label}: the coefficient criterion needs V = degree ({f.V} != {n})")
    logs = f.log_abs_coeffs()[: n + 1]
    k = np.arange(n + 1)
    window = (k <= eps * n) | (k >= (1.0 - eps) * n)
    window_max = float(np.max(logs[window])) if np.any(window) else -math.inf
    return float(np.max(logs)) - window_max, eps * n


def jentzsch_condition(f: CoeffSeq, eps: float) -> bool:
    """The coefficient criterion at one (n, eps); all-zero windows fail it."""
    difference, bound = jentzsch_statistic(f, eps)
    return difference <= bound


# =============================================================================
# Predicted circles against actual roots
# =============================================================================


@dataclass(frozen=True)
class CircleCheck:
    radius: float
    predicted_mass: float | None
    measured_mass: float
    discrepancy: float | None

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "predicted_mass": self.predicted_mass,
            "measured_mass": self.measured_mass,
            "discrepancy": self.discrepancy,
        }


@dataclass(frozen=True, eq=False)
class UniformityReport:
    label: str
    segmentation: Segmentation | None
    detector_note: str | None
    circles: list[CircleCheck]
    discrepancy: float | None
    radial: RadialStats
    roots: RootSet
    measure: EmpiricalMeasure
    profile: Profile

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "label": self.label,
            "detector": self.segmentation.to_json() if self.segmentation else None,
            "detector_note": self.detector_note,
            "circles": [c.to_json() for c in self.circles],
            "discrepancy": self.discrepancy,
            "radial": self.radial.to_json(),
            "degree": self.roots.degree,
            "converged": self.roots.converged,
        }


def _safe_discrepancy(m: EmpiricalMeasure, center: complex = 0) -> float | None:
    if len(m) == 0:
        return None
    try:
        return angular_discrepancy(m, center)
    except InvalidArgumentError:
        return None


def uniformity_report(
    f: CoeffSeq,
    radius_guess: float | None = None,
    t_grid=None,
    delta: float = ANNULUS_DELTA,
    detector_tol: float | None = None,
    gap_factor: float = 1.05,
    min_piece_intervals: int = MIN_PIECE_INTERVALS,
    min_tol: float = MIN_DETECTOR_TOL,
    max_slope_tol: float = MAX_SLOPE_TOL,
    opts: SolverOptions | None = None,
) -> UniformityReport:
    """Detector circles from the profile paired with the roots found near them.

    The sandwich gap sets the detector tolerance; slopes are compared at
    min(tolerance, max_slope_tol) so a wide gap cannot merge distinct pieces.
    """
    grid = auto_grid(f) if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    profile = phi_profile(f, grid)
    tol = detector_tol if detector_tol is not None else max(gap_factor * profile.gap, min_tol)
    segmentation, note = None, None
    try:
        segmentation = detect_piecewise_harmonic(
            profile,
            tol,
            min_piece_intervals=min_piece_intervals,
            unit_range=not f.truncated and abs(f.V - f.degree) < 1e-9,
            slope_tol=min(tol, max_slope_tol),
        )
    except (ProfileNotResolvedError, ConvexityError) as exc:
        note = str(exc)
        logger.warning(f"{f.label}: {note}")

    roots = aberth_roots(f, opts)
    measure = empirical(roots)

    if radius_guess is not None:
        targets = [(radius_guess, None)]
    elif segmentation is not None:
        targets = [(c.radius, c.mass) for c in segmentation.circles]
    else:
        targets = []

    checks = []
    for radius, mass in targets:
        lo, hi = radius * (1.0 - delta), radius * (1.0 + delta)
        d = np.abs(measure.points)
        ring = measure.restrict((d >= lo) & (d <= hi))
        checks.append(CircleCheck(radius, mass, annulus_mass(measure, lo, hi), _safe_discrepancy(ring)))

    annulus = (targets[0][0] * (1.0 - delta), targets[0][0] * (1.0 + delta)) if targets else None
    return UniformityReport(
        label=f.label,
        segmentation=segmentation,
        detector_note=note,
        circles=checks,
        discrepancy=_safe_discrepancy(measure),
        radial=radial_stats(measure, annulus=annulus),
        roots=roots,
        measure=measure,
        profile=profile,
    )


# =============================================================================
# Zeros against critical points
# =============================================================================


@dataclass(frozen=True)
class ConstancyFlag:
    point: complex
    gap: float
    spread: float
    constant: bool

    def to_json(self) -> dict:
        return {
            "re": self.point.real,
            "im": self.point.imag,
            "gap": self.gap,
            "spread": self.spread,
            "constant": self.constant,
        }


@dataclass(frozen=True, eq=False)
class DerivativeReport:
    label: str
    w1_zero_vs_crit: float
    pointwise_gap: float
    exclusion_radius: float
    sample_count: int
    constancy_flags: list[ConstancyFlag] = field(default_factory=list)
    zeros: RootSet | None = None
    critical: RootSet | None = None

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "label": self.label,
            "w1_zero_vs_crit": self.w1_zero_vs_crit,
            "pointwise_gap": self.pointwise_gap,
            "exclusion_radius": self.exclusion_radius,
            "sample_count": self.sample_count,
            "constancy_flags": [flag.to_json() for flag in self.constancy_flags],
        }


def default_sample_grid(roots: np.ndarray, side: int = 41) -> np.ndarray:
    finite = roots[np.isfinite(roots)]
    extent = 1.5 * float(np.max(np.abs(finite))) if len(finite) and np.max(np.abs(finite)) > 0 else 1.5
    axis = np.linspace(-extent, extent, side)
    re, im = np.meshgrid(axis, axis)
    return (re + 1j * im).ravel()


def derivative_comparison(
    f: CoeffSeq,
    sample_grid=None,
    exclusion_radius: float | None = None,
    tol: float = MIN_DETECTOR_TOL,
    exclusion_factor: float = EXCLUSION_FACTOR,
    opts: SolverOptions | None = None,
) -> DerivativeReport:
    """W1 between zero and critical-point measures plus the sampled gap (ln|f'| - ln|f|)/V.

    The gap is reported without an asserted sign. Where it is below -tol the
    potential is sampled on a small circle around the point and flagged
    constant when it varies by at most tol.
    """
    if f.degree < 2:
        raise InvalidArgumentError(f"{f.label}: derivative comparison needs degree >= 2")
    zeros = aberth_roots(f, opts)
    critical = critical_points(f, opts)
    w1 = wasserstein1(empirical(zeros), empirical(critical))

    all_zeros = zeros.all_roots()
    moduli = np.abs(all_zeros[np.isfinite(all_zeros)])
    scale = float(np.median(moduli)) if len(moduli) and np.median(moduli) > 0 else 1.0
    radius = exclusion_radius if exclusion_radius is not None else exclusion_factor * scale

    grid = default_sample_grid(all_zeros) if sample_grid is None else np.asarray(sample_grid, dtype=np.complex128)
    far = np.min(np.abs(grid[:, None] - all_zeros[None, :]), axis=1) >= radius
    samples = grid[far]
    gaps = log_derivative_ratio(f, samples) / f.V if len(samples) else np.zeros(0)
    pointwise_gap = float(np.max(gaps)) if len(gaps) else -math.inf

    flags = []
    low = gaps < -tol
    if np.any(low):
        ring = 0.5 * radius * np.exp(2j * np.pi * np.arange(16) / 16)
        values = potential(f, (samples[low][:, None] + ring[None, :]).ravel()).reshape(-1, 16)
        spreads = values.max(axis=1) - values.min(axis=1)
        for z, gap, spread in zip(samples[low], gaps[low], spreads):
            flags.append(ConstancyFlag(complex(z), float(gap), float(spread), bool(spread <= tol)))
    logger.info(f"{f.label}: W1(zeros, critical points) = {w1:.6g}, pointwise gap {pointwise_gap:.4g}")
    return DerivativeReport(f.label, w1, pointwise_gap, radius, int(len(samples)), flags, zeros, critical)

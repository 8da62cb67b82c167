"""Maximal term, central index and two-sided bounds on (1/V) ln M(e^t, f).

The lower side is the maximal term m(r) = max_k |a_k| r^k (Cauchy: m <= M).
The upper side is Valiron's lemma M(r) <= m(r1) (nu(r) + r1/(r1 - r)) with r1
the next grid radius, tightened for genuine polynomials by M(r) <= N m(r),
N the number of nonzero coefficients.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from zerotap.config import MAX_SLOPE_TOL, MIN_PIECE_INTERVALS, SCHEMA_VERSION
from zerotap.errors import ConvexityError, InvalidArgumentError, ProfileNotResolvedError
from zerotap.series import CoeffSeq, log_abs_value

logger = logging.getLogger(__name__)


def maximal_terms(f: CoeffSeq, t) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized maximal_term over an array of t values."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    logs = f.log_abs_coeffs()
    k = np.flatnonzero(np.isfinite(logs))
    terms = logs[k][None, :] + k[None, :] * t[:, None]
    log_m = terms.max(axis=1)
    # largest index attaining the maximum
    last = terms.shape[1] - 1 - np.argmax((terms == log_m[:, None])[:, ::-1], axis=1)
    return log_m, k[last]


def maximal_term(f: CoeffSeq, t: float) -> tuple[float, int]:
    """(ln m(e^t), nu(e^t)); nu is the largest index attaining the maximum."""
    log_m, nu = maximal_terms(f, [t])
    return float(log_m[0]), int(nu[0])


@dataclass(frozen=True)
class CentralIndexCheck:
    nu: int
    lhs: float
    rhs: float
    holds: bool


def central_index_bound(f: CoeffSeq, t: float, t1: float) -> CentralIndexCheck:
    """nu(r) ln(r1/r) <= ln m(r1) - ln m(r) for r = e^t < r1 = e^t1."""
    if not t < t1:
        raise InvalidArgumentError(f"need t < t1, got t={t}, t1={t1}")
    log_m, nu = maximal_term(f, t)
    log_m1, _ = maximal_term(f, t1)
    lhs = nu * (t1 - t)
    rhs = log_m1 - log_m
    holds = lhs <= rhs + 1e-12 * max(1.0, abs(log_m1), abs(log_m))
    return CentralIndexCheck(nu=nu, lhs=lhs, rhs=rhs, holds=holds)


def _valiron(log_m1: np.ndarray, nu: np.ndarray, t: np.ndarray, t1: np.ndarray) -> np.ndarray:
    ratio = 1.0 / -np.expm1(t - t1)
    return log_m1 + np.log(nu + ratio)


def valiron_upper(f: CoeffSeq, t: float, t1: float) -> float:
    """Upper bound for ln M(e^t, f) from Valiron's lemma."""
    if not t < t1:
        raise InvalidArgumentError(f"need t < t1, got t={t}, t1={t1}")
    _, nu = maximal_term(f, t)
    log_m1, _ = maximal_term(f, t1)
    return float(_valiron(np.array([log_m1]), np.array([nu]), np.array([t]), np.array([t1]))[0])


@dataclass(frozen=True, eq=False)
class Profile:
    """Grid bounds lower <= (1/V) ln M(e^t) <= upper."""

    t_grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    V: float
    nu: np.ndarray = field(default=None)

    @property
    def gap(self) -> float:
        return float(np.max(self.upper - self.lower))

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def to_json(self) -> dict:
        return {
            "t_grid": self.t_grid.tolist(),
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "V": self.V,
        }


def phi_profile(f: CoeffSeq, t_grid) -> Profile:
    t = np.asarray(t_grid, dtype=np.float64)
    if t.ndim != 1 or len(t) < 2 or np.any(np.diff(t) <= 0):
        raise InvalidArgumentError("t_grid must be an increasing array of at least two points")
    t1 = np.append(t[1:], t[-1] + (t[-1] - t[-2]))
    log_m, nu = maximal_terms(f, t)
    log_m1 = np.append(log_m[1:], maximal_terms(f, t1[-1:])[0])
    upper = _valiron(log_m1, nu, t, t1)
    if not f.truncated:
        upper = np.minimum(upper, log_m + math.log(f.nonzero_count()))
    logger.debug(f"Profile of {f.label}: {len(t)} points, gap {np.max(upper - log_m) / f.V:.3g}")
    return Profile(t_grid=t, lower=log_m / f.V, upper=upper / f.V, V=f.V, nu=nu)


def sampled_log_max_modulus(f: CoeffSeq, t: float, points: int = 4096) -> float:
    """max of ln|f| over ``points`` equispaced points of the circle |z| = e^t."""
    theta = 2.0 * np.pi * np.arange(points) / points
    return float(np.max(log_abs_value(f, np.exp(t + 1j * theta))))


# =============================================================================
# Piecewise-harmonic detector
# =============================================================================


@dataclass(frozen=True)
class Piece:
    t_from: float
    t_to: float
    slope: float
    intercept: float


@dataclass(frozen=True)
class Circle:
    t: float
    radius: float
    mass: float


@dataclass(frozen=True)
class Segmentation:
    pieces: list[Piece]
    circles: list[Circle]
    tol: float
    flat_start: bool
    slopes_in_unit_range: bool | None = None
    slope_tol: float | None = None

    @property
    def detected(self) -> bool:
        return bool(self.pieces)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "detected": self.detected,
            "tol": self.tol,
            "slope_tol": self.slope_tol,
            "flat_start": self.flat_start,
            "slopes_in_unit_range": self.slopes_in_unit_range,
            "pieces": [
                {"t_from": p.t_from, "t_to": p.t_to, "slope": p.slope, "intercept": p.intercept}
                for p in self.pieces
            ],
            "circles": [{"t": c.t, "radius": c.radius, "mass": c.mass} for c in self.circles],
        }


def _fit_piece(t: np.ndarray, y: np.ndarray, secants: np.ndarray, start: int, stop: int) -> Piece:
    """Affine piece over intervals start..stop-1 (grid points start..stop)."""
    slope = float(np.median(secants[start:stop]))
    intercept = float(np.median(y[start : stop + 1] - slope * t[start : stop + 1]))
    return Piece(float(t[start]), float(t[stop]), slope, intercept)


def detect_piecewise_harmonic(
    p: Profile,
    tol: float,
    min_piece_intervals: int = MIN_PIECE_INTERVALS,
    unit_range: bool = False,
    slope_tol: float | None = None,
) -> Segmentation:
    """Segment the profile midpoint into affine pieces and read off jump circles.

    ``tol`` gates the profile: a sandwich gap above it raises. Slopes are
    compared with ``slope_tol`` (default min(tol, MAX_SLOPE_TOL)): consecutive
    secant slopes within it of the first slope of a run form a piece, runs
    shorter than ``min_piece_intervals`` are kink transitions and adjacent
    pieces with slopes within it are merged. A kink between pieces I and I+1
    sits where they intersect and carries mass a_{I+1} - a_I.
    ``unit_range`` requests the polynomial check that slopes run from >= 0 to 1.
    """
    if tol <= 0:
        raise InvalidArgumentError(f"tol must be positive, got {tol}")
    if slope_tol is None:
        slope_tol = min(tol, MAX_SLOPE_TOL)
    if slope_tol <= 0:
        raise InvalidArgumentError(f"slope_tol must be positive, got {slope_tol}")
    if p.gap > tol:
        raise ProfileNotResolvedError(f"profile gap {p.gap:.6g} exceeds detector tolerance {tol:.6g}")
    t, y = p.t_grid, p.midpoint
    secants = np.diff(y) / np.diff(t)

    runs: list[tuple[int, int]] = []
    start = 0
    for i in range(1, len(secants) + 1):
        if i == len(secants) or abs(secants[i] - secants[start]) > slope_tol:
            if i - start >= min_piece_intervals:
                runs.append((start, i))
            start = i

    merged: list[tuple[int, int]] = []
    for run in runs:
        if merged:
            prev = _fit_piece(t, y, secants, *merged[-1])
            cur = _fit_piece(t, y, secants, *run)
            if abs(cur.slope - prev.slope) <= slope_tol:
                merged[-1] = (merged[-1][0], run[1])
                continue
        merged.append(run)
    pieces = [_fit_piece(t, y, secants, *run) for run in merged]

    circles: list[Circle] = []
    for a, b in zip(pieces, pieces[1:]):
        if b.slope < a.slope - slope_tol:
            raise ConvexityError(f"slope decreases from {a.slope:.6g} to {b.slope:.6g} near t={b.t_from:.6g}")
        if b.slope <= a.slope:
            continue
        t_kink = (a.intercept - b.intercept) / (b.slope - a.slope)
        circles.append(Circle(t=t_kink, radius=math.exp(t_kink), mass=b.slope - a.slope))

    if not pieces:
        logger.warning(f"No affine pieces of length >= {min_piece_intervals} found at slope tol {slope_tol:.3g}")
        return Segmentation([], [], tol, flat_start=False, slopes_in_unit_range=None, slope_tol=slope_tol)

    flat_start = abs(pieces[0].slope) <= slope_tol
    in_range = None
    if unit_range:
        in_range = pieces[0].slope >= -slope_tol and abs(pieces[-1].slope - 1.0) <= slope_tol
    logger.info(f"Detected {len(pieces)} pieces and {len(circles)} circles (gap tol {tol:.3g}, slope tol {slope_tol:.3g})")
    return Segmentation(pieces, circles, tol, flat_start, in_range, slope_tol)

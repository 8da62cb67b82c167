"""Empirical zero measures and the metrics that compare them."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import ot

from zerotap.config import EMD_MAX_ITER, MASS_TOLERANCE, MERGE_RADIUS, QUANTILE_LEVELS, UNIFORM_CIRCLE_ATOMS
from zerotap.errors import InvalidArgumentError, MassMismatchError, UnconvergedRootsError
from zerotap.roots import RootSet

logger = logging.getLogger(__name__)

MAX_TRANSPORT_PAIRS = 1_000_000


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Weighted atoms. ``angles`` overrides np.angle(points) when roots saturate the double range."""

    points: np.ndarray
    weights: np.ndarray
    angles: np.ndarray | None = None

    def __post_init__(self):
        if self.points.shape != self.weights.shape:
            raise InvalidArgumentError("points and weights must have the same length")
        if np.any(self.weights <= 0):
            raise InvalidArgumentError("atom weights must be positive")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def normalized(self) -> EmpiricalMeasure:
        return EmpiricalMeasure(self.points, self.weights / self.total_mass, self.angles)

    def restrict(self, mask: np.ndarray) -> EmpiricalMeasure:
        angles = None if self.angles is None else self.angles[mask]
        return EmpiricalMeasure(self.points[mask], self.weights[mask], angles)

    def to_json(self) -> dict:
        return {
            "atoms": [
                {"re": float(z.real), "im": float(z.imag), "w": float(w)}
                for z, w in zip(self.points, self.weights)
            ]
        }


def empirical(r: RootSet) -> EmpiricalMeasure:
    """Mass 1/degree at every zero, origin zeros included with their multiplicity."""
    if not r.converged:
        raise UnconvergedRootsError(f"{r.label}: refusing to build a measure from unconverged roots")
    points = r.all_roots()
    angles = np.concatenate([np.zeros(r.zero_multiplicity), r.angles])
    return EmpiricalMeasure(points, np.full(len(points), 1.0 / r.degree), angles)


def from_points(points, weights=None) -> EmpiricalMeasure:
    points = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    if weights is None:
        weights = np.full(len(points), 1.0 / len(points))
    return EmpiricalMeasure(points, np.asarray(weights, dtype=np.float64))


def uniform_circle(radius: float = 1.0, atoms: int = UNIFORM_CIRCLE_ATOMS, center: complex = 0) -> EmpiricalMeasure:
    """Discretization of the normalized arc-length measure on |z - center| = radius."""
    theta = 2.0 * np.pi * np.arange(atoms) / atoms
    return from_points(center + radius * np.exp(1j * theta))


def merge_atoms(m: EmpiricalMeasure, radius: float = MERGE_RADIUS) -> EmpiricalMeasure:
    """Fold atoms within ``radius`` of an earlier atom into it, summing weights."""
    reps: list[int] = []
    weights: list[float] = []
    for i, z in enumerate(m.points):
        if reps:
            d = np.abs(m.points[reps] - z)
            j = int(np.argmin(d))
            if d[j] <= radius:
                weights[j] += float(m.weights[i])
                continue
        reps.append(i)
        weights.append(float(m.weights[i]))
    angles = None if m.angles is None else m.angles[reps]
    return EmpiricalMeasure(m.points[reps], np.array(weights), angles)


def _angles(m: EmpiricalMeasure, center: complex) -> np.ndarray:
    if m.angles is not None and center == 0:
        if np.any(m.points == 0):
            raise InvalidArgumentError("an atom sits at the center; its angle is undefined")
        return m.angles
    d = m.points - center
    if np.any(d == 0):
        raise InvalidArgumentError("an atom sits at the center; its angle is undefined")
    return np.angle(d)


def angular_discrepancy(m: EmpiricalMeasure, center: complex = 0) -> float:
    """sup over arcs of |mu(arc) - arc length / 2 pi| for the normalized measure.

    Arcs are taken open or closed (Kuiper form): with u the sorted angles over
    2 pi and F the cumulative mass, D = max(0, max(F(u) - u)) + max(0, max(u - F(u-))).
    """
    if len(m) == 0:
        raise InvalidArgumentError("discrepancy of an empty measure")
    u = np.mod(_angles(m, center), 2.0 * np.pi) / (2.0 * np.pi)
    u = np.where(u >= 1.0, 0.0, u)
    w = m.weights / m.total_mass
    order = np.argsort(u, kind="stable")
    u, w = u[order], w[order]
    # atoms at the same angle form one jump of F
    uniq, first = np.unique(u, return_index=True)
    jumps = np.add.reduceat(w, first)
    after = np.cumsum(jumps)
    before = after - jumps
    d_plus = max(0.0, float(np.max(after - uniq)))
    d_minus = max(0.0, float(np.max(uniq - before)))
    return d_plus + d_minus


@dataclass(frozen=True)
class RadialStats:
    quantiles: dict[float, float]
    annulus: tuple[float, float] | None
    annulus_mass: float | None

    def to_json(self) -> dict:
        return {
            "quantiles": {f"{q:g}": v for q, v in self.quantiles.items()},
            "annulus": list(self.annulus) if self.annulus else None,
            "annulus_mass": self.annulus_mass,
        }


def weighted_quantile(values: np.ndarray, weights: np.ndarray, q: float) -> float:
    """Lower quantile: smallest value whose cumulative weight reaches q."""
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order]) / weights.sum()
    idx = int(np.searchsorted(cum, q - 1e-12, side="left"))
    return float(values[order][min(idx, len(values) - 1)])


def annulus_mass(m: EmpiricalMeasure, r1: float, r2: float, center: complex = 0) -> float:
    """Normalized mass in the closed annulus r1 <= |z - center| <= r2."""
    d = np.abs(m.points - center)
    inside = (d >= r1) & (d <= r2)
    return float(m.weights[inside].sum() / m.total_mass)


def radial_stats(
    m: EmpiricalMeasure,
    center: complex = 0,
    annulus: tuple[float, float] | None = None,
    levels: tuple[float, ...] = QUANTILE_LEVELS,
) -> RadialStats:
    d = np.abs(m.points - center)
    quantiles = {q: weighted_quantile(d, m.weights, q) for q in levels}
    mass = annulus_mass(m, annulus[0], annulus[1], center) if annulus else None
    return RadialStats(quantiles, annulus, mass)


def wasserstein1(m1: EmpiricalMeasure, m2: EmpiricalMeasure) -> float:
    """Exact W1 with Euclidean ground cost (network simplex)."""
    a_meas, b_meas = merge_atoms(m1), merge_atoms(m2)
    ma, mb = a_meas.total_mass, b_meas.total_mass
    if abs(ma - mb) > MASS_TOLERANCE * max(1.0, ma, mb):
        raise MassMismatchError(f"total masses differ: {ma!r} vs {mb!r}")
    if len(a_meas) * len(b_meas) > MAX_TRANSPORT_PAIRS:
        raise InvalidArgumentError(
            f"{len(a_meas)} x {len(b_meas)} atoms exceeds {MAX_TRANSPORT_PAIRS} transport pairs"
        )
    if not (np.all(np.isfinite(a_meas.points)) and np.all(np.isfinite(b_meas.points))):
        raise InvalidArgumentError("transport between measures with non-finite atoms")
    x = np.column_stack([a_meas.points.real, a_meas.points.imag])
    y = np.column_stack([b_meas.points.real, b_meas.points.imag])
    cost = ot.dist(x, y, metric="euclidean")
    a = a_meas.weights / ma
    b = b_meas.weights / mb
    w1 = float(ot.emd2(a, b, cost, numItermax=EMD_MAX_ITER)) * ma
    logger.debug(f"W1 over {len(a)} x {len(b)} atoms: {w1:.6g}")
    return w1

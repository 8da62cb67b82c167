"""Lower convex envelopes and exact Legendre transforms of piecewise-linear data.

A ``PiecewiseConvex`` is given by its vertices and by what happens past the
outer vertices: either the function is +inf there (bounded domain) or it
continues as a half-infinite line with a stored slope.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from zerotap.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LogPointSet:
    """Points (k/V, -ln|a_k|/V) of the nonzero coefficients, x strictly increasing."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.x.shape != self.y.shape:
            raise InvalidArgumentError("x and y must have the same length")
        if not np.all(np.isfinite(self.y)):
            raise InvalidArgumentError("point set holds finite y values only")

    def __len__(self) -> int:
        return len(self.x)

    @classmethod
    def from_coeffseq(cls, f) -> LogPointSet:
        logs = f.log_abs_coeffs()
        k = np.flatnonzero(np.isfinite(logs))
        return cls(k / f.V, -logs[k] / f.V)


@dataclass(frozen=True, eq=False)
class PiecewiseConvex:
    """Convex piecewise-linear function through (breakpoints[i], values[i]).

    ``left_slope``/``right_slope`` are the slopes of half-infinite pieces towards
    -inf/+inf; ``None`` means the function is +inf past that end.
    ``piece_slopes``, when known exactly, replaces the difference quotients.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    left_slope: float | None = None
    right_slope: float | None = None
    piece_slopes: np.ndarray | None = None

    def __post_init__(self):
        if len(self.breakpoints) == 0:
            raise InvalidArgumentError("a piecewise-linear function needs at least one breakpoint")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise InvalidArgumentError("breakpoints must be strictly increasing")
        if self.piece_slopes is not None and len(self.piece_slopes) != len(self.breakpoints) - 1:
            raise InvalidArgumentError("piece_slopes needs one slope per bounded piece")

    @property
    def slopes(self) -> np.ndarray:
        """Slopes of the bounded pieces."""
        if self.piece_slopes is not None:
            return self.piece_slopes
        return np.diff(self.values) / np.diff(self.breakpoints)

    @property
    def domain(self) -> tuple[float, float]:
        lo = -math.inf if self.left_slope is not None else float(self.breakpoints[0])
        hi = math.inf if self.right_slope is not None else float(self.breakpoints[-1])
        return lo, hi

    def all_slopes(self) -> np.ndarray:
        """Bounded-piece slopes with the half-infinite slopes attached at the ends."""
        parts = []
        if self.left_slope is not None:
            parts.append([self.left_slope])
        parts.append(self.slopes)
        if self.right_slope is not None:
            parts.append([self.right_slope])
        return np.concatenate(parts)

    def is_convex(self, atol: float = 1e-12) -> bool:
        s = self.all_slopes()
        return bool(np.all(np.diff(s) >= -atol * np.maximum(1.0, np.abs(s[1:]))))

    def __call__(self, x):
        return evaluate(self, x)

    def to_json(self) -> dict:
        return {
            "breakpoints": self.breakpoints.tolist(),
            "values": self.values.tolist(),
            "left_slope_to_minus_inf": self.left_slope,
            "right_slope_to_plus_inf": self.right_slope,
        }

    @classmethod
    def from_json(cls, data: dict) -> PiecewiseConvex:
        return cls(
            np.asarray(data["breakpoints"], dtype=np.float64),
            np.asarray(data["values"], dtype=np.float64),
            data.get("left_slope_to_minus_inf"),
            data.get("right_slope_to_plus_inf"),
        )


def lower_envelope(pts: LogPointSet) -> PiecewiseConvex:
    """Greatest convex minorant of a finite point set (monotone-chain lower hull).

    Points sharing an x keep the smallest y. Collinear middle points are dropped,
    so every vertex is an input point and consecutive slopes strictly increase.
    """
    if len(pts) == 0:
        raise InvalidArgumentError("lower envelope of an empty point set")
    order = np.lexsort((pts.y, pts.x))
    xs, ys = pts.x[order], pts.y[order]
    hull: list[tuple[float, float]] = []
    last_x = None
    for x, y in zip(xs.tolist(), ys.tolist()):
        if x == last_x:
            continue
        last_x = x
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            if (ax - ox) * (y - oy) - (ay - oy) * (x - ox) <= 0:
                hull.pop()
            else:
                break
        hull.append((x, y))
    logger.debug(f"Lower envelope: {len(hull)} vertices from {len(pts)} points")
    hx, hy = zip(*hull)
    return PiecewiseConvex(np.array(hx), np.array(hy))


def legendre(f: PiecewiseConvex) -> PiecewiseConvex:
    """Exact conjugate L(f)(t) = sup_x (t x - f(x)).

    The vertex x_i maximizes t x - f(x) for t between the slopes on either side
    of it, so the conjugate has a breakpoint at every slope of f with value
    s x_i - f(x_i) and slope x_i in between. A bounded side of f turns into a
    half-infinite piece of L(f) and vice versa. The slopes of L(f) are the x_i
    themselves and are stored as such, so L(L(f)) returns the breakpoints exactly.
    """
    xs, ys = f.breakpoints, f.values
    slopes = f.slopes
    if len(xs) == 1 and f.left_slope is None and f.right_slope is None:
        # a point mass x0: L(f)(t) = t x0 - y0 everywhere, anchored at t = 0
        return PiecewiseConvex(np.array([0.0]), np.array([-ys[0]]), float(xs[0]), float(xs[0]))

    ts: list[float] = []
    vs: list[float] = []
    # slope of L(f) just right of ts[j]: x of the vertex attaining the sup there
    right_x: list[float] = []

    def push(t: float, i: int, after: int) -> None:
        if ts and t <= ts[-1]:
            right_x[-1] = float(xs[after])
            return
        ts.append(t)
        vs.append(t * xs[i] - ys[i])
        right_x.append(float(xs[after]))

    if f.left_slope is not None:
        push(float(f.left_slope), 0, 0)
    for i, s in enumerate(slopes.tolist()):
        push(s, i, i + 1)
    if f.right_slope is not None:
        push(float(f.right_slope), len(xs) - 1, len(xs) - 1)

    left = None if f.left_slope is not None else float(xs[0])
    right = None if f.right_slope is not None else float(xs[-1])
    return PiecewiseConvex(np.array(ts), np.array(vs), left, right, np.array(right_x[:-1]))


def evaluate(f: PiecewiseConvex, x):
    """f(x) with linear interpolation inside the domain and +inf outside."""
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    xs, ys = f.breakpoints, f.values
    if len(xs) == 1:
        out = np.full(x.shape, ys[0], dtype=np.float64)
    else:
        idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 2)
        out = ys[idx] + (x - xs[idx]) * f.slopes[idx]
        out[x == xs[-1]] = ys[-1]
    below = x < xs[0]
    above = x > xs[-1]
    if f.left_slope is None:
        out[below] = math.inf
    else:
        out[below] = ys[0] + f.left_slope * (x[below] - xs[0])
    if f.right_slope is None:
        out[above] = math.inf
    else:
        out[above] = ys[-1] + f.right_slope * (x[above] - xs[-1])
    return float(out[0]) if scalar else out


def positive_part() -> PiecewiseConvex:
    """t+ = max(0, t) on the whole line."""
    return PiecewiseConvex(np.array([0.0]), np.array([0.0]), 0.0, 1.0)

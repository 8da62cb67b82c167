"""All zeros of a CoeffSeq by simultaneous Aberth-Ehrlich iteration.

Approximations live in extended form (ExtArray), so roots of modulus
a**(-2**k) are handled like any other. Every quantity the update needs is
relative: with n_i = f(z_i)/(z_i f'(z_i)) and q_i = sum_{j != i} 1/(1 - z_j/z_i)
the Aberth step is

    z_i <- z_i * (1 - 1 / (1/n_i - q_i)),

which only involves ratios of approximations and the plain complex number
1/n_i. The update is Jacobi-style: a sweep reads one iterate and writes the next.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from zerotap.config import (
    CLUSTER_RADIUS,
    DEFAULT_MAX_ITER,
    DEFAULT_POLISH_ITER,
    DEFAULT_RESIDUAL_TOL_LOG,
    INITIAL_ANGLE_OFFSET,
)
from zerotap.convex import LogPointSet, lower_envelope
from zerotap.errors import InvalidArgumentError
from zerotap.series import CoeffSeq
from zerotap.wiman import maximal_terms
from zerotap.xnum import ExtArray, _cldexp, ext_horner

logger = logging.getLogger(__name__)

# rows of the pairwise ratio matrix handled per chunk
_CHUNK = 512


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = DEFAULT_MAX_ITER
    residual_tol_log: float = DEFAULT_RESIDUAL_TOL_LOG
    polish_iter: int = DEFAULT_POLISH_ITER


@dataclass(frozen=True, eq=False)
class RootSet:
    """Zeros of one polynomial.

    ``points`` holds the nonzero roots in extended form; ``zero_multiplicity``
    counts the roots at the origin that were deflated exactly.
    """

    points: ExtArray
    residual_log: np.ndarray
    multiplicity_hint: np.ndarray
    zero_multiplicity: int
    degree: int
    converged: bool
    iterations: int = 0
    label: str = ""

    @property
    def degree_accounted(self) -> int:
        return len(self.points)

    @property
    def roots(self) -> np.ndarray:
        """Plain complex roots; moduli outside the double range saturate."""
        return self.points.to_complex()

    @property
    def modulus_log(self) -> np.ndarray:
        return self.points.log_abs()

    @property
    def angles(self) -> np.ndarray:
        return np.angle(self.points.phase())

    def all_roots(self) -> np.ndarray:
        """Every zero with multiplicity, deflated origin zeros first."""
        return np.concatenate([np.zeros(self.zero_multiplicity, dtype=np.complex128), self.roots])

    def smallest(self, count: int) -> np.ndarray:
        """Log-moduli of the ``count`` smallest nonzero roots, ascending."""
        return np.sort(self.modulus_log)[:count]

    def to_csv(self) -> str:
        lines = ["re,im,modulus,residual_log,multiplicity_hint"]
        if self.zero_multiplicity:
            lines.append(f"0,0,0,-inf,{self.zero_multiplicity}")
        roots = self.roots
        modulus = np.exp(self.modulus_log)
        for z, mod, res, hint in zip(roots, modulus, self.residual_log, self.multiplicity_hint):
            lines.append(f"{z.real:.17g},{z.imag:.17g},{mod:.17g},{res:.17g},{int(hint)}")
        return "\n".join(lines) + "\n"


# =============================================================================
# Coefficient-level helpers
# =============================================================================


def differentiate(f: CoeffSeq) -> CoeffSeq:
    """f' with the same normalization V."""
    if f.degree < 1:
        raise InvalidArgumentError(f"{f.label}: derivative is the zero polynomial")
    top = f.coeffs[1 : f.degree + 1]
    k = np.arange(1, f.degree + 1, dtype=np.float64)
    return f.with_coeffs(top.mul(ExtArray.from_complex(k)), label=f"{f.label}'")


def newton_polygon_radii(f: CoeffSeq) -> list[tuple[float, int]]:
    """(ln radius, root count) per edge of the Newton polygon of (k, -ln|a_k|)."""
    logs = f.log_abs_coeffs()
    k = np.flatnonzero(np.isfinite(logs))
    if len(k) < 2:
        return []
    env = lower_envelope(LogPointSet(k.astype(np.float64), -logs[k]))
    counts = np.diff(env.breakpoints).round().astype(int)
    return [(float(s), int(c)) for s, c in zip(env.slopes, counts)]


def _deflate(f: CoeffSeq) -> tuple[CoeffSeq | None, int]:
    low = f.lowest_index
    if f.degree == low:
        return None, low
    return f.with_coeffs(f.coeffs[low : f.degree + 1]), low


def _initial_points(g: CoeffSeq) -> ExtArray:
    log_r, phase = [], []
    for radius_log, count in newton_polygon_radii(g):
        theta = 2.0 * np.pi * np.arange(count) / count + INITIAL_ANGLE_OFFSET
        log_r.append(np.full(count, radius_log))
        phase.append(np.exp(1j * theta))
    return ExtArray.from_log(np.concatenate(log_r), np.concatenate(phase))


# =============================================================================
# Iteration
# =============================================================================


def _pairwise_terms(z: ExtArray, rows: np.ndarray) -> np.ndarray:
    """1/(1 - z_j/z_i) for i in rows and every j, diagonal zeroed.

    When |z_j/z_i| > 1 the equivalent form -s/(1 - s) with s = z_i/z_j keeps
    every ratio bounded.
    """
    m, e = z.mant, z.exp
    mr = m[None, :] / m[rows, None]
    er = e[None, :] - e[rows, None]
    with np.errstate(divide="ignore"):
        big = er + np.log2(np.abs(mr)) > 0
    rho = _cldexp(np.where(big, 0.0, mr), np.where(big, 0, er))
    sig = _cldexp(np.where(big, 1.0 / mr, 0.0), np.where(big, -er, 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(big, -sig / (1.0 - sig), 1.0 / (1.0 - rho))
    terms[np.arange(len(rows)), rows] = 0.0
    terms[~np.isfinite(terms)] = 0.0
    return terms


def _relative_sums(z: ExtArray) -> np.ndarray:
    out = np.empty(len(z), dtype=np.complex128)
    for lo in range(0, len(z), _CHUNK):
        rows = np.arange(lo, min(lo + _CHUNK, len(z)))
        out[rows] = _pairwise_terms(z, rows).sum(axis=1)
    return out


def _ratio_distances(z: ExtArray, w: ExtArray, rows: np.ndarray) -> np.ndarray:
    """|z_i - w_j| / max(|z_i|, |w_j|) for i in rows and every j."""
    mr = w.mant[None, :] / z.mant[rows, None]
    er = w.exp[None, :] - z.exp[rows, None]
    with np.errstate(divide="ignore"):
        big = er + np.log2(np.abs(mr)) > 0
    rho = _cldexp(np.where(big, 1.0 / mr, mr), np.where(big, -er, er))
    return np.abs(1.0 - rho)


def _relative_distances(z: ExtArray, rows: np.ndarray) -> np.ndarray:
    return _ratio_distances(z, z, rows)


def _multiplicity_hints(z: ExtArray, radius: float = CLUSTER_RADIUS) -> np.ndarray:
    hints = np.empty(len(z), dtype=np.int64)
    for lo in range(0, len(z), _CHUNK):
        rows = np.arange(lo, min(lo + _CHUNK, len(z)))
        hints[rows] = (_relative_distances(z, rows) <= radius).sum(axis=1)
    return hints


def _conjugate_symmetrize(z: ExtArray, radius: float = CLUSTER_RADIUS) -> ExtArray:
    """Snap an approximate root set of a real polynomial onto a conjugate-closed one.

    Points are matched greedily, closest first, with the conjugate of a free
    point (possibly their own). A self match moves onto the real axis and a
    pair is replaced by the average and its conjugate. Points with no free
    partner within ``radius`` (relative) are left alone.
    """
    conj = z.conj()
    best = np.empty(len(z))
    for lo in range(0, len(z), _CHUNK):
        rows = np.arange(lo, min(lo + _CHUNK, len(z)))
        best[rows] = _ratio_distances(z, conj, rows).min(axis=1)
    mant, exp = z.mant.copy(), z.exp.copy()
    free = np.ones(len(z), dtype=bool)
    for i in np.argsort(best, kind="stable"):
        if not free[i] or best[i] > radius:
            continue
        d = _ratio_distances(z, conj, np.array([i]))[0]
        d[~free] = np.inf
        j = int(np.argmin(d))
        if d[j] > radius:
            continue
        free[i] = free[j] = False
        if j == i:
            mant[i] = mant[i].real
            continue
        avg = z[i : i + 1].add(conj[j : j + 1]).scale(0.5)
        mant[i], exp[i] = avg.mant[0], avg.exp[0]
        mant[j], exp[j] = np.conj(avg.mant[0]), avg.exp[0]
    return ExtArray._make(mant, exp)


def _aberth_factor(inv_newton: np.ndarray, q: np.ndarray) -> np.ndarray:
    """w with z_new = z * w; falls back to a Newton step when the Aberth denominator vanishes."""
    with np.errstate(divide="ignore", invalid="ignore"):
        w = 1.0 - 1.0 / (inv_newton - q)
        newton = 1.0 - 1.0 / inv_newton
    w = np.where(np.isfinite(w), w, newton)
    w = np.where(np.isfinite(w), w, 1.0)
    return np.where(w == 0, 0.5, w)


StepFn = Callable[[ExtArray], tuple[np.ndarray, np.ndarray]]


def _iterate(z: ExtArray, step: StepFn, opts: SolverOptions) -> tuple[ExtArray, np.ndarray, bool, int]:
    """Run sweeps until every residual is below tolerance, then polish.

    ``step(z)`` returns (z f'/f per point, residual log per point). Converged
    points are frozen during the main loop. Polishing sweeps move every point
    but keep a move only where it does not increase the residual.
    """
    tol = opts.residual_tol_log
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        inv, res = step(z)
        done = res <= tol
        if np.all(done):
            break
        w = _aberth_factor(inv, _relative_sums(z))
        w[done] = 1.0
        z = z.mul(ExtArray.from_complex(w))
    for _ in range(opts.polish_iter):
        inv, res = step(z)
        candidate = z.mul(ExtArray.from_complex(_aberth_factor(inv, _relative_sums(z))))
        _, res_new = step(candidate)
        keep = res_new <= res
        if not np.any(keep & (res_new < res)):
            break
        z = ExtArray(np.where(keep, candidate.mant, z.mant), np.where(keep, candidate.exp, z.exp))
    _, res = step(z)
    return z, res, bool(np.all(res <= tol)), iterations


def _coefficient_step(g: CoeffSeq) -> StepFn:
    def step(z: ExtArray):
        value, deriv = ext_horner(g.coeffs, z, derivative=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = z.mul(deriv).div(value).to_complex()
        inv = np.where(value.is_zero, np.inf, inv)
        scale, _ = maximal_terms(g, z.log_abs())
        return inv, value.log_abs() - scale

    return step


def _rootset(z: ExtArray, res: np.ndarray, zeros: int, degree: int, converged: bool, iterations: int, label: str) -> RootSet:
    return RootSet(
        points=z,
        residual_log=res,
        multiplicity_hint=_multiplicity_hints(z) if len(z) else np.zeros(0, dtype=np.int64),
        zero_multiplicity=zeros,
        degree=degree,
        converged=converged,
        iterations=iterations,
        label=label,
    )


def _known_roots(f: CoeffSeq) -> RootSet:
    roots = np.asarray(f.roots, dtype=np.complex128)
    zero = roots == 0
    z = ExtArray.from_complex(roots[~zero]) if np.any(~zero) else ExtArray.zeros(0)
    return _rootset(z, np.full(len(z), -math.inf), int(zero.sum()), f.degree, True, 0, f.label)


def aberth_roots(f: CoeffSeq, opts: SolverOptions | None = None) -> RootSet:
    """Every zero of f (or of its stored truncation)."""
    opts = opts or SolverOptions()
    if f.degree < 1:
        raise InvalidArgumentError(f"{f.label}: a constant has no zeros to find")
    if f.roots is not None:
        return _known_roots(f)
    g, zeros = _deflate(f)
    if zeros:
        logger.debug(f"{f.label}: deflated {zeros} zeros at the origin")
    if g is None:
        return _rootset(ExtArray.zeros(0), np.zeros(0), zeros, f.degree, True, 0, f.label)
    step = _coefficient_step(g)
    z, res, converged, iterations = _iterate(_initial_points(g), step, opts)
    if converged and g.is_real():
        sym = _conjugate_symmetrize(z)
        _, sym_res = step(sym)
        if np.all(sym_res <= opts.residual_tol_log):
            z, res = sym, sym_res
        else:
            logger.debug(f"{f.label}: conjugate pairing would break the residual certificate; kept as solved")
    if converged:
        logger.info(f"{f.label}: {len(z)} roots converged in {iterations} sweeps")
    else:
        logger.warning(
            f"{f.label}: {int(np.sum(res > opts.residual_tol_log))} of {len(z)} roots unconverged "
            f"after {opts.max_iter} sweeps"
        )
    return _rootset(z, res, zeros, f.degree, converged, iterations, f.label)


def _log_derivative_step(roots: np.ndarray) -> StepFn:
    """Step for zeros of f' when f = c prod (z - r_i): h = f'/f = sum 1/(z - r_i).

    f'/f'' = h/(h' + h^2), so z f''/f' = z (h' + h^2)/h. The residual compares
    |h| with sum 1/|z - r_i|.
    """

    def step(z: ExtArray):
        w = z.to_complex()
        with np.errstate(divide="ignore", invalid="ignore"):
            inv_d = 1.0 / (w[:, None] - roots[None, :])
            h = inv_d.sum(axis=1)
            dh = -(inv_d**2).sum(axis=1)
            inv = w * (dh + h * h) / h
            res = np.log(np.abs(h)) - np.log(np.abs(inv_d).sum(axis=1))
        inv = np.where(h == 0, np.inf, inv)
        res = np.where(np.isnan(res), math.inf, res)
        return inv, res

    return step


def critical_points(f: CoeffSeq, opts: SolverOptions | None = None) -> RootSet:
    """Zeros of f'."""
    opts = opts or SolverOptions()
    fp = differentiate(f)
    if f.roots is None or fp.degree < 1:
        return aberth_roots(fp, opts)
    g, zeros = _deflate(fp)
    if g is None:
        return _rootset(ExtArray.zeros(0), np.zeros(0), zeros, fp.degree, True, 0, fp.label)
    roots = np.asarray(f.roots, dtype=np.complex128)
    z, res, converged, iterations = _iterate(_initial_points(g), _log_derivative_step(roots), opts)
    if zeros:
        logger.debug(f"{fp.label}: {zeros} critical points at the origin")
    if not converged:
        logger.warning(f"{fp.label}: critical points unconverged after {opts.max_iter} sweeps")
    return _rootset(z, res, zeros, fp.degree, converged, iterations, fp.label)


def log_derivative_ratio(f: CoeffSeq, z) -> np.ndarray:
    """ln|f'(z)| - ln|f(z)| at plain complex points."""
    points = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if f.roots is not None:
        h = (1.0 / (points[:, None] - np.asarray(f.roots)[None, :])).sum(axis=1)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(h))
    value, deriv = ext_horner(f.coeffs, ExtArray.from_complex(points), derivative=True)
    return deriv.log_abs() - value.log_abs()

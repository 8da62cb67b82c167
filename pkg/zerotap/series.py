"""Family members f_n = sum_k a_{n,k} z^k with their normalization V_n."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable

import numpy as np

from zerotap.config import (
    RUELLE_MAX_ITERATES,
    RUELLE_RATIO,
    TRUNCATION_K_MAX,
    TRUNCATION_MARGIN,
    TRUNCATION_RADIUS,
)
from zerotap.errors import EmptySeriesError, InvalidArgumentError
from zerotap.tutte import BigIntPoly, tutte_degree
from zerotap.xnum import ONE, ExtArray, ExtComplex, ExtScalar, ext_horner, to_ext

logger = logging.getLogger(__name__)

CoeffRule = Callable[[int], object]


@dataclass(frozen=True, eq=False)
class CoeffSeq:
    """One member of a family: coefficients a_k (ascending) and normalization V.

    ``truncated`` marks a truncation of an entire function at K = len(coeffs) - 1.
    ``normalized`` is False when V is only a working scale and the family has
    no known normalization.
    ``roots``, when present, are the exact zeros the member was built from
    (the leading coefficient times prod (z - r_i) equals the coefficient data).
    """

    label: str
    n: int
    V: float
    coeffs: ExtArray
    truncated: bool = False
    normalized: bool = True
    roots: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if not (math.isfinite(self.V) and self.V > 0):
            raise InvalidArgumentError(f"V must be a positive real, got {self.V!r}")
        if len(self.coeffs) == 0 or bool(np.all(self.coeffs.is_zero)):
            raise EmptySeriesError(f"{self.label}: all coefficients are zero")
        if self.roots is not None and len(self.roots) != self.degree:
            raise InvalidArgumentError(
                f"{self.label}: {len(self.roots)} stored roots for degree {self.degree}"
            )

    @property
    def degree(self) -> int:
        return int(np.flatnonzero(~self.coeffs.is_zero)[-1])

    @property
    def lowest_index(self) -> int:
        """Index of the first nonzero coefficient (multiplicity of the zero at 0)."""
        return int(np.flatnonzero(~self.coeffs.is_zero)[0])

    @property
    def leading(self) -> ExtComplex:
        return self.coeffs[self.degree]

    @property
    def factored(self) -> bool:
        return self.roots is not None

    def log_abs_coeffs(self) -> np.ndarray:
        """ln|a_k| per index, -inf for zero coefficients."""
        return self.coeffs.log_abs()

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(~self.coeffs.is_zero))

    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.mant.imag == 0))

    def with_coeffs(self, coeffs: ExtArray, **changes) -> CoeffSeq:
        params = dict(
            label=self.label,
            n=self.n,
            V=self.V,
            truncated=self.truncated,
            normalized=self.normalized,
            roots=None,
        )
        params.update(changes)
        return CoeffSeq(coeffs=coeffs, **params)

    def to_json(self) -> dict:
        data = {
            "label": self.label,
            "n": self.n,
            "V": self.V,
            "degree": self.degree,
            "truncated": self.truncated,
            "normalized": self.normalized,
            "coeffs": self.coeffs.to_json(),
        }
        if self.roots is not None:
            data["roots"] = [{"re": float(z.real), "im": float(z.imag)} for z in self.roots]
        return data


# =============================================================================
# Generators
# =============================================================================


def partial_sums(coeff_rule: CoeffRule, n: int, label: str = "partial-sum") -> CoeffSeq:
    """S_n = sum_{k<=n} coeff_rule(k) z^k with V = n."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    coeffs = ExtArray.from_values(coeff_rule(k) for k in range(n + 1))
    return CoeffSeq(label=label, n=n, V=float(n), coeffs=coeffs)


def geometric_partial_sum(n: int) -> CoeffSeq:
    return partial_sums(lambda k: 1, n, label="geometric-partial-sum")


def tutte_coeffseq(p: BigIntPoly, n: int) -> CoeffSeq:
    """C̄_n(y)/n! with V = n(n-1)/2."""
    if n < 2:
        raise InvalidArgumentError(f"Tutte family needs n >= 2 (V = n(n-1)/2 > 0), got {n}")
    if p.degree != tutte_degree(n):
        raise InvalidArgumentError(f"polynomial degree {p.degree} does not match n = {n}")
    nf = factorial(n)
    coeffs = ExtArray.from_values(ExtScalar.from_ratio(c, nf) for c in p.coeffs)
    return CoeffSeq(label=f"tutte(n={n})", n=n, V=float(tutte_degree(n)), coeffs=coeffs)


def ruelle_iterates(c: float, count: int) -> list[ExtScalar]:
    """p_c^{*j}(0) for j = 1..count, p_c(z) = z^2 + c."""
    cx = ExtScalar.from_float(c)
    x = cx
    out = [x]
    for _ in range(count - 1):
        x = x * x + cx
        out.append(x)
    return out


def _check_ruelle_parameter(c: float) -> None:
    if not c < -2.0:
        raise InvalidArgumentError(f"c must be < -2 (iterates of 0 must escape), got {c}")


def v_of_c(c: float) -> int:
    """Smallest n with p_c^{*(n+1)}(0) / p_c^{*n}(0) >= 36."""
    _check_ruelle_parameter(c)
    threshold = math.log(RUELLE_RATIO)
    iterates = ruelle_iterates(c, RUELLE_MAX_ITERATES + 1)
    for n in range(1, RUELLE_MAX_ITERATES + 1):
        ratio = iterates[n] / iterates[n - 1]
        if ratio.sign > 0 and ratio.log_abs() >= threshold:
            return n
    raise InvalidArgumentError(f"iterates for c={c} do not reach ratio {RUELLE_RATIO} in {RUELLE_MAX_ITERATES} steps")


def ruelle_zeta(c: float, K: int) -> CoeffSeq:
    """F_c(z) = 1 + sum_k z^k / (p_c(0) p_c^{*2}(0) ... p_c^{*k}(0)), truncated at K."""
    _check_ruelle_parameter(c)
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    coeffs = [ONE]
    for x in ruelle_iterates(c, K):
        coeffs.append(coeffs[-1] / x)
    V = v_of_c(c)
    logger.debug(f"Ruelle c={c}: K={K}, V(c)={V}")
    return CoeffSeq(
        label=f"ruelle(c={c})", n=V, V=float(V), coeffs=ExtArray.from_values(coeffs), truncated=True
    )


def hardy(a: float, K: int) -> CoeffSeq:
    """a^{-1} sum_k a^{2^k} z^k truncated at K.

    No normalization is known for this family: V = K is a working scale for
    profiles only and the member is flagged ``normalized=False``.
    """
    if not 0.0 < a < 1.0:
        raise InvalidArgumentError(f"a must lie in (0, 1), got {a}")
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    log2_a = math.log2(a)
    # exponents must stay integral in a double: |log2 a_K| < 2^52
    if K > 1000 or (2.0**K - 1.0) * abs(log2_a) >= 2.0**52:
        raise InvalidArgumentError(f"a^(2^K) leaves the exponent range at K={K}; use a smaller K")
    log2_coeffs = np.array([(2.0**k - 1.0) * log2_a for k in range(K + 1)])
    return CoeffSeq(
        label=f"hardy(a={a})",
        n=K,
        V=float(K),
        coeffs=ExtArray.from_log2(log2_coeffs),
        truncated=True,
        normalized=False,
    )


def rescale(f: CoeffSeq, r: float, V: float) -> CoeffSeq:
    """f(r z) with normalization V; a_k r^k is formed in exponent arithmetic."""
    if not r > 0:
        raise InvalidArgumentError(f"r must be positive, got {r}")
    k = np.arange(len(f.coeffs), dtype=np.float64)
    factors = ExtArray.from_log2(k * math.log2(r))
    roots = None if f.roots is None else f.roots / r
    return f.with_coeffs(f.coeffs.mul(factors), V=float(V), normalized=True, roots=roots, label=f"{f.label}@r={r:g}")


def random_roots_disk(n: int, seed: int) -> CoeffSeq:
    """Monic polynomial with n i.i.d. zeros uniform in the unit disk (PCG64 stream)."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    radius = np.sqrt(rng.random(n))
    angle = 2.0 * np.pi * rng.random(n)
    roots = radius * np.exp(1j * angle)
    coeffs = ExtArray.from_complex([1.0])
    zero = ExtArray.zeros(1)
    for r in roots:
        # (z - r) * p: shift up and subtract r * p
        coeffs = zero.concat(coeffs).add(coeffs.scale(-r).concat(zero))
    return CoeffSeq(label=f"random-roots-disk(n={n},seed={seed})", n=n, V=float(n), coeffs=coeffs, roots=roots)


# =============================================================================
# Truncation of entire functions
# =============================================================================


def suggest_truncation(
    log_coeff: Callable[[int], float],
    radius: float = TRUNCATION_RADIUS,
    margin: float = TRUNCATION_MARGIN,
    k_max: int = TRUNCATION_K_MAX,
) -> int:
    """Smallest K >= 1 with ln|a_K| + K ln R < ln|a_0| - margin."""
    base = log_coeff(0)
    if not math.isfinite(base):
        raise InvalidArgumentError("a_0 must be nonzero to size a truncation")
    log_r = math.log(radius)
    for K in range(1, k_max + 1):
        if log_coeff(K) + K * log_r < base - margin:
            logger.info(f"Truncation at K={K} for radius {radius} and margin {margin}")
            return K
    raise InvalidArgumentError(f"no truncation index below {k_max} meets the tail margin {margin}")


def ruelle_truncation(c: float, radius: float = TRUNCATION_RADIUS, margin: float = TRUNCATION_MARGIN) -> int:
    _check_ruelle_parameter(c)
    logs = [0.0]
    cx = ExtScalar.from_float(c)
    x = cx

    def log_coeff(k: int) -> float:
        nonlocal x
        while len(logs) <= k:
            logs.append(logs[-1] - x.log_abs())
            x = x * x + cx
        return logs[k]

    return suggest_truncation(log_coeff, radius, margin)


def hardy_truncation(a: float, radius: float = TRUNCATION_RADIUS, margin: float = TRUNCATION_MARGIN) -> int:
    if not 0.0 < a < 1.0:
        raise InvalidArgumentError(f"a must lie in (0, 1), got {a}")
    log_a = math.log(a)
    return suggest_truncation(lambda k: (2.0**k - 1.0) * log_a, radius, margin)


# =============================================================================
# Coefficient rules
# =============================================================================


def _unit_root_rule(n: int) -> CoeffRule:
    return lambda k: -1 if k == 0 else (1 if k == n else 0)


RULES: dict[str, Callable[[int], CoeffRule]] = {
    "unit": lambda n: (lambda k: 1),
    "harmonic": lambda n: (lambda k: ExtScalar.from_ratio(1, k + 1)),
    "exp": lambda n: (lambda k: ExtScalar.from_ratio(1, factorial(k))),
    "binomial": lambda n: (lambda k: comb(n, k)),
    "unit-root": _unit_root_rule,
    "monomial": lambda n: (lambda k: 1 if k == n else 0),
}


def rule_partial_sum(rule: str, n: int) -> CoeffSeq:
    """Partial sum S_n of a registered coefficient rule."""
    if rule not in RULES:
        raise InvalidArgumentError(f"unknown coefficient rule {rule!r}; choose from {', '.join(RULES)}")
    return partial_sums(RULES[rule](n), n, label=f"{rule}(n={n})")


def explicit_coeffs(values: list, label: str = "custom", V: float | None = None) -> CoeffSeq:
    """Member from an explicit coefficient list; V defaults to the degree."""
    coeffs = ExtArray.from_values(to_ext(v) for v in values)
    if len(coeffs) == 0 or bool(np.all(coeffs.is_zero)):
        raise EmptySeriesError(f"{label}: all coefficients are zero")
    degree = int(np.flatnonzero(~coeffs.is_zero)[-1])
    return CoeffSeq(label=label, n=degree, V=float(V if V is not None else max(degree, 1)), coeffs=coeffs)


# =============================================================================
# Values of f_n
# =============================================================================


def log_abs_value(f: CoeffSeq, z) -> np.ndarray:
    """ln|f(z)| at every point of ``z``, evaluated without overflow."""
    points = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if f.roots is not None:
        with np.errstate(divide="ignore"):
            dist = np.log(np.abs(points[:, None] - f.roots[None, :])).sum(axis=1)
        return f.leading.log_abs() + dist
    return ext_horner(f.coeffs, ExtArray.from_complex(points)).log_abs()


def potential(f: CoeffSeq, z) -> np.ndarray:
    """(1/V) ln|f(z)|, the finite-n subharmonic function u_n."""
    return log_abs_value(f, z) / f.V

"""Exact connected-graph polynomials via Tutte's exponential generating function.

C̄_n(y) = sum_k c_{n,k} (y-1)^k where c_{n,k} counts connected simple graphs
with k edges on n labeled vertices. The EGF of C̄_n is the logarithm of
F(x, y) = sum_n y^{n(n-1)/2} x^n / n!, which unrolls into the integer recurrence

    C̄_n = F_n - sum_{k=1}^{n-1} binom(n-1, k-1) C̄_k F_{n-k},   F_m = y^{m(m-1)/2}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from zerotap.config import TUTTE_MAX_N
from zerotap.errors import InvalidArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BigIntPoly:
    """Integer polynomial in y, ascending powers, no trailing zeros."""

    coeffs: tuple[int, ...]

    @classmethod
    def make(cls, coeffs) -> BigIntPoly:
        c = [int(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return cls(tuple(c) if c else (0,))

    @classmethod
    def monomial(cls, power: int, scale: int = 1) -> BigIntPoly:
        return cls.make([0] * power + [scale])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __add__(self, other: BigIntPoly) -> BigIntPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return BigIntPoly.make(x + y for x, y in zip(a, b))

    def __neg__(self) -> BigIntPoly:
        return BigIntPoly.make(-x for x in self.coeffs)

    def __sub__(self, other: BigIntPoly) -> BigIntPoly:
        return self + (-other)

    def __mul__(self, other: BigIntPoly | int) -> BigIntPoly:
        if isinstance(other, int):
            return BigIntPoly.make(x * other for x in self.coeffs)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return BigIntPoly.make(out)

    __rmul__ = __mul__

    def evaluate(self, y: int | Fraction) -> int | Fraction:
        acc: int | Fraction = 0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def taylor_shift(self, h: int) -> BigIntPoly:
        """Coefficients of p(x + h); h = 1 gives the expansion in powers of (y - 1)."""
        n = len(self.coeffs)
        return BigIntPoly.make(
            sum(self.coeffs[i] * comb(i, j) * h ** (i - j) for i in range(j, n)) for j in range(n)
        )

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, items: list[str]) -> BigIntPoly:
        return cls.make(int(s) for s in items)


def _all_graphs(m: int) -> BigIntPoly:
    return BigIntPoly.monomial(m * (m - 1) // 2)


@lru_cache(maxsize=None)
def _tutte_table(n: int) -> tuple[BigIntPoly, ...]:
    table: list[BigIntPoly] = [BigIntPoly.make([0])]
    for m in range(1, n + 1):
        acc = _all_graphs(m)
        for k in range(1, m):
            acc = acc - table[k] * _all_graphs(m - k) * comb(m - 1, k - 1)
        table.append(acc)
    return tuple(table)


def tutte_connected(n: int) -> BigIntPoly:
    """C̄_n(y): monic of degree n(n-1)/2 with constant term (-1)^(n-1) (n-1)!."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if n > TUTTE_MAX_N:
        raise InvalidArgumentError(f"n must be <= {TUTTE_MAX_N} (degree <= 120), got {n}")
    p = _tutte_table(n)[n]
    logger.debug(f"Tutte C_{n}: degree {p.degree}, constant term {p.coeffs[0]}")
    return p


def tutte_degree(n: int) -> int:
    return n * (n - 1) // 2


def tutte_identity_residual(order: int, y: Fraction | int) -> list[Fraction]:
    """exp(sum_{n<=N} C̄_n(y) x^n/n!) - F(x, y), coefficient-wise through x^N.

    Every entry is an exact rational and is zero when the recurrence and the
    identity agree.
    """
    if order < 1:
        raise InvalidArgumentError(f"order must be >= 1, got {order}")
    y = Fraction(y)
    a = [Fraction(0)] + [
        Fraction(tutte_connected(n).evaluate(y)) / factorial(n) for n in range(1, order + 1)
    ]
    b = [Fraction(1)]
    for m in range(1, order + 1):
        b.append(sum(k * a[k] * b[m - k] for k in range(1, m + 1)) / m)
    target = [y ** (n * (n - 1) // 2) / factorial(n) for n in range(order + 1)]
    return [b[n] - target[n] for n in range(order + 1)]

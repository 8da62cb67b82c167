"""Extended-exponent real and complex arithmetic.

A value is ``mantissa * 2**exponent``. The mantissa is an ordinary double,
the exponent an integer, so magnitudes such as ``a**(2**k)`` or the products
of thousands of quadratic iterates never overflow or underflow.

Complex values use the rectangular form with one shared exponent: the
mantissa ``re + i*im`` is normalized so that ``max(|re|, |im|)`` lies in
``[1, 2)``, or both parts are zero and the exponent is 0. The phase form
was rejected because addition needs exponent alignment, which it cannot do
without leaving the representation.

``ExtScalar``/``ExtComplex`` are immutable scalars. ``ExtArray`` is the
vectorized form (complex128 mantissas, int64 exponents) used for coefficient
storage and for Horner evaluation at many points at once.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from zerotap.config import LDEXP_CLIP, SWAMP_BITS
from zerotap.errors import InvalidArgumentError, LogOfZeroError

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def _ldexp(x: float, e: int) -> float:
    """math.ldexp that saturates to +-inf instead of raising."""
    try:
        return math.ldexp(x, e)
    except OverflowError:
        return math.copysign(math.inf, x)


# =============================================================================
# Scalars
# =============================================================================


@dataclass(frozen=True)
class ExtScalar:
    """Signed real ``sign * mantissa * 2**exponent``, mantissa in [1, 2) or 0."""

    mantissa: float = 0.0
    exponent: int = 0
    sign: int = 1

    @classmethod
    def _normalized(cls, x: float, exponent: int) -> ExtScalar:
        if x == 0.0:
            return ZERO
        m, k = math.frexp(abs(x))
        return cls(m * 2.0, exponent + k - 1, 1 if x > 0 else -1)

    @classmethod
    def from_float(cls, x: float) -> ExtScalar:
        if not math.isfinite(x):
            raise InvalidArgumentError(f"cannot represent non-finite value {x!r}")
        return cls._normalized(float(x), 0)

    @classmethod
    def from_int(cls, n: int) -> ExtScalar:
        return cls.from_ratio(n, 1)

    @classmethod
    def from_ratio(cls, num: int, den: int) -> ExtScalar:
        """Correctly rounded num/den for arbitrarily large integers."""
        if den == 0:
            raise InvalidArgumentError("zero denominator")
        if num == 0:
            return ZERO
        sign = -1 if (num < 0) != (den < 0) else 1
        p, q = abs(num), abs(den)
        e = p.bit_length() - q.bit_length()
        # int/int true division is correctly rounded even beyond the float range
        m = p / (q << e) if e >= 0 else (p << -e) / q
        if m < 1.0:
            m *= 2.0
            e -= 1
        if m >= 2.0:
            m /= 2.0
            e += 1
        return cls(m, e, sign)

    @classmethod
    def from_fraction(cls, value: Fraction) -> ExtScalar:
        return cls.from_ratio(value.numerator, value.denominator)

    @classmethod
    def from_log(cls, log_abs: float, sign: int = 1) -> ExtScalar:
        """Build ``sign * exp(log_abs)``; ``-inf`` gives zero."""
        if log_abs == -math.inf:
            return ZERO
        if not math.isfinite(log_abs):
            raise InvalidArgumentError(f"log-magnitude must be finite, got {log_abs!r}")
        log2 = log_abs / LN2
        e = math.floor(log2)
        return cls._normalized(sign * 2.0 ** (log2 - e), e)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0.0

    def log_abs(self) -> float:
        return ext_log_abs(self)

    def log2_abs(self) -> float:
        if self.is_zero:
            raise LogOfZeroError("log of zero")
        return self.exponent + math.log2(self.mantissa)

    def to_float(self) -> float:
        return _ldexp(self.sign * self.mantissa, self.exponent)

    def __mul__(self, other: ExtScalar) -> ExtScalar:
        return ext_mul(self, other)

    def __add__(self, other: ExtScalar) -> ExtScalar:
        return ext_add(self, other)

    def __neg__(self) -> ExtScalar:
        if self.is_zero:
            return self
        return ExtScalar(self.mantissa, self.exponent, -self.sign)

    def __sub__(self, other: ExtScalar) -> ExtScalar:
        return ext_add(self, -other)

    def __truediv__(self, other: ExtScalar) -> ExtScalar:
        if other.is_zero:
            raise ZeroDivisionError("extended division by zero")
        if self.is_zero:
            return ZERO
        return ExtScalar._normalized(
            self.sign * other.sign * (self.mantissa / other.mantissa),
            self.exponent - other.exponent,
        )

    def to_json(self) -> dict:
        return {"m": self.sign * self.mantissa, "e": self.exponent}

    @classmethod
    def from_json(cls, data: dict) -> ExtScalar:
        return cls._normalized(float(data["m"]), int(data["e"]))


ZERO = ExtScalar()
ONE = ExtScalar(1.0, 0, 1)


@dataclass(frozen=True)
class ExtComplex:
    """Complex ``(re + i*im) * 2**exponent`` with max(|re|, |im|) in [1, 2) or 0."""

    re: float = 0.0
    im: float = 0.0
    exponent: int = 0

    @classmethod
    def _normalized(cls, re: float, im: float, exponent: int) -> ExtComplex:
        scale = max(abs(re), abs(im))
        if scale == 0.0:
            return cls()
        _, k = math.frexp(scale)
        shift = k - 1
        return cls(math.ldexp(re, -shift), math.ldexp(im, -shift), exponent + shift)

    @classmethod
    def from_complex(cls, z: complex) -> ExtComplex:
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise InvalidArgumentError(f"cannot represent non-finite value {z!r}")
        return cls._normalized(z.real, z.imag, 0)

    @classmethod
    def from_scalar(cls, x: ExtScalar) -> ExtComplex:
        return cls(x.sign * x.mantissa, 0.0, x.exponent) if not x.is_zero else cls()

    @classmethod
    def from_parts(cls, re: ExtScalar, im: ExtScalar) -> ExtComplex:
        e = max(re.exponent if not re.is_zero else -math.inf, im.exponent if not im.is_zero else -math.inf)
        if e == -math.inf:
            return cls()
        e = int(e)
        r = _ldexp(re.sign * re.mantissa, re.exponent - e) if not re.is_zero else 0.0
        i = _ldexp(im.sign * im.mantissa, im.exponent - e) if not im.is_zero else 0.0
        return cls._normalized(r, i, e)

    @property
    def is_zero(self) -> bool:
        return self.re == 0.0 and self.im == 0.0

    @property
    def real(self) -> ExtScalar:
        return ExtScalar._normalized(self.re, self.exponent)

    @property
    def imag(self) -> ExtScalar:
        return ExtScalar._normalized(self.im, self.exponent)

    def log_abs(self) -> float:
        return ext_log_abs(self)

    def to_complex(self) -> complex:
        return complex(_ldexp(self.re, self.exponent), _ldexp(self.im, self.exponent))

    def __mul__(self, other: ExtComplex) -> ExtComplex:
        return ext_mul(self, other)

    def __add__(self, other: ExtComplex) -> ExtComplex:
        return ext_add(self, other)

    def __neg__(self) -> ExtComplex:
        return ExtComplex(-self.re, -self.im, self.exponent) if not self.is_zero else self

    def __sub__(self, other: ExtComplex) -> ExtComplex:
        return ext_add(self, -other)

    def __truediv__(self, other: ExtComplex) -> ExtComplex:
        if other.is_zero:
            raise ZeroDivisionError("extended division by zero")
        q = complex(self.re, self.im) / complex(other.re, other.im)
        return ExtComplex._normalized(q.real, q.imag, self.exponent - other.exponent)

    def to_json(self) -> dict:
        return {"re": self.real.to_json(), "im": self.imag.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> ExtComplex:
        return cls.from_parts(ExtScalar.from_json(data["re"]), ExtScalar.from_json(data["im"]))


Ext = Union[ExtScalar, ExtComplex]


def _as_complex(x: Ext) -> ExtComplex:
    return ExtComplex.from_scalar(x) if isinstance(x, ExtScalar) else x


def ext_mul(a: Ext, b: Ext) -> Ext:
    """Product of two normalized values; exponents add exactly."""
    if isinstance(a, ExtScalar) and isinstance(b, ExtScalar):
        if a.is_zero or b.is_zero:
            return ZERO
        return ExtScalar._normalized(a.sign * b.sign * a.mantissa * b.mantissa, a.exponent + b.exponent)
    a, b = _as_complex(a), _as_complex(b)
    if a.is_zero or b.is_zero:
        return ExtComplex()
    p = complex(a.re, a.im) * complex(b.re, b.im)
    return ExtComplex._normalized(p.real, p.imag, a.exponent + b.exponent)


def ext_add(a: Ext, b: Ext) -> Ext:
    """Sum aligned on the larger exponent.

    When the exponents differ by more than SWAMP_BITS the smaller operand
    cannot change the mantissa and the larger operand is returned unchanged.
    """
    if isinstance(a, ExtScalar) and isinstance(b, ExtScalar):
        if a.is_zero:
            return b
        if b.is_zero:
            return a
        if a.exponent < b.exponent:
            a, b = b, a
        d = a.exponent - b.exponent
        if d > SWAMP_BITS:
            return a
        s = a.sign * a.mantissa + math.ldexp(b.sign * b.mantissa, -d)
        return ExtScalar._normalized(s, a.exponent)
    a, b = _as_complex(a), _as_complex(b)
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    if a.exponent < b.exponent:
        a, b = b, a
    d = a.exponent - b.exponent
    if d > SWAMP_BITS:
        return a
    return ExtComplex._normalized(
        a.re + math.ldexp(b.re, -d), a.im + math.ldexp(b.im, -d), a.exponent
    )


def ext_log_abs(a: Ext) -> float:
    """Natural log of |a| as exponent*ln2 + ln|mantissa|."""
    if a.is_zero:
        raise LogOfZeroError("log of zero")
    if isinstance(a, ExtScalar):
        return a.exponent * LN2 + math.log(a.mantissa)
    return a.exponent * LN2 + math.log(math.hypot(a.re, a.im))


def to_ext(value: Ext | complex | float | int | Fraction) -> ExtComplex:
    """Coerce a plain number or extended scalar into ExtComplex."""
    if isinstance(value, ExtComplex):
        return value
    if isinstance(value, ExtScalar):
        return ExtComplex.from_scalar(value)
    if isinstance(value, Fraction):
        return ExtComplex.from_scalar(ExtScalar.from_fraction(value))
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return ExtComplex.from_scalar(ExtScalar.from_int(int(value)))
    return ExtComplex.from_complex(complex(value))


# =============================================================================
# Arrays
# =============================================================================


def _cldexp(m: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Complex ldexp with clipped shifts; overflow saturates to inf."""
    m = np.asarray(m, dtype=np.complex128)
    e = np.clip(e, -LDEXP_CLIP, LDEXP_CLIP).astype(np.int32)
    with np.errstate(over="ignore"):
        re = np.ldexp(m.real, e)
        im = np.ldexp(m.imag, e)
    # assign parts separately: re + 1j*im turns a saturated part into nan
    out = np.empty(np.broadcast(re, im).shape, dtype=np.complex128)
    out.real = re
    out.imag = im
    return out


def _normalize(mant: np.ndarray, exp: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mant = np.asarray(mant, dtype=np.complex128)
    exp = np.asarray(exp, dtype=np.int64)
    scale = np.maximum(np.abs(mant.real), np.abs(mant.imag))
    zero = scale == 0.0
    _, k = np.frexp(scale)
    shift = np.where(zero, 0, k.astype(np.int64) - 1)
    mant = np.where(zero, 0.0, _cldexp(mant, -shift))
    exp = np.where(zero, 0, exp + shift).astype(np.int64)
    return mant, exp


def _mul_raw(m1, e1, m2, e2):
    return _normalize(m1 * m2, e1 + e2)


def _add_raw(m1, e1, m2, e2):
    # a zero operand adopts the other's exponent so alignment never discards the live one
    z1 = m1 == 0
    z2 = m2 == 0
    e1 = np.where(z1, e2, e1)
    e2 = np.where(z2, e1, e2)
    d = e1 - e2
    first = d >= 0
    mant = np.where(first, m1 + _cldexp(m2, -d), _cldexp(m1, d) + m2)
    return _normalize(mant, np.where(first, e1, e2))


@dataclass(frozen=True)
class ExtArray:
    """Vector of ExtComplex values: complex128 mantissas and int64 exponents."""

    mant: np.ndarray
    exp: np.ndarray

    @classmethod
    def _make(cls, mant, exp) -> ExtArray:
        mant, exp = _normalize(mant, exp)
        return cls(mant, exp)

    @classmethod
    def from_complex(cls, values) -> ExtArray:
        values = np.atleast_1d(np.asarray(values, dtype=np.complex128))
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("cannot represent non-finite values")
        return cls._make(values, np.zeros(values.shape, dtype=np.int64))

    @classmethod
    def from_log2(cls, log2_abs, phase=None) -> ExtArray:
        """Values ``phase * 2**log2_abs``; ``-inf`` entries become zero."""
        log2_abs = np.atleast_1d(np.asarray(log2_abs, dtype=np.float64))
        zero = np.isneginf(log2_abs)
        safe = np.where(zero, 0.0, log2_abs)
        e = np.floor(safe)
        m = np.exp2(safe - e).astype(np.complex128)
        if phase is not None:
            m = m * np.asarray(phase, dtype=np.complex128)
        m = np.where(zero, 0.0, m)
        return cls._make(m, e.astype(np.int64))

    @classmethod
    def from_log(cls, log_abs, phase=None) -> ExtArray:
        return cls.from_log2(np.asarray(log_abs, dtype=np.float64) / LN2, phase)

    @classmethod
    def from_values(cls, values: Iterable) -> ExtArray:
        items = [to_ext(v) for v in values]
        mant = np.array([complex(x.re, x.im) for x in items], dtype=np.complex128)
        exp = np.array([x.exponent for x in items], dtype=np.int64)
        return cls._make(mant, exp)

    @classmethod
    def zeros(cls, n: int) -> ExtArray:
        return cls(np.zeros(n, dtype=np.complex128), np.zeros(n, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.mant)

    def __getitem__(self, index):
        if isinstance(index, (int, np.integer)):
            return ExtComplex(float(self.mant[index].real), float(self.mant[index].imag), int(self.exp[index]))
        return ExtArray(self.mant[index], self.exp[index])

    @property
    def is_zero(self) -> np.ndarray:
        return self.mant == 0

    def log2_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return self.exp + np.log2(np.abs(self.mant))

    def log_abs(self) -> np.ndarray:
        """ln|x| per entry; zeros map to -inf."""
        with np.errstate(divide="ignore"):
            return self.exp * LN2 + np.log(np.abs(self.mant))

    def phase(self) -> np.ndarray:
        mag = np.abs(self.mant)
        return np.where(mag == 0, 1.0 + 0j, self.mant / np.where(mag == 0, 1.0, mag))

    def to_complex(self) -> np.ndarray:
        """Plain complex values; out-of-range magnitudes saturate to inf or 0."""
        return _cldexp(self.mant, self.exp)

    def mul(self, other: ExtArray) -> ExtArray:
        return ExtArray(*_mul_raw(self.mant, self.exp, other.mant, other.exp))

    def add(self, other: ExtArray) -> ExtArray:
        return ExtArray(*_add_raw(self.mant, self.exp, other.mant, other.exp))

    def neg(self) -> ExtArray:
        return ExtArray(-self.mant, self.exp)

    def conj(self) -> ExtArray:
        return ExtArray(np.conj(self.mant), self.exp)

    def div(self, other: ExtArray) -> ExtArray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return ExtArray._make(self.mant / other.mant, self.exp - other.exp)

    def scale(self, factor: Ext | complex) -> ExtArray:
        f = to_ext(factor)
        return ExtArray(*_mul_raw(self.mant, self.exp, complex(f.re, f.im), np.int64(f.exponent)))

    def concat(self, other: ExtArray) -> ExtArray:
        return ExtArray(np.concatenate([self.mant, other.mant]), np.concatenate([self.exp, other.exp]))

    def to_json(self) -> list[dict]:
        return [self[i].to_json() for i in range(len(self))]

    @classmethod
    def from_json(cls, items: Sequence[dict]) -> ExtArray:
        return cls.from_values(ExtComplex.from_json(item) for item in items)


def ext_horner(coeffs: ExtArray, z: ExtArray, derivative: bool = False):
    """Evaluate sum_k coeffs[k] z**k at every point of z.

    Every step renormalizes, so coefficient log-magnitudes of 1e5 and
    arguments of any finite extended size produce finite results. With
    ``derivative=True`` returns ``(f(z), f'(z))``.
    """
    n_pts = len(z)
    p_m = np.zeros(n_pts, dtype=np.complex128)
    p_e = np.zeros(n_pts, dtype=np.int64)
    d_m = np.zeros(n_pts, dtype=np.complex128)
    d_e = np.zeros(n_pts, dtype=np.int64)
    for k in range(len(coeffs) - 1, -1, -1):
        if derivative:
            d_m, d_e = _mul_raw(d_m, d_e, z.mant, z.exp)
            d_m, d_e = _add_raw(d_m, d_e, p_m, p_e)
        p_m, p_e = _mul_raw(p_m, p_e, z.mant, z.exp)
        if coeffs.mant[k] != 0:
            p_m, p_e = _add_raw(p_m, p_e, coeffs.mant[k], coeffs.exp[k])
    if derivative:
        return ExtArray(p_m, p_e), ExtArray(d_m, d_e)
    return ExtArray(p_m, p_e)

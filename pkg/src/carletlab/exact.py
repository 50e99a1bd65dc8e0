"""Exact rational helpers and outward-rounded dyadic intervals.

Every inequality the package reports is decided either on exact integers or on
an interval whose endpoints provably bracket the real value.  Floating point is
never used to decide anything.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Callable, Optional, Union

Rational = Union[int, Fraction]

DEFAULT_PRECISION = 128
MAX_PRECISION = 1024


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"`` or a decimal literal such as ``"1.99"`` exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    text = str(value).strip()
    if "/" in text:
        num, den = text.split("/", 1)
        if not num.strip().lstrip("+-").isdigit() or not den.strip().isdigit():
            raise ValueError(f"not a rational: {value!r}")
        if int(den) == 0:
            raise ValueError(f"zero denominator: {value!r}")
        return Fraction(int(num), int(den))
    try:
        dec = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"not a rational: {value!r}") from None
    if not dec.is_finite():
        raise ValueError(f"not a rational: {value!r}")
    return Fraction(dec)


def format_rational(x: Fraction) -> str:
    """"p/q", or plain "p" for integers; round-trips through :func:`rational`."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- integer roots -----------------------------------------------------------

def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer."""
    if n < 0:
        raise ValueError("negative radicand")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    # Newton from above, starting at a power of two >= the root.
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def icbrt(n: int) -> int:
    return iroot(n, 3)


def floor_root(x: Fraction, k: int) -> int:
    """floor(x ** (1/k)) for rational x >= 0."""
    if x < 0:
        raise ValueError("negative radicand")
    return iroot(x.numerator // x.denominator, k)


def _floor_log2(x: Fraction) -> int:
    e = x.numerator.bit_length() - x.denominator.bit_length()
    if Fraction(2) ** e > x:
        e -= 1
    elif Fraction(2) ** (e + 1) <= x:
        e += 1
    return e


def root_bounds(x: Rational, k: int, precision: int = DEFAULT_PRECISION) -> tuple[Fraction, Fraction]:
    """Dyadic ``lo <= x**(1/k) <= hi`` with relative width at most 2**-precision."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative radicand")
    if x == 0:
        return Fraction(0), Fraction(0)
    num_root, den_root = iroot(x.numerator, k), iroot(x.denominator, k)
    if num_root ** k == x.numerator and den_root ** k == x.denominator:
        exact = Fraction(num_root, den_root)
        return exact, exact
    # choose s so that the scaled root is at least 2**(precision + 1)
    s = precision + 2 - _floor_log2(x) // k
    scaled = x * Fraction(2) ** (k * s)
    r = floor_root(scaled, k)
    scale = Fraction(2) ** s
    lo = Fraction(r) / scale
    hi = Fraction(r + 1) / scale
    return lo, hi


def sqrt_bounds(x: Rational, precision: int = DEFAULT_PRECISION) -> tuple[Fraction, Fraction]:
    """Rational ``lo, hi`` with ``lo**2 <= x <= hi**2`` and
    ``hi - lo <= 2**-precision * max(1, hi)``."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt of a negative number")
    return root_bounds(x, 2, precision)


def pow2_cuberoot_bounds(e: int, precision: int = DEFAULT_PRECISION) -> tuple[Fraction, Fraction]:
    """Enclosure of ``2 ** (e/3)`` for an integer exponent ``e``."""
    whole, rem = divmod(e, 3)
    base = Fraction(2) ** whole
    if rem == 0:
        return base, base
    lo, hi = root_bounds(Fraction(2) ** rem, 3, precision)
    return base * lo, base * hi


# -- comparisons against c * delta**(13/3) -----------------------------------

def cmp_pow_13_3(x: Rational, c: Rational, delta: int) -> Ordering:
    """Exact ordering of ``x`` against ``c * delta**(13/3)`` via cubing."""
    x, c = Fraction(x), Fraction(c)
    if x < 0 or c <= 0 or delta < 1:
        raise ValueError("need x >= 0, c > 0, delta >= 1")
    # x^3 vs c^3 * delta^13, cross-multiplied to integers
    lhs = x.numerator ** 3 * c.denominator ** 3
    rhs = c.numerator ** 3 * delta ** 13 * x.denominator ** 3
    return Ordering((lhs > rhs) - (lhs < rhs))


def floor_times_pow_13_3(c: Rational, delta: int, scale: int = 1) -> int:
    """floor(scale * c * delta**(13/3)) computed exactly."""
    c = Fraction(c)
    return floor_root(Fraction(scale) ** 3 * c ** 3 * delta ** 13, 3)


def pow_13_3_bounds(delta: int, precision: int = DEFAULT_PRECISION) -> tuple[Fraction, Fraction]:
    """Enclosure of ``delta ** (13/3)``."""
    return root_bounds(Fraction(delta) ** 13, 3, precision)


# -- decimal rendering -------------------------------------------------------

def decimal_render(x: Rational, places: int, mode: str = "truncate") -> str:
    """Render a rational with a fixed number of decimals.

    ``truncate`` drops digits toward zero, ``round`` rounds half away from zero,
    ``ceil`` rounds toward +infinity (an upper bound), ``floor`` toward -infinity.
    """
    if places < 0:
        raise ValueError("places must be >= 0")
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    scaled = abs(x) * 10 ** places
    if mode == "truncate":
        digits = scaled.numerator // scaled.denominator
    elif mode == "round":
        digits = (2 * scaled.numerator + scaled.denominator) // (2 * scaled.denominator)
    elif mode == "ceil":
        # toward +inf: up in magnitude for positives, down in magnitude for negatives
        if x < 0:
            digits = scaled.numerator // scaled.denominator
        else:
            digits = -((-scaled.numerator) // scaled.denominator)
    elif mode == "floor":
        if x < 0:
            digits = -((-scaled.numerator) // scaled.denominator)
        else:
            digits = scaled.numerator // scaled.denominator
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if digits == 0:
        sign = ""
    whole, frac = divmod(digits, 10 ** places)
    if places == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{places}d}"


def render_pow_13_3(c: Rational, delta: int, places: int = 3) -> str:
    """Truncated decimal rendering of ``c * delta**(13/3)`` (exact)."""
    digits = floor_times_pow_13_3(c, delta, 10 ** places)
    return decimal_render(Fraction(digits, 10 ** places), places)


# -- dyadic intervals ----------------------------------------------------------

def _round_dyadic(x: Fraction, precision: int, up: bool) -> Fraction:
    if x == 0:
        return x
    shift = precision - _floor_log2(abs(x)) - 1
    scaled = x * Fraction(2) ** shift
    q = -((-scaled.numerator) // scaled.denominator) if up else scaled.numerator // scaled.denominator
    return Fraction(q) / Fraction(2) ** shift


def _atanh_sum(t: Fraction, w: int) -> tuple[int, int]:
    """Bounds on 2**w * atanh(t) for 0 <= t <= 1/3, as integers."""
    if t == 0:
        return 0, 0
    one = 1 << w
    t_lo = (t.numerator << w) // t.denominator
    t_hi = -((-(t.numerator << w)) // t.denominator)
    t2 = t * t
    t2_lo = (t2.numerator << w) // t2.denominator
    t2_hi = -((-(t2.numerator << w)) // t2.denominator)
    p_lo, p_hi = t_lo, t_hi
    s_lo = s_hi = 0
    i = 0
    while p_hi > 1:
        s_lo += p_lo // (2 * i + 1)
        s_hi += -(-p_hi // (2 * i + 1))
        p_lo = (p_lo * t2_lo) // one
        p_hi = -(-(p_hi * t2_hi) // one)
        i += 1
    # geometric tail: sum_{j>=i} t^(2j+1)/(2j+1) <= t^(2i+1) / (1 - t^2) <= 9/8 * t^(2i+1)
    s_hi += -(-9 * p_hi // 8) + 1
    return s_lo, s_hi


def ln_bounds(x: Rational, precision: int = DEFAULT_PRECISION) -> tuple[Fraction, Fraction]:
    """Enclosure of the natural log of a positive rational."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of a nonpositive number")
    w = precision + 16 + max(0, abs(_floor_log2(x)).bit_length())
    e = _floor_log2(x)
    m = x / Fraction(2) ** e
    t = (m - 1) / (m + 1)
    m_lo, m_hi = _atanh_sum(t, w)
    l2_lo, l2_hi = _atanh_sum(Fraction(1, 3), w)
    scale = Fraction(1, 1 << w)
    ln2_lo, ln2_hi = 2 * l2_lo * scale, 2 * l2_hi * scale
    if e >= 0:
        lo = e * ln2_lo + 2 * m_lo * scale
        hi = e * ln2_hi + 2 * m_hi * scale
    else:
        lo = e * ln2_hi + 2 * m_lo * scale
        hi = e * ln2_lo + 2 * m_hi * scale
    return lo, hi


Operand = Union["DyadicInterval", int, Fraction]


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval with dyadic endpoints, rounded outward after every step."""

    lo: Fraction
    hi: Fraction
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def from_bounds(cls, lo: Rational, hi: Rational, precision: int = DEFAULT_PRECISION) -> "DyadicInterval":
        return cls(
            _round_dyadic(Fraction(lo), precision, up=False),
            _round_dyadic(Fraction(hi), precision, up=True),
            precision,
        )

    @classmethod
    def exact(cls, x: Rational, precision: int = DEFAULT_PRECISION) -> "DyadicInterval":
        return cls.from_bounds(x, x, precision)

    def _coerce(self, other: Operand) -> "DyadicInterval":
        if isinstance(other, DyadicInterval):
            return other
        return DyadicInterval.exact(Fraction(other), self.precision)

    def _make(self, lo: Fraction, hi: Fraction, other: Optional["DyadicInterval"] = None) -> "DyadicInterval":
        prec = self.precision if other is None else min(self.precision, other.precision)
        return DyadicInterval.from_bounds(lo, hi, prec)

    def __add__(self, other: Operand) -> "DyadicInterval":
        o = self._coerce(other)
        return self._make(self.lo + o.lo, self.hi + o.hi, o)

    __radd__ = __add__

    def __neg__(self) -> "DyadicInterval":
        return DyadicInterval(-self.hi, -self.lo, self.precision)

    def __sub__(self, other: Operand) -> "DyadicInterval":
        o = self._coerce(other)
        return self._make(self.lo - o.hi, self.hi - o.lo, o)

    def __rsub__(self, other: Operand) -> "DyadicInterval":
        return self._coerce(other) - self

    def __mul__(self, other: Operand) -> "DyadicInterval":
        o = self._coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return self._make(min(products), max(products), o)

    __rmul__ = __mul__

    def __truediv__(self, other: Operand) -> "DyadicInterval":
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        quotients = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return self._make(min(quotients), max(quotients), o)

    def __rtruediv__(self, other: Operand) -> "DyadicInterval":
        return self._coerce(other) / self

    def __pow__(self, k: int) -> "DyadicInterval":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        if k % 2 == 1 or self.lo >= 0:
            return self._make(min(self.lo ** k, self.hi ** k), max(self.lo ** k, self.hi ** k))
        if self.hi <= 0:
            return self._make(self.hi ** k, self.lo ** k)
        return self._make(Fraction(0), max(self.lo ** k, self.hi ** k))

    def root(self, k: int) -> "DyadicInterval":
        if self.lo < 0:
            raise ValueError("root of an interval with negative part")
        lo, _ = root_bounds(self.lo, k, self.precision + 4)
        _, hi = root_bounds(self.hi, k, self.precision + 4)
        return self._make(lo, hi)

    def sqrt(self) -> "DyadicInterval":
        return self.root(2)

    def cbrt(self) -> "DyadicInterval":
        return self.root(3)

    def log(self) -> "DyadicInterval":
        lo, _ = ln_bounds(self.lo, self.precision + 4)
        _, hi = ln_bounds(self.hi, self.precision + 4)
        return self._make(lo, hi)

    def log2(self) -> "DyadicInterval":
        return self.log() / DyadicInterval.exact(2, self.precision).log()

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Rational) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"DyadicInterval([{float(self.lo)!r}, {float(self.hi)!r}], prec={self.precision})"


def escalate(evaluate: Callable[[int], Optional[object]],
             start: int = DEFAULT_PRECISION, limit: int = MAX_PRECISION):
    """Call ``evaluate(precision)`` with doubling precision until it returns non-None."""
    precision = start
    while precision <= limit:
        result = evaluate(precision)
        if result is not None:
            return result
        precision *= 2
    return None

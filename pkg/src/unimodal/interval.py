"""Outward-rounded real intervals backed by MPFR (through gmpy2).

Every endpoint is produced by an MPFR operation under an explicit rounding
mode: lower endpoints round toward -inf, upper endpoints toward +inf.  MPFR
rounds each elementary operation (including exp, log, sqrt, cos, pi)
correctly, so the resulting interval always contains the exact real value.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq, mpz

DEFAULT_PREC = 128
GUARD_BITS = 64

Number = Union[int, Fraction, float, str]

# widest exponent range MPFR allows, so e^{2 pi sqrt(n/3)} stays finite for n ~ 10^20
_RANGE = dict(emax=gmpy2.get_emax_max(), emin=gmpy2.get_emin_min())


@lru_cache(maxsize=None)
def down(prec: int) -> gmpy2.context:
    """MPFR context rounding toward -inf at ``prec`` bits."""
    return gmpy2.context(precision=prec, round=gmpy2.RoundDown, **_RANGE)


@lru_cache(maxsize=None)
def up(prec: int) -> gmpy2.context:
    """MPFR context rounding toward +inf at ``prec`` bits."""
    return gmpy2.context(precision=prec, round=gmpy2.RoundUp, **_RANGE)


@lru_cache(maxsize=None)
def near(prec: int) -> gmpy2.context:
    return gmpy2.context(precision=prec, round=gmpy2.RoundToNearest, **_RANGE)


def _exact_to_mpq(value) -> mpq:
    if isinstance(value, (int, mpz)):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, mpq):
        return value
    if isinstance(value, float):
        return mpq(Fraction(value))
    if isinstance(value, str):
        return mpq(Fraction(value))
    raise TypeError(f"cannot convert {type(value).__name__} exactly")


def round_down(value, prec: int) -> mpfr:
    """Largest ``prec``-bit float <= value (value exact or mpfr)."""
    if not isinstance(value, type(mpfr(0))):
        value = _exact_to_mpq(value)
    with down(prec):
        return mpfr(value)


def round_up(value, prec: int) -> mpfr:
    """Smallest ``prec``-bit float >= value (value exact or mpfr)."""
    if not isinstance(value, type(mpfr(0))):
        value = _exact_to_mpq(value)
    with up(prec):
        return mpfr(value)


_MPFR = type(mpfr(0))


# Bare unary operators on mpfr round to the global (53-bit) context, so sign
# changes go through a context at the operand's own precision, where they are exact.
def decimal_str(x: mpfr, digits: int, upward: bool) -> str:
    """Scientific notation of x with ``digits`` significant digits, rounded
    toward +inf if ``upward`` else toward -inf (so printed bounds stay sound)."""
    if not gmpy2.is_finite(x):
        return str(x)
    if x == 0:
        return "0"
    ctx = up(x.precision) if upward else down(x.precision)
    with gmpy2.context(ctx):
        mant, exp, _ = x.digits(10, digits)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    frac = mant[1:].rstrip("0")
    return f"{sign}{mant[0]}{'.' + frac if frac else ''}e{exp - 1:+d}"


def _neg(x: mpfr) -> mpfr:
    return near(x.precision).minus(x)


def _abs(x: mpfr) -> mpfr:
    return near(x.precision).abs(x)


class IntervalReal:
    """Closed interval [lo, hi] with MPFR endpoints and nominal precision."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PREC):
        if hi is None:
            hi = lo
        self.prec = prec
        self.lo = lo if isinstance(lo, _MPFR) else round_down(lo, prec)
        self.hi = hi if isinstance(hi, _MPFR) else round_up(hi, prec)
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # -- construction helpers -------------------------------------------
    @classmethod
    def exact(cls, value: Number, prec: int = DEFAULT_PREC) -> "IntervalReal":
        return cls(value, value, prec)

    @classmethod
    def ball(cls, radius: "IntervalReal") -> "IntervalReal":
        """[-r, r] with r the upper endpoint of ``radius``."""
        r = radius.hi
        return cls(_neg(r), r, radius.prec)

    def _coerce(self, other) -> "IntervalReal":
        if isinstance(other, IntervalReal):
            return other
        return IntervalReal(other, other, self.prec)

    def _p(self, other: "IntervalReal") -> int:
        return max(self.prec, other.prec)

    # -- inspection -----------------------------------------------------
    def width(self) -> mpfr:
        return up(self.prec).sub(self.hi, self.lo)

    def mid(self) -> mpfr:
        c = near(self.prec + 2)
        return c.div(c.add(self.lo, self.hi), 2)

    def mag(self) -> mpfr:
        """Upper bound on |x| over the interval."""
        return max(_abs(self.lo), _abs(self.hi))

    def contains(self, value) -> bool:
        if isinstance(value, IntervalReal):
            return self.lo <= value.lo and value.hi <= self.hi
        if isinstance(value, _MPFR):
            return self.lo <= value <= self.hi
        q = _exact_to_mpq(value)
        return self.lo <= q <= self.hi

    def overlaps(self, other: "IntervalReal") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def is_nonnegative(self) -> bool:
        return self.lo >= 0

    def relative_width(self) -> mpfr:
        m = min(_abs(self.lo), _abs(self.hi))
        if m == 0:
            return gmpy2.inf()
        return up(self.prec).div(self.width(), m)

    def hull(self, other: "IntervalReal") -> "IntervalReal":
        other = self._coerce(other)
        return IntervalReal(min(self.lo, other.lo), max(self.hi, other.hi), self._p(other))

    def intersect(self, other: "IntervalReal") -> "IntervalReal":
        other = self._coerce(other)
        return IntervalReal(max(self.lo, other.lo), min(self.hi, other.hi), self._p(other))

    def with_prec(self, prec: int) -> "IntervalReal":
        return IntervalReal(round_down(self.lo, prec), round_up(self.hi, prec), prec)

    def __float__(self) -> float:
        return float(self.mid())

    def decimal_bounds(self, digits: int | None = None) -> tuple[str, str]:
        """Outward-rounded decimal strings for the two endpoints."""
        if digits is None:
            digits = max(6, int(self.prec * 0.30103))
        return decimal_str(self.lo, digits, False), decimal_str(self.hi, digits, True)

    def __repr__(self) -> str:
        lo, hi = self.decimal_bounds(min(20, max(6, int(self.prec * 0.30103))))
        return f"[{lo}, {hi}]"

    # -- arithmetic ------------------------------------------------------
    def __neg__(self) -> "IntervalReal":
        return IntervalReal(_neg(self.hi), _neg(self.lo), self.prec)

    def __add__(self, other) -> "IntervalReal":
        other = self._coerce(other)
        p = self._p(other)
        return IntervalReal(down(p).add(self.lo, other.lo), up(p).add(self.hi, other.hi), p)

    __radd__ = __add__

    def __sub__(self, other) -> "IntervalReal":
        other = self._coerce(other)
        p = self._p(other)
        return IntervalReal(down(p).sub(self.lo, other.hi), up(p).sub(self.hi, other.lo), p)

    def __rsub__(self, other) -> "IntervalReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "IntervalReal":
        other = self._coerce(other)
        p = self._p(other)
        d, u = down(p), up(p)
        a, b, c, e = self.lo, self.hi, other.lo, other.hi
        if a >= 0 and c >= 0:
            return IntervalReal(d.mul(a, c), u.mul(b, e), p)
        if a >= 0 and e <= 0:
            return IntervalReal(d.mul(b, c), u.mul(a, e), p)
        if b <= 0 and c >= 0:
            return IntervalReal(d.mul(a, e), u.mul(b, c), p)
        if b <= 0 and e <= 0:
            return IntervalReal(d.mul(b, e), u.mul(a, c), p)
        lo = min(d.mul(a, c), d.mul(a, e), d.mul(b, c), d.mul(b, e))
        hi = max(u.mul(a, c), u.mul(a, e), u.mul(b, c), u.mul(b, e))
        return IntervalReal(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "IntervalReal":
        other = self._coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        p = self._p(other)
        d, u = down(p), up(p)
        a, b, c, e = self.lo, self.hi, other.lo, other.hi
        lo = min(d.div(a, c), d.div(a, e), d.div(b, c), d.div(b, e))
        hi = max(u.div(a, c), u.div(a, e), u.div(b, c), u.div(b, e))
        return IntervalReal(lo, hi, p)

    def __rtruediv__(self, other) -> "IntervalReal":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "IntervalReal":
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return 1 / (self ** (-n))
        if n == 0:
            return IntervalReal(1, 1, self.prec)
        d, u = down(self.prec), up(self.prec)
        lo, hi = self.lo, self.hi
        if lo >= 0:
            return IntervalReal(d.pow(lo, n), u.pow(hi, n), self.prec)
        if n % 2 == 1:
            # odd powers are increasing; the rounding modes already point the right way
            return IntervalReal(d.pow(lo, n), u.pow(hi, n), self.prec)
        if hi <= 0:
            return IntervalReal(d.pow(_neg(hi), n), u.pow(_neg(lo), n), self.prec)
        return IntervalReal(mpfr(0), u.pow(max(_neg(lo), hi), n), self.prec)

    def __abs__(self) -> "IntervalReal":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return IntervalReal(mpfr(0), max(_neg(self.lo), self.hi), self.prec)

    # -- elementary functions -------------------------------------------
    def sqrt(self) -> "IntervalReal":
        if self.lo < 0:
            raise ValueError("sqrt of an interval with negative part")
        return IntervalReal(down(self.prec).sqrt(self.lo), up(self.prec).sqrt(self.hi), self.prec)

    def exp(self) -> "IntervalReal":
        return IntervalReal(down(self.prec).exp(self.lo), up(self.prec).exp(self.hi), self.prec)

    def log(self) -> "IntervalReal":
        if self.lo <= 0:
            raise ValueError("log of a nonpositive interval")
        return IntervalReal(down(self.prec).log(self.lo), up(self.prec).log(self.hi), self.prec)

    def sinh(self) -> "IntervalReal":
        return IntervalReal(down(self.prec).sinh(self.lo), up(self.prec).sinh(self.hi), self.prec)

    def cosh(self) -> "IntervalReal":
        d, u = down(self.prec), up(self.prec)
        if self.lo >= 0:
            return IntervalReal(d.cosh(self.lo), u.cosh(self.hi), self.prec)
        if self.hi <= 0:
            return IntervalReal(d.cosh(self.hi), u.cosh(self.lo), self.prec)
        return IntervalReal(mpfr(1), u.cosh(max(_neg(self.lo), self.hi)), self.prec)

    def root(self, k: int) -> "IntervalReal":
        if self.lo < 0:
            raise ValueError("root of an interval with negative part")
        return IntervalReal(down(self.prec).rootn(self.lo, k), up(self.prec).rootn(self.hi, k), self.prec)

    def _lipschitz(self, fname: str) -> "IntervalReal":
        # |f'| <= 1 for sin and cos, so f(x) lies within radius of f(mid)
        d, u = down(self.prec), up(self.prec)
        m = self.mid()
        r = max(u.sub(self.hi, m), u.sub(m, self.lo))
        lo = d.sub(getattr(d, fname)(m), r)
        hi = u.add(getattr(u, fname)(m), r)
        return IntervalReal(max(lo, mpfr(-1)), min(hi, mpfr(1)), self.prec)

    def cos(self) -> "IntervalReal":
        return self._lipschitz("cos")

    def sin(self) -> "IntervalReal":
        return self._lipschitz("sin")


# -- constants ---------------------------------------------------------------

@lru_cache(maxsize=None)
def pi(prec: int = DEFAULT_PREC) -> IntervalReal:
    wp = prec + GUARD_BITS
    return IntervalReal(down(wp).const_pi(), up(wp).const_pi(), prec).with_prec(prec)


@lru_cache(maxsize=None)
def sqrt_pi(prec: int = DEFAULT_PREC) -> IntervalReal:
    return pi(prec + GUARD_BITS).sqrt().with_prec(prec)


@lru_cache(maxsize=None)
def sqrt_int(n: int, prec: int = DEFAULT_PREC) -> IntervalReal:
    return IntervalReal.exact(n, prec).sqrt()


@lru_cache(maxsize=None)
def log_int(n: int, prec: int = DEFAULT_PREC) -> IntervalReal:
    return IntervalReal.exact(n, prec).log()


def hull_all(items) -> IntervalReal:
    items = list(items)
    out = items[0]
    for it in items[1:]:
        out = out.hull(it)
    return out

"""Dedekind sums and the eta multiplier, with the two Kloosterman-type sums built on them.

Phases are exact rationals (multiples of 2 pi) until the very last step,
where each term is turned into a cos/sin enclosure once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpfr

from .interval import DEFAULT_PREC, IntervalReal, down, pi, up


@dataclass(frozen=True)
class ComplexEnclosure:
    re: IntervalReal
    im: IntervalReal

    def __add__(self, other: "ComplexEnclosure") -> "ComplexEnclosure":
        return ComplexEnclosure(self.re + other.re, self.im + other.im)

    def abs2(self) -> IntervalReal:
        return self.re**2 + self.im**2

    def contains(self, z: complex) -> bool:
        return self.re.contains(Fraction(z.real)) and self.im.contains(Fraction(z.imag))

    def __repr__(self) -> str:
        return f"{self.re} + i{self.im}"


def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) via the reciprocity law and the Euclidean algorithm.

    h may be any integer coprime to k; s depends only on h mod k.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if math.gcd(h, k) != 1:
        raise ValueError(f"gcd({h}, {k}) != 1")
    h %= k
    total = Fraction(0)
    sign = 1
    # s(h,k) + s(k,h) = (h^2 + k^2 + 1)/(12hk) - 1/4
    while h != 0:
        total += sign * (Fraction(h * h + k * k + 1, 12 * h * k) - Fraction(1, 4))
        sign = -sign
        h, k = k % h, h
    return total


@lru_cache(maxsize=4096)
def dedekind_row(k: int) -> tuple[tuple[int, int, Fraction], ...]:
    """(h, h^{-1} mod k, s(h,k)) for all 0 <= h < k coprime to k."""
    if k == 1:
        return ((0, 0, Fraction(0)),)
    out = []
    for h in range(1, k):
        if math.gcd(h, k) == 1:
            out.append((h, pow(h, -1, k), dedekind_sum(h, k)))
    return tuple(out)


def _unit(theta: Fraction, prec: int) -> tuple[IntervalReal, IntervalReal]:
    """cos and sin of 2 pi theta."""
    theta -= math.floor(theta)
    if theta == 0:
        one = IntervalReal.exact(1, prec)
        return one, IntervalReal.exact(0, prec)
    if theta == Fraction(1, 2):
        return IntervalReal.exact(-1, prec), IntervalReal.exact(0, prec)
    x = 2 * pi(prec + 16) * theta
    return x.cos().with_prec(prec), x.sin().with_prec(prec)


def _sum_phases(phases, prec: int) -> ComplexEnclosure:
    wp = prec + 16
    re = IntervalReal.exact(0, wp)
    im = IntervalReal.exact(0, wp)
    for th in phases:
        c, s = _unit(th, wp)
        re = re + c
        im = im + s
    return ComplexEnclosure(re.with_prec(prec), im.with_prec(prec))


def kloosterman_p2(k: int, n: int, m: int, prec: int = DEFAULT_PREC) -> ComplexEnclosure:
    """A_k(n, m) = sum_h exp(2 pi i s(h,k) + 2 pi i (n h + m h')/k), h h' = 1 mod k."""
    if k < 1:
        raise ValueError("k must be positive")
    phases = (s + Fraction(n * h + m * hinv, k) for h, hinv, s in dedekind_row(k))
    return _sum_phases(phases, prec)


@lru_cache(maxsize=256)
def _cos_table(k: int, prec: int) -> tuple[tuple, ...]:
    """Endpoints of cos(2 pi j/(6k)) for 0 <= j < 6k."""
    out = []
    for j in range(6 * k):
        c, _ = _unit(Fraction(j, 6 * k), prec)
        out.append((c.lo, c.hi))
    return tuple(out)


@lru_cache(maxsize=None)
def kloosterman_p2_real(k: int, residue: int, prec: int = DEFAULT_PREC) -> IntervalReal:
    """Real enclosure of A_k(n, 0) for n = residue (mod k).

    The sum is real: h and k - h give conjugate terms, so only the cosines
    are accumulated.  Since 6k s(h,k) is an integer every phase is j/(6k),
    and the cosines come from a per-k table.
    """
    residue %= k
    wp = prec + 16
    table = _cos_table(k, wp)
    d, u = down(wp), up(wp)
    lo = hi = mpfr(0)
    six_k = 6 * k
    for h, _, s in dedekind_row(k):
        j = (int(s * six_k) + 6 * residue * h) % six_k
        c_lo, c_hi = table[j]
        lo = d.add(lo, c_lo)
        hi = u.add(hi, c_hi)
    return IntervalReal(lo, hi, wp).with_prec(prec)


def eta_multiplier(a: int, b: int, c: int, d: int) -> Fraction:
    """Phase theta in [0, 1) with nu_eta(M) = exp(2 pi i theta), M = [[a, b], [c, d]].

    For c > 0 this is (a + d)/(24c) - s(d, c)/2 - 1/8: the Dedekind-sum form of
    eta(M tau) = nu_eta(M) (c tau + d)^(1/2) eta(tau).  For c = 0, d = 1 it is b/24.
    """
    if a * d - b * c != 1:
        raise ValueError("matrix must have determinant 1")
    if c == 0:
        if d != 1:
            raise ValueError("only c = 0 with d = 1 is supported")
        theta = Fraction(b, 24)
    elif c > 0:
        theta = Fraction(a + d, 24 * c) - dedekind_sum(d, c) / 2 - Fraction(1, 8)
    else:
        raise ValueError("c must be nonnegative")
    return theta - math.floor(theta)


def h_prime(h: int, k: int) -> int:
    """The lift in [0, k) of the solution of h h' = -1 (mod k)."""
    if k == 1:
        return 0
    return (-pow(h, -1, k)) % k


def eta_multiplier_phase(h: int, k: int, hp: int | None = None) -> Fraction:
    """Phase of nu_eta(M_{h,k}), M_{h,k} = [[h', -(h h' + 1)/k], [k, -h]]."""
    if k < 1:
        raise ValueError("k must be positive")
    if math.gcd(h, k) != 1:
        raise ValueError(f"gcd({h}, {k}) != 1")
    if hp is None:
        hp = h_prime(h, k)
    if (h * hp + 1) % k:
        raise ValueError("h' must solve h h' = -1 mod k")
    return eta_multiplier(hp, -(h * hp + 1) // k, k, -h)


def kloosterman_u_phases(k: int, n: int, r: int) -> list[Fraction]:
    """Phases of the summands of K_k(n, r), including the prefactor.

    Changing the lift h' -> h' + k shifts the multiplier phase by 1/24 and the
    root-of-unity phase by (12r^2 + 12r + 1)/24; the difference r(r+1)/2 is an
    integer, so the sum does not depend on the lift.
    """
    out = []
    base = Fraction(3, 8) + Fraction(r, 2)
    a = 12 * r * r + 12 * r + 1
    for h in range(k):
        if math.gcd(h, k) != 1:
            continue
        hp = h_prime(h, k)
        nu = eta_multiplier_phase(h, k, hp)
        out.append(base - nu + Fraction(-(24 * n + 1) * h + a * hp, 24 * k))
    return out


def kloosterman_u(k: int, n: int, r: int, prec: int = DEFAULT_PREC) -> ComplexEnclosure:
    """K_k(n, r) = e^{3 pi i/4} (-1)^r sum_h nu_eta(M_{h,k})^{-1} zeta_{24k}^{-(24n+1)h + (12r^2+12r+1)h'}."""
    if k < 1:
        raise ValueError("k must be positive")
    val = _sum_phases(kloosterman_u_phases(k, n, r), prec)
    if val.abs2().lo > k * k:
        raise AssertionError(f"|K_{k}({n},{r})| exceeds {k}: multiplier convention broken")
    return val

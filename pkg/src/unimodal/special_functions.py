"""Special-function kernel: Bessel I enclosures, Bernoulli numbers, Gamma at
half integers, the cotangent-kernel Taylor coefficients and zeta(3/2).

All real-valued results are ``IntervalReal`` enclosures.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpfr

from .interval import DEFAULT_PREC, IntervalReal, down, pi, sqrt_pi, up

__all__ = [
    "IntervalReal",
    "bernoulli",
    "binom",
    "gamma_half_integer",
    "gamma_half_integer_coeff",
    "bessel_I",
    "bessel_I2_bounds",
    "bessel_I32_closed",
    "bessel_bound",
    "phi_coeff",
    "zeta",
    "zeta_three_halves",
]


def binom(a, k: int) -> Fraction:
    """Generalized binomial coefficient a(a-1)...(a-k+1)/k! for rational a."""
    if k < 0:
        return Fraction(0)
    a = Fraction(a)
    out = Fraction(1)
    for i in range(k):
        out = out * (a - i) / (i + 1)
    return out


# -- Bernoulli numbers ---------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]


def _extend_bernoulli(n: int) -> None:
    # sum_{k=0}^{m} binom(m+1, k) B_k = 0  for m >= 1
    while len(_BERNOULLI) <= n:
        m = len(_BERNOULLI)
        acc = Fraction(0)
        c = 1  # binom(m+1, 0)
        for k in range(m):
            acc += c * _BERNOULLI[k]
            c = c * (m + 1 - k) // (k + 1)
        _BERNOULLI.append(-acc / (m + 1))


def bernoulli(two_m: int) -> Fraction:
    """Exact Bernoulli number B_{two_m} (B_1 = -1/2 convention)."""
    if two_m < 0:
        raise ValueError("index must be nonnegative")
    if two_m > 1 and two_m % 2 == 1:
        raise ValueError("odd Bernoulli numbers above index 1 vanish; even index expected")
    _extend_bernoulli(two_m)
    return _BERNOULLI[two_m]


# -- Gamma at half integers ------------------------------------------------------

def gamma_half_integer_coeff(m: int) -> Fraction:
    """Rational r with Gamma(m + 1/2) = r * sqrt(pi)."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return Fraction(math.factorial(m) * math.comb(2 * m, m), 4**m)


def gamma_half_integer(m: int, prec: int = DEFAULT_PREC) -> IntervalReal:
    return sqrt_pi(prec) * gamma_half_integer_coeff(m)


def _gamma_kappa_plus_one(kappa: Fraction, prec: int) -> IntervalReal:
    if kappa.denominator == 1:
        return IntervalReal.exact(math.factorial(int(kappa) ), prec)
    if kappa.denominator == 2:
        # Gamma(kappa + 1) = Gamma(j + 1/2) with j = kappa + 1/2
        return gamma_half_integer(int(kappa + Fraction(1, 2)), prec)
    raise ValueError("kappa must be an integer or a half integer")


# -- Bessel I --------------------------------------------------------------------

def _series_endpoint(kappa: Fraction, x: mpfr, prec: int, upper: bool) -> mpfr:
    """Ascending series of I_kappa at a point, rounded in one direction.

    The lower endpoint drops the (positive) tail; the upper one adds a
    geometric bound for it.
    """
    ctx = up(prec) if upper else down(prec)
    a, b = kappa.numerator, kappa.denominator
    half = ctx.div(x, 2)
    q = ctx.mul(half, half)
    qb = ctx.mul(q, b)
    # first term (x/2)^kappa / Gamma(kappa + 1)
    gam = _gamma_kappa_plus_one(kappa, prec + 16)
    if b == 1:
        t = ctx.div(ctx.pow(half, a), gam.lo if upper else gam.hi)
    else:
        j = (a - 1) // 2
        t = ctx.mul(ctx.pow(half, j), ctx.sqrt(half))
        t = ctx.div(t, gam.lo if upper else gam.hi)
    s = t
    threshold = prec + 8
    qbf = float(qb)
    m = 0
    while True:
        # t_{m+1}/t_m = q / ((m+1)(m+kappa+1)) = q*b / ((m+1)(b(m+1)+a))
        t = ctx.div(ctx.mul(t, qb), (m + 1) * (b * (m + 1) + a))
        m += 1
        if t == 0:
            return s
        # here s = sum_{i<m} t_i; later ratios are at most r (they decrease in m)
        den = (m + 1) * (b * (m + 1) + a)
        if den > qbf and t < ctx.mul_2exp(s, -threshold):
            r = up(prec).div(qb, den)
            if r < 1:
                if not upper:
                    return ctx.add(s, t)
                return ctx.add(s, up(prec).div(t, down(prec).sub(1, r)))
        s = ctx.add(s, t)


def bessel_I(kappa, x, prec: int = DEFAULT_PREC) -> IntervalReal:
    """Enclosure of I_kappa(x) for integer or half-integer kappa >= 0, x > 0."""
    kappa = Fraction(kappa)
    if kappa < 0 or kappa.denominator not in (1, 2):
        raise ValueError("kappa must be a nonnegative integer or half integer")
    if not isinstance(x, IntervalReal):
        x = IntervalReal.exact(x, prec)
    if x.lo <= 0:
        raise ValueError("x must be positive")
    wp = prec + 32
    lo = _series_endpoint(kappa, x.lo, wp, upper=False)
    hi = _series_endpoint(kappa, x.hi, wp, upper=True)
    return IntervalReal(lo, hi, wp).with_prec(prec)


def bessel_I2_bounds(xlo: mpfr, xhi: mpfr, wp: int) -> tuple[mpfr, mpfr]:
    """Lower bound of I_2(xlo) and upper bound of I_2(xhi), 0 < xlo <= xhi.

    One ascending series is summed at xhi with upward rounding.  Every term is
    positive and picks up at most a factor (1 + u)^4, u = 2^(1 - wp), per index,
    so the exact K-term partial sum S_K(xhi) is at least s / (1 + u)^(4K + 8).
    Term m scales like x^(2m + 2), hence S_K(xlo) >= (xlo/xhi)^(2K) S_K(xhi),
    and I_2(xlo) >= S_K(xlo) as the dropped tail is positive.
    """
    u_ctx, d_ctx = up(wp), down(wp)
    mul, div, add = u_ctx.mul, u_ctx.div, u_ctx.add
    half = div(xhi, 2)
    q = mul(half, half)
    t = div(q, 2)  # (x/2)^2 / Gamma(3)
    s = t
    qf = float(q)
    tail = mpfr(0)
    thr = None
    m = 0
    while True:
        m += 1
        t = div(mul(t, q), m * (m + 2))
        if t == 0:
            break
        den = (m + 1) * (m + 3)
        if den > qf:
            # s only grows, so a stale threshold is smaller and still safe
            if thr is None or m % 32 == 0:
                thr = u_ctx.mul_2exp(s, -(wp + 8))
            if t < thr:
                r = div(q, den)
                if r < 1:
                    # terms from index m on are at most t r^i
                    tail = div(t, d_ctx.sub(1, r))
                    break
        s = add(s, t)
    K = m  # s holds terms 0..m-1
    unit = u_ctx.mul_2exp(mpfr(1), 1 - wp)
    shrink = d_ctx.sub(1, u_ctx.mul(4 * K + 8, unit))
    if xlo != xhi:
        gap = u_ctx.div(u_ctx.sub(xhi, xlo), xhi)
        shrink = d_ctx.mul(shrink, d_ctx.sub(1, u_ctx.mul(2 * K, gap)))
    if shrink <= 0:
        raise ArithmeticError("precision too low for the I_2 series")
    return d_ctx.mul(s, shrink), add(s, tail)


def bessel_I32_closed(w, prec: int = DEFAULT_PREC) -> IntervalReal:
    """I_{3/2}(w) = ((1 - 1/w) e^w + (1 + 1/w) e^{-w}) / sqrt(2 pi w)."""
    if not isinstance(w, IntervalReal):
        w = IntervalReal.exact(w, prec)
    inv = 1 / w
    body = (1 - inv) * w.exp() + (1 + inv) * (-w).exp()
    return body / (2 * pi(prec) * w).sqrt()


def bessel_bound(kappa, x, prec: int = DEFAULT_PREC) -> IntervalReal:
    """Upper bound for I_kappa(x): sqrt(2/(pi x)) e^x for x >= 1, and
    2^(1-kappa) x^kappa / Gamma(kappa+1) for 0 <= x < 1."""
    kappa = Fraction(kappa)
    if not isinstance(x, IntervalReal):
        x = IntervalReal.exact(x, prec)
    if x.lo >= 1:
        return (2 / (pi(prec) * x)).sqrt() * x.exp()
    if x.hi < 1:
        gam = _gamma_kappa_plus_one(kappa, prec)
        if kappa.denominator == 1:
            xk = x ** int(kappa)
        else:
            xk = x ** int(kappa - Fraction(1, 2)) * x.sqrt()
        # 2^(1-kappa) written as 2 * 2^(-kappa)
        two_pow = IntervalReal.exact(2, prec) ** int(kappa.numerator)
        if kappa.denominator == 2:
            two_pow = two_pow.sqrt()
        return 2 * xk / (two_pow * gam)
    raise ValueError("x interval straddles 1; split it first")


# -- cotangent kernel ------------------------------------------------------------

@lru_cache(maxsize=None)
def _phi_rational_terms(ell: int, m_max: int) -> tuple[Fraction, ...]:
    """Rational parts r_m of c(2 ell, m) = r_m * pi^(2m-1), m = ell+1..m_max."""
    out = []
    for m in range(ell + 1, m_max + 1):
        b = bernoulli(2 * m)
        r = Fraction((-4) ** m) * b / math.factorial(2 * m)
        r = r * math.comb(2 * m - 1, 2 * ell) / Fraction(4) ** (2 * m - 1)
        out.append(r)
    return tuple(out)


def _phi_tail_start(ell: int, prec: int) -> int:
    # |c(2l, m)| <= (4 pi / 3) 16^-m binom(2m-1, 2l): pick m0 with tail below 2^-(prec+8)
    m0 = ell + 2
    while True:
        rho = Fraction((2 * m0 + 1) * (2 * m0), 16 * (2 * m0 + 1 - 2 * ell) * (2 * m0 - 2 * ell))
        if rho < 1:
            bound = Fraction(43, 10) * math.comb(2 * m0 - 1, 2 * ell) / Fraction(16) ** m0 / (1 - rho)
            if bound < Fraction(1, 2 ** (prec + 8)):
                return m0
        m0 += 1


def phi_coeff(ell: int, prec: int = DEFAULT_PREC) -> IntervalReal:
    """Enclosure of the even Taylor coefficient phi^(2 ell)(0)/(2 ell)! of
    phi(x) = cot(pi/2 (x/sqrt 6 + 1/2)).

    Uses the expansion (4/pi)(2/3)^l + (2/3)^l sum_{m > l} c(2l, m) with the
    m-tail bounded through zeta(2m) <= zeta(2).
    """
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    wp = prec + 32
    p = pi(wp)
    m0 = _phi_tail_start(ell, wp)
    terms = _phi_rational_terms(ell, m0 - 1)
    total = 4 / p
    p2 = p * p
    power = p ** (2 * ell + 1)  # pi^(2m-1) at m = ell+1
    for r in terms:
        total = total + power * r
        power = power * p2
    # tail sum_{m >= m0} |c| <= (4 pi/3) 16^-m0 binom(2 m0 - 1, 2 l) / (1 - rho)
    rho = Fraction((2 * m0 + 1) * (2 * m0), 16 * (2 * m0 + 1 - 2 * ell) * (2 * m0 - 2 * ell))
    tail = (4 * p / 3) * (Fraction(math.comb(2 * m0 - 1, 2 * ell), 16**m0) / (1 - rho))
    total = total + IntervalReal.ball(tail)
    return (total * Fraction(2, 3) ** ell).with_prec(prec)


# -- zeta via Euler-Maclaurin ----------------------------------------------------

def _rising(s: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out *= s + i
    return out


@lru_cache(maxsize=None)
def zeta(s: Fraction, prec: int = DEFAULT_PREC) -> IntervalReal:
    """zeta(s) for rational s > 1 by Euler-Maclaurin summation.

    zeta(s) = sum_{k<N} k^-s + N^(1-s)/(s-1) + N^-s/2
              + sum_{j=1}^{M} B_2j/(2j)! (s)_{2j-1} N^(-s-2j+1) + R
    with |R| <= 4 |(s)_{2M}| / (2 pi)^{2M} * N^(1-s-2M) / (s + 2M - 1).
    """
    s = Fraction(s)
    if s <= 1:
        raise ValueError("s must exceed 1")
    wp = prec + 32
    n_cut = max(16, prec // 3)
    m_terms = max(8, prec // 4)

    def npow(k: int, e: Fraction) -> IntervalReal:
        # k^e for rational e, via exp(e log k)
        if k == 1:
            return IntervalReal.exact(1, wp)
        return (IntervalReal.exact(k, wp).log() * e).exp()

    total = IntervalReal.exact(0, wp)
    for k in range(1, n_cut):
        total = total + npow(k, -s)
    n_pow = npow(n_cut, -s)
    total = total + n_pow * Fraction(n_cut) / (s - 1) + n_pow / 2
    n_inv2 = IntervalReal.exact(Fraction(1, n_cut * n_cut), wp)
    term_pow = n_pow / n_cut  # N^(-s-1)
    for j in range(1, m_terms + 1):
        coeff = bernoulli(2 * j) / math.factorial(2 * j) * _rising(s, 2 * j - 1)
        total = total + term_pow * coeff
        term_pow = term_pow * n_inv2
    # remainder, with term_pow now N^(-s-2M-1)
    two_pi = 2 * pi(wp)
    rem = 4 * abs(_rising(s, 2 * m_terms)) / two_pi ** (2 * m_terms)
    rem = rem * (term_pow * n_cut * n_cut) / (s + 2 * m_terms - 1)
    total = total + IntervalReal.ball(rem)
    return total.with_prec(prec)


def zeta_three_halves(prec: int = DEFAULT_PREC) -> IntervalReal:
    return zeta(Fraction(3, 2), prec)

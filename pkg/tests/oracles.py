"""Independent reference computations for the tests.

Each oracle takes a different route from the library: plain integer power
series, definitions instead of reciprocity, floating complex exponentials,
mpmath special functions, and a generating-series derivation of the shifted
coefficients.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import mpmath


# -- counting --------------------------------------------------------------------------

def u_naive(n_max: int) -> list[int]:
    """Coefficients of sum_{j>=0} (-1)^j q^{j(j+1)/2} / (q; q)_inf^2 by schoolbook
    division by each (1 - q^k) twice."""
    series = [0] * (n_max + 1)
    j = 0
    while j * (j + 1) // 2 <= n_max:
        series[j * (j + 1) // 2] += (-1) ** j
        j += 1
    for k in range(1, n_max + 1):
        for _ in range(2):
            for i in range(k, n_max + 1):
                series[i] += series[i - k]
    return series


def p2_naive(n_max: int) -> list[int]:
    series = [1] + [0] * n_max
    for k in range(1, n_max + 1):
        for _ in range(2):
            for i in range(k, n_max + 1):
                series[i] += series[i - k]
    return series


def turan_f(u, n: int) -> int:
    a, b, c, d = u[n - 1], u[n], u[n + 1], u[n + 2]
    return 4 * (b * b - a * c) * (c * c - b * d) - (b * c - a * d) ** 2


# -- modular sums ----------------------------------------------------------------------

def sawtooth(x: Fraction) -> Fraction:
    if x.denominator == 1:
        return Fraction(0)
    return x - math.floor(x) - Fraction(1, 2)


def dedekind_by_definition(h: int, k: int) -> Fraction:
    return sum((sawtooth(Fraction(r, k)) * sawtooth(Fraction(h * r, k)) for r in range(1, k)), Fraction(0))


def kloosterman_p2_float(k: int, n: int, m: int) -> complex:
    total = 0j
    for h in range(k):
        if math.gcd(h, k) != 1:
            continue
        hinv = pow(h, -1, k) if k > 1 else 0
        phase = float(dedekind_by_definition(h, k)) + (n * h + m * hinv) / k
        total += cmath.exp(2j * math.pi * phase)
    return total


def eta_multiplier_numeric(a: int, b: int, c: int, d: int, tau=mpmath.mpc("0.137", "0.71")) -> mpmath.mpc:
    """eta(M tau) / (sqrt(c tau + d) eta(tau)) evaluated with q-Pochhammer products."""

    def eta(t):
        q = mpmath.exp(2j * mpmath.pi * t)
        return mpmath.exp(2j * mpmath.pi * t / 24) * mpmath.qp(q)

    mt = (a * tau + b) / (c * tau + d)
    return eta(mt) / (mpmath.sqrt(c * tau + d) * eta(tau))


# -- coefficients ----------------------------------------------------------------------

def form_value(terms, dps: int = 80) -> mpmath.mpf:
    """sum p/q * 3^(a/2) * pi^(b/2)."""
    with mpmath.workdps(dps):
        return mpmath.fsum(
            mpmath.mpf(p) / q * mpmath.sqrt(3) ** a * mpmath.pi ** (mpmath.mpf(b) / 2) for p, q, a, b in terms
        )


def normalized_value(terms, dps: int = 80) -> mpmath.mpf:
    """sum p/q * 3^(c/4) * pi^e."""
    with mpmath.workdps(dps):
        return mpmath.fsum(mpmath.mpf(p) / q * mpmath.mpf(3) ** (mpmath.mpf(c) / 4) * mpmath.pi**e for p, q, c, e in terms)


def shifted_from_base(A: list, s: int, dps: int = 80) -> list:
    """A_s(m) from A(m) by expanding u(n + s) in powers of z = n^{-1/2}.

    With n + s = n (1 + s z^2): the exponential contributes
    exp((2 pi/sqrt 3) sum_{k>=1} binom(1/2, k) s^k z^{2k-1}), the power
    n^{-5/4} contributes (1 + s z^2)^{-5/4} and each A(m) (n+s)^{-m/2}
    contributes A(m) z^m (1 + s z^2)^{-m/2}.
    """
    K = len(A)
    with mpmath.workdps(dps):

        def mul(x, y):
            return [mpmath.fsum(x[i] * y[k - i] for i in range(k + 1)) for k in range(K)]

        def exp_series(x):
            out = [mpmath.mpf(1)] + [mpmath.mpf(0)] * (K - 1)
            term = list(out)
            for j in range(1, K):
                term = [t / j for t in mul(term, x)]
                out = [p + q for p, q in zip(out, term)]
            return out

        def power(alpha):
            c = [mpmath.mpf(0)] * K
            for k in range(K):
                if 2 * k < K:
                    c[2 * k] = mpmath.binomial(alpha, k) * mpmath.mpf(s) ** k
            return c

        ex = [mpmath.mpf(0)] * K
        for k in range(1, K):
            if 2 * k - 1 < K:
                ex[2 * k - 1] = 2 * mpmath.pi / mpmath.sqrt(3) * mpmath.binomial(mpmath.mpf(1) / 2, k) * mpmath.mpf(s) ** k
        tot = [mpmath.mpf(0)] * K
        for m in range(K):
            sh = [mpmath.mpf(0)] * m + power(-mpmath.mpf(m) / 2)[: K - m]
            tot = [x + A[m] * y for x, y in zip(tot, sh)]
        return mul(mul(exp_series(ex), power(-mpmath.mpf(5) / 4)), tot)


def to_mpf(x) -> mpmath.mpf:
    p, q = x.as_integer_ratio()
    return mpmath.mpf(p) / q


def close_to(interval, value, rel: float, dps: int = 80) -> bool:
    """value lies in the interval widened by rel * |value| on each side."""
    with mpmath.workdps(dps):
        tol = rel * abs(value)
        return to_mpf(interval.lo) - tol <= value <= to_mpf(interval.hi) + tol

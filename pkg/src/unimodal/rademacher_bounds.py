"""Certified enclosures of p2(n) and u(n) from the truncated exact formula
for p2, the Turan/log-concavity/convexity certificates built on them, and a
numerical probe of the Bessel-integral exact formula for u(n).

Two parameters control an enclosure of u(n): how many Kloosterman terms of
the p2 formula are kept (the Bessel cut) and how many triangular-number terms
of u(n) = sum_m (-1)^m p2(n - T_m) are kept (the triangular cut).  With
``reading="table"`` the pair (L, M) means Bessel cut L and triangular sums up
to m = 2M + 1; with ``reading="literal"`` it means Bessel cut M and sums up to
m = 2L + 1.  Both are sound; only the first certifies the default
parameter schedule (see README).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import mpmath

from .exact_counts import default_cache, triangular
from .interval import DEFAULT_PREC, IntervalReal, down, pi, round_down, round_up, sqrt_int, up
from .modular_sums import kloosterman_p2_real, kloosterman_u
from .special_functions import bessel_I2_bounds

EXACT_THRESHOLD = 1000
READINGS = ("table", "literal")


@dataclass(frozen=True)
class Enclosure:
    """Certified lower.lo <= value <= upper.hi for p2(n) or u(n)."""

    target: str  # "P2" or "U"
    n: int
    lower: IntervalReal
    upper: IntervalReal
    provenance: str

    def __post_init__(self):
        if self.lower.lo > self.upper.hi:
            raise AssertionError(f"empty enclosure for {self.target}({self.n})")

    @property
    def lo(self):
        return self.lower.lo

    @property
    def hi(self):
        return self.upper.hi

    def contains(self, value: int) -> bool:
        return self.lower.lo <= value <= self.upper.hi

    def width(self):
        return up(max(self.lower.prec, self.upper.prec)).sub(self.upper.hi, self.lower.lo)

    def as_dict(self, digits: int = 30) -> dict:
        return {
            "target": self.target,
            "n": self.n,
            "lower": self.lower.decimal_bounds(digits)[0],
            "upper": self.upper.decimal_bounds(digits)[1],
            "provenance": self.provenance,
        }


def _exact(target: str, n: int, value: int, prec: int) -> Enclosure:
    iv = IntervalReal.exact(value, prec)
    return Enclosure(target, n, iv, iv, "exact-table")


# -- p2 -----------------------------------------------------------------------------------

def _bessel_arg(n: int, prec: int) -> IntervalReal:
    """X = pi sqrt(12n - 1) / 3."""
    return pi(prec) * sqrt_int(12 * n - 1, prec) / 3


def tail_f(M: int, n: int, prec: int = DEFAULT_PREC) -> IntervalReal:
    """f_M(n) = pi^5/108 + [M <= X - 1] 2 sqrt(6(M+1)) (X - M) e^{X/(M+1)} / (12n-1)^{5/4}.

    When the indicator cannot be decided at this precision the second term is
    kept, which only enlarges the bound (X - M > 0 near the boundary).
    """
    if M < 0 or n < 1:
        raise ValueError("need M >= 0 and n >= 1")
    wp = prec + 32
    base = pi(wp) ** 5 / 108
    X = _bessel_arg(n, wp)
    if X.hi - 1 < M:
        return base.with_prec(prec)
    extra = (
        sqrt_int(6 * (M + 1), wp)
        * 2
        * (X - M)
        * (X / (M + 1)).exp()
        / IntervalReal.exact(12 * n - 1, wp).root(4) ** 5
    )
    return (base + extra).with_prec(prec)


def p2_main_sum(M: int, n: int, prec: int = DEFAULT_PREC) -> IntervalReal:
    """(2 pi/(12n-1)) sum_{k<=M} A_k(n,0)/k I_2(X/k), outward rounded.

    The Kloosterman sums enter with the phase s(h,k) - nh/k: with +nh/k the
    enclosures miss p2(n) whenever 3 does not divide n, so the p2 formula is
    evaluated at residue -n mod k.

    Term k is at most |A_k| e^{X/k}/k (I_2(x) <= e^x).  Once that bound drops
    below 2^-(wp+8) of the k = 1 term, the term enters as a ball of that
    radius instead of being summed; this widens the enclosure by less than
    the working-precision rounding and skips the long Bessel series.
    """
    if n < 1:
        raise ValueError("n must be positive")
    wp = prec + 32
    X = _bessel_arg(n, wp)
    d, u = down(wp), up(wp)
    lo = hi = gmpy2.mpfr(0)
    floor = None
    for k in range(1, M + 1):
        a = kloosterman_p2_real(k, -n % k, wp)
        if a.lo == 0 and a.hi == 0:
            continue
        xk_lo, xk_hi = d.div(X.lo, k), u.div(X.hi, k)
        if floor is not None:
            bound = u.div(u.mul(a.mag(), u.exp(xk_hi)), k)
            if bound < floor:
                lo, hi = d.sub(lo, bound), u.add(hi, bound)
                continue
        ilo, ihi = bessel_I2_bounds(xk_lo, xk_hi, wp)
        # I_2 > 0, so the sign of each endpoint of A_k picks the Bessel endpoint
        lo = d.add(lo, d.div(d.mul(a.lo, ilo if a.lo >= 0 else ihi), k))
        hi = u.add(hi, u.div(u.mul(a.hi, ihi if a.hi >= 0 else ilo), k))
        if floor is None:
            floor = d.mul_2exp(ilo, -(wp + 8))
    total = IntervalReal(lo, hi, wp)
    return (total * (2 * pi(wp)) / (12 * n - 1)).with_prec(prec)


class P2Source:
    """Memoized p2 enclosures for one (Bessel cut, precision, exact threshold).

    Arguments at or below the threshold come from the exact table (threshold 0
    forces the formula for every n >= 1); negative arguments give 0.
    """

    def __init__(self, M: int, prec: int = DEFAULT_PREC, exact_threshold: int = EXACT_THRESHOLD):
        if M < 0:
            raise ValueError("M must be nonnegative")
        self.M = M
        self.prec = prec
        self.exact_threshold = max(0, exact_threshold)
        self._table = default_cache.p2(self.exact_threshold).values if self.exact_threshold else (1,)
        self._memo: dict[int, Enclosure] = {}

    def get(self, n: int) -> Enclosure:
        hit = self._memo.get(n)
        if hit is not None:
            return hit
        if n < 0:
            enc = _exact("P2", n, 0, self.prec)
        elif n == 0 or n <= self.exact_threshold:
            enc = _exact("P2", n, self._table[n], self.prec)
        else:
            main = p2_main_sum(self.M, n, self.prec)
            tail = tail_f(self.M, n, self.prec)
            enc = Enclosure("P2", n, main - tail, main + tail, f"truncation(M={self.M})")
        self._memo[n] = enc
        return enc

    def forget_below(self, n: int) -> None:
        """Drop memoized arguments < n (chunked campaigns move forward)."""
        for key in [k for k in self._memo if k < n]:
            del self._memo[key]


def p2_enclosure(M: int, n: int, prec: int = DEFAULT_PREC, exact_threshold: int = EXACT_THRESHOLD) -> Enclosure:
    """[p2_-(M; n), p2_+(M; n)], or the exact value at or below the threshold."""
    return P2Source(M, prec, exact_threshold).get(n)


# -- u ------------------------------------------------------------------------------------

def cuts(L: int, M: int, reading: str = "table") -> tuple[int, int]:
    """(Bessel cut, triangular cut J): u_- sums m <= 2J + 1, u_+ sums m <= 2J."""
    if L < 0 or M < 0:
        raise ValueError("L and M must be nonnegative")
    if reading == "table":
        return L, M
    if reading == "literal":
        return M, L
    raise ValueError(f"reading must be one of {READINGS}")


class UBounds:
    """u_-(L, M; n) and u_+(L, M; n) over a shared p2 source, memoized per n."""

    def __init__(
        self,
        L: int,
        M: int,
        prec: int = DEFAULT_PREC,
        exact_threshold: int = EXACT_THRESHOLD,
        reading: str = "table",
    ):
        self.L, self.M, self.prec, self.reading = L, M, prec, reading
        bessel, self.J = cuts(L, M, reading)
        self.source = P2Source(bessel, prec, exact_threshold)
        self._memo: dict[int, Enclosure] = {}

    def get(self, n: int) -> Enclosure:
        hit = self._memo.get(n)
        if hit is not None:
            return hit
        wp = self.prec + 16
        d, u = down(wp), up(wp)
        lo = hi = gmpy2.mpfr(0)
        last = 2 * self.J + 1
        for m in range(last + 1):
            t = n - triangular(m)
            if t < 0:
                break
            p = self.source.get(t)
            if m % 2 == 0:
                # u_- takes p2_- for even m, u_+ takes p2_+
                lo = d.add(lo, p.lower.lo)
                if m < last:
                    hi = u.add(hi, p.upper.hi)
            else:
                lo = d.sub(lo, p.upper.hi)
                if m < last:
                    hi = u.sub(hi, p.lower.lo)
        lower = IntervalReal(lo, lo, wp)
        upper = IntervalReal(hi, hi, wp)
        enc = Enclosure(
            "U",
            n,
            lower,
            upper,
            f"truncation(L={self.L},M={self.M},reading={self.reading})",
        )
        self._memo[n] = enc
        return enc

    def forget_below(self, n: int) -> None:
        for key in [k for k in self._memo if k < n]:
            del self._memo[key]
        self.source.forget_below(n - triangular(2 * self.J + 1))


def u_enclosure(
    L: int,
    M: int,
    n: int,
    prec: int = DEFAULT_PREC,
    exact_threshold: int = EXACT_THRESHOLD,
    reading: str = "table",
) -> Enclosure:
    if n < 1:
        raise ValueError("n must be positive")
    return UBounds(L, M, prec, exact_threshold, reading).get(n)


# -- certificates -------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    inequality: str
    n: int
    status: str  # "verified" or "inconclusive"
    value: IntervalReal
    L: int
    M: int
    prec: int

    @property
    def verified(self) -> bool:
        return self.status == "verified"


def _bounds(ub: UBounds, n: int) -> tuple[IntervalReal, IntervalReal]:
    """Degenerate intervals at u_- (clamped at 0, since u >= 0) and u_+."""
    e = ub.get(n)
    lo = e.lo if e.lo > 0 else gmpy2.mpfr(0)
    hi = e.hi if e.hi > 0 else gmpy2.mpfr(0)
    p = ub.prec + 16
    return IntervalReal(lo, lo, p), IntervalReal(hi, hi, p)


def turan_value(ub: UBounds, n: int) -> IntervalReal:
    """3u_-(n)^2 u_-(n+1)^2 + 6u_-(n-1)u_-(n)u_-(n+1)u_-(n+2)
    - 4u_+(n-1)u_+(n+1)^3 - 4u_+(n)^3 u_+(n+2) - u_+(n-1)^2 u_+(n+2)^2."""
    a0, b0 = _bounds(ub, n - 1)
    a1, b1 = _bounds(ub, n)
    a2, b2 = _bounds(ub, n + 1)
    a3, b3 = _bounds(ub, n + 2)
    pos = a1**2 * a2**2 * 3 + a0 * a1 * a2 * a3 * 6
    neg = b0 * b2**3 * 4 + b1**3 * b3 * 4 + b0**2 * b3**2
    return pos - neg


def logconcave_value(ub: UBounds, n: int) -> IntervalReal:
    """u_-(n)^2 - u_+(n-1) u_+(n+1)."""
    a1, _ = _bounds(ub, n)
    _, b0 = _bounds(ub, n - 1)
    _, b2 = _bounds(ub, n + 1)
    return a1**2 - b0 * b2


def convexity_value(ub: UBounds, n: int, j: int) -> IntervalReal:
    """u_-(n) - 2 u_+(n-j) + u_-(n-2j)."""
    a, _ = _bounds(ub, n)
    _, b = _bounds(ub, n - j)
    c, _ = _bounds(ub, n - 2 * j)
    return a - b * 2 + c


def _certify(name: str, ub: UBounds, n: int, value: IntervalReal, strict: bool) -> Certificate:
    ok = value.lo > 0 if strict else value.lo >= 0
    return Certificate(name, n, "verified" if ok else "inconclusive", value, ub.L, ub.M, ub.prec)


def turan_certificate(
    L: int,
    M: int,
    n: int,
    prec: int = DEFAULT_PREC,
    exact_threshold: int = EXACT_THRESHOLD,
    reading: str = "table",
    bounds: UBounds | None = None,
) -> Certificate:
    """Verified means the lower bound for f(n) is certified >= 0; a failed sign
    check is only ever inconclusive."""
    if n < 2:
        raise ValueError("n must be at least 2")
    ub = bounds or UBounds(L, M, prec, exact_threshold, reading)
    return _certify("turan", ub, n, turan_value(ub, n), strict=False)


def logconcave_certificate(
    L: int, M: int, n: int, prec: int = DEFAULT_PREC, exact_threshold: int = EXACT_THRESHOLD,
    reading: str = "table", bounds: UBounds | None = None,
) -> Certificate:
    if n < 2:
        raise ValueError("n must be at least 2")
    ub = bounds or UBounds(L, M, prec, exact_threshold, reading)
    return _certify("logconcave", ub, n, logconcave_value(ub, n), strict=False)


def convexity_certificate(
    j: int, L: int, M: int, n: int, prec: int = DEFAULT_PREC, exact_threshold: int = EXACT_THRESHOLD,
    reading: str = "table", bounds: UBounds | None = None,
) -> Certificate:
    if j < 1 or n <= 2 * j:
        raise ValueError("need j >= 1 and n > 2j")
    ub = bounds or UBounds(L, M, prec, exact_threshold, reading)
    return _certify(f"convexity({j})", ub, n, convexity_value(ub, n, j), strict=True)


# -- exact-formula probe -------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    """Numerical value of the k <= k_max part of the Bessel-integral formula.

    Not a certified bound: ``remainder`` is a proven bound for k > k_max (plus
    the secondary k = 1 bounds when k_max = 1), but ``quad_error`` is the
    quadrature's own error estimate.
    """

    n: int
    k_max: int
    value: mpmath.mpf
    imag: mpmath.mpf
    remainder: mpmath.mpf
    quad_error: mpmath.mpf
    quad_tol: mpmath.mpf
    certified: bool = field(default=False)

    def interval(self) -> tuple[mpmath.mpf, mpmath.mpf]:
        r = self.remainder + self.quad_error + self.quad_tol
        return self.value - r, self.value + r

    def enclosure(self, prec: int = DEFAULT_PREC) -> IntervalReal:
        """The interval as an IntervalReal (outward rounded, still heuristic)."""
        lo, hi = self.interval()
        return IntervalReal(round_down(_mp_to_fraction(lo), prec), round_up(_mp_to_fraction(hi), prec), prec)

    def as_dict(self) -> dict:
        lo, hi = self.interval()
        return {
            "n": self.n,
            "k_max": self.k_max,
            "value": mpmath.nstr(self.value, 30),
            "imag": mpmath.nstr(self.imag, 5),
            "remainder": mpmath.nstr(self.remainder, 10),
            "quad_error": mpmath.nstr(self.quad_error, 5),
            "quad_tol": mpmath.nstr(self.quad_tol, 5),
            "interval": [mpmath.nstr(lo, 30), mpmath.nstr(hi, 30)],
            "certified": self.certified,
        }


def _mp_to_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = x.man_exp
    return Fraction(man) * Fraction(2) ** exp


def _to_mp(x) -> mpmath.mpf:
    # mpmath mishandles a gmpy2 zero passed directly
    p, q = x.as_integer_ratio()
    return mpmath.mpf(p) / q


def _i32(w):
    """I_{3/2}(w) in closed form, with the small-w series to avoid cancellation."""
    if w < mpmath.mpf("0.1"):
        # I_{3/2}(w) = sqrt(2/(pi w)) (cosh w - sinh w / w); series in w
        s = mpmath.mpf(0)
        t = w ** 2 / 3
        m = 0
        while True:
            s += t
            m += 1
            t = t * w * w / ((2 * m) * (2 * m + 3))
            if abs(t) < mpmath.eps * abs(s):
                break
        return mpmath.sqrt(2 / (mpmath.pi * w)) * s
    return ((1 - 1 / w) * mpmath.exp(w) + (1 + 1 / w) * mpmath.exp(-w)) / mpmath.sqrt(2 * mpmath.pi * w)


def _kge_tail(n: int, k_max: int) -> mpmath.mpf:
    """Bound for the k > k_max terms, k_max >= 1.

    Each term is at most (2^{9/4}/(sqrt 3 (24n+1)^{3/4})) (log k + 14) sup I_{3/2}(w_k),
    w_k = pi sqrt(24n+1)/(3 sqrt 2 k), using the standard bound on the
    cotangent-weighted Kloosterman sum; I_{3/2} is bounded as in the usual
    two-range Bessel estimate.  Terms are summed to k = 10^4 and the rest is
    bounded by the integral of (log t + 14) t^{-3/2}.
    """
    pre = mpmath.mpf(2) ** mpmath.mpf(2.25) / (mpmath.sqrt(3) * mpmath.mpf(24 * n + 1) ** mpmath.mpf(0.75))
    W = mpmath.pi * mpmath.sqrt(24 * n + 1) / (3 * mpmath.sqrt(2))
    small = 2 ** mpmath.mpf(-0.5) / mpmath.gamma(mpmath.mpf(2.5))
    K = 10**4
    total = mpmath.mpf(0)
    for k in range(k_max + 1, K + 1):
        w = W / k
        bound = mpmath.sqrt(2 / (mpmath.pi * w)) * mpmath.exp(w) if w >= 1 else small * w ** mpmath.mpf(1.5)
        total += (mpmath.log(k) + 14) * bound
    if W / (K + 1) >= 1:
        raise ValueError("n too large for the probe tail bound")
    t0 = mpmath.mpf(K)
    tail = small * W ** mpmath.mpf(1.5) * (2 * (mpmath.log(t0) + 14) / mpmath.sqrt(t0) + 4 / mpmath.sqrt(t0))
    return pre * (total + tail)


def exact_formula_probe(n: int, k_max: int = 1, quad_tol: float = 1e-20, prec: int | None = None) -> ProbeResult:
    """Evaluate the k <= k_max terms of the exact formula for u(n) by quadrature.

    ``prec`` is the working precision in bits; by default it tracks the size of u(n).
    """
    if n < 2 or k_max < 1:
        raise ValueError("need n >= 2 and k_max >= 1")
    dps = None if prec is None else max(15, int(prec / 3.3219))
    if dps is None:
        # the value is about e^{2 pi sqrt(n/3)}; keep 30 digits beyond it
        dps = 30 + int(2 * math.pi * math.sqrt(n / 3) / math.log(10))
    with mpmath.workdps(dps):
        N24 = mpmath.mpf(24 * n + 1)
        front = mpmath.pi / (mpmath.mpf(2) ** mpmath.mpf(0.75) * mpmath.sqrt(3) * N24 ** mpmath.mpf(0.75))
        s6 = mpmath.sqrt(6)
        total = mpmath.mpc(0)
        err = mpmath.mpf(0)
        for k in range(1, k_max + 1):
            Ks = []
            for r in range(2 * k):
                K = kloosterman_u(k, n, r, prec=int(dps * 3.33) + 20)
                Ks.append(mpmath.mpc(_to_mp(K.re.mid()), _to_mp(K.im.mid())))
            c = mpmath.pi / (3 * mpmath.sqrt(2) * k) * mpmath.sqrt(N24)

            def integrand(x, k=k, Ks=Ks, c=c):
                y = 1 - x * x
                if y <= 0:
                    return mpmath.mpf(0)
                kern = sum(
                    Ks[r] * mpmath.cot(mpmath.pi / (2 * k) * (x / s6 - r - mpmath.mpf(1) / 2))
                    for r in range(2 * k)
                )
                return y ** mpmath.mpf(0.75) * kern * _i32(c * mpmath.sqrt(y))

            val, e = mpmath.quad(integrand, [-1, 0, 1], error=True, maxdegree=10)
            total += val / k**2
            err += abs(e) / k**2
        value = front * total
        err = front * err
        if k_max == 1:
            rem = (
                mpmath.mpf("0.4") * mpmath.exp(mpmath.pi * mpmath.sqrt(mpmath.mpf(n) / 3))
                + mpmath.mpf(28) / N24
                + 14
                * mpmath.exp(2 * mpmath.pi * mpmath.sqrt(mpmath.mpf(n) / 3) - mpmath.pi * mpmath.mpf(n) ** mpmath.mpf(0.25) / mpmath.sqrt(3))
                / N24
            )
        else:
            rem = _kge_tail(n, k_max)
        return ProbeResult(
            n=n,
            k_max=k_max,
            value=+value.real,
            imag=+value.imag,
            remainder=+rem,
            quad_error=+err,
            quad_tol=mpmath.mpf(quad_tol),
        )

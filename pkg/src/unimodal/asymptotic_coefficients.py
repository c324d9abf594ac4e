"""Effective asymptotic expansion of u(n): coefficients, error constants,
cutoffs and the two-sided envelopes built from them.

The expansion has the shape

    u(n + s) = F(n) (sum_{m <= N+1} A_s(m) n^{-m/2} + O_{<= C_N(s)}(n^{-(N+2)/2})),
    F(n)     = e^{2 pi sqrt(n/3)} / (8 3^{3/4} sqrt(pi) n^{5/4}),

valid for n >= nu_N(s).  Everything is computed in interval arithmetic; the
decimal constants of the error analysis are taken as exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .interval import IntervalReal, pi, sqrt_int, sqrt_pi
from .special_functions import binom, gamma_half_integer_coeff, phi_coeff, zeta_three_halves

COEFF_PREC = 256
_GUARD = 64

D = Fraction  # decimal constants of the error analysis, exact


# -- exact combinatorial pieces -----------------------------------------------------

def _partitions(m: int, parts: int, largest: int):
    """Partitions of m into exactly `parts` parts, each <= largest, as multiplicity dicts."""
    if parts == 0:
        if m == 0:
            yield {}
        return
    for first in range(min(largest, m - parts + 1), 0, -1):
        if first * parts < m:
            break
        for rest in _partitions(m - first, parts - 1, first):
            out = dict(rest)
            out[first] = out.get(first, 0) + 1
            yield out


@lru_cache(maxsize=None)
def multinomial_C(j: int, m: int, N: int) -> Fraction:
    """The multinomial coefficient sum over (l_1..l_{N+1}) with sum l_k = j and
    sum k l_k = m of  binom(j; l) prod ((-1)^{k+1} binom(1/2, k+1))^{l_k}.  Exact."""
    if not 0 <= j <= m:
        raise ValueError("need 0 <= j <= m")
    total = Fraction(0)
    for mult in _partitions(m, j, N + 1):
        term = Fraction(math.factorial(j))
        for k, lk in mult.items():
            a = binom(Fraction(1, 2), k + 1) * (-1 if k % 2 == 0 else 1)
            term = term * a**lk / math.factorial(lk)
        total += term
    return total


# -- c(m) ------------------------------------------------------------------------

def _inner(m: int, shift: Fraction, N: int) -> Fraction:
    """sum_j 2^j C_{j,m} Gamma(j + shift) / (j! sqrt(pi)) for half-integer shift."""
    total = Fraction(0)
    for j in range(m + 1):
        g = gamma_half_integer_coeff(int(j + shift - Fraction(1, 2)))
        total += Fraction(2**j, math.factorial(j)) * multinomial_C(j, m, N) * g
    return total


def c_coeff(m: int, N: int, prec: int = COEFF_PREC, general: bool = False) -> IntervalReal:
    """c(m).  For m = 0, 1 the closed forms are used unless ``general`` is set."""
    wp = prec + _GUARD
    sp = sqrt_pi(wp)
    p = pi(wp)
    if m == 0 and not general:
        return sp.with_prec(prec)
    if m == 1 and not general:
        return (sp * (2 * p * p - 45) / 48).with_prec(prec)
    half = Fraction(1, 2)
    total = IntervalReal.exact(_inner(m, m + half, N), wp)
    for k in range(1, m + 1):
        phi_km1 = phi_coeff(k - 1, wp)
        total = total - phi_km1 * (_inner(m - k, m - half, N) / 2)
        inner_plus = _inner(m - k, m + half, N)
        acc = IntervalReal.exact(0, wp)
        for ell in range(k + 1):
            sign = -1 if (ell + k) % 2 else 1
            acc = acc + phi_coeff(ell, wp) * (sign * binom(half, k - ell))
        total = total + acc * inner_plus
    return (total * sp).with_prec(prec)


# -- exponential and power-factor series --------------------------------------------

def e1(m: int, prec: int = COEFF_PREC) -> IntervalReal:
    wp = prec + _GUARD
    if m == 0:
        return IntervalReal.exact(1, prec)
    x = -(pi(wp) ** 2) / 18
    acc = IntervalReal.exact(0, wp)
    for nu in range(1, m + 1):
        acc = acc + x**nu * Fraction(1, math.factorial(2 * nu - 1) * math.factorial(nu + m) * math.factorial(m - nu))
    return (acc * Fraction(math.factorial(2 * m - 1), (-96) ** m)).with_prec(prec)


def o1(m: int, prec: int = COEFF_PREC) -> IntervalReal:
    wp = prec + _GUARD
    p = pi(wp)
    x = -(p**2) / 18
    acc = IntervalReal.exact(0, wp)
    for nu in range(m + 1):
        acc = acc + x**nu * Fraction(1, math.factorial(2 * nu) * math.factorial(m - nu) * math.factorial(nu + m + 1))
    pref = p * Fraction(math.factorial(2 * m), 24 * (-96) ** m) / sqrt_int(3, wp)
    return (acc * pref).with_prec(prec)


def e2(m: int) -> Fraction:
    return binom(Fraction(-5, 4), m) / 24**m


def b_star(m: int, prec: int = COEFF_PREC) -> IntervalReal:
    """b*(2m) = sum e1(k) e2(m-k), b*(2m+1) = sum o1(k) e2(m-k)."""
    half, odd = divmod(m, 2)
    f = o1 if odd else e1
    acc = IntervalReal.exact(0, prec)
    for k in range(half + 1):
        acc = acc + f(k, prec) * e2(half - k)
    return acc


def _c_star(c: list[IntervalReal], m: int, prec: int) -> IntervalReal:
    """Re-expansion of sum c(m) lambda^{-2m} in powers of n^{-1/2}."""
    wp = prec + _GUARD
    if m == 0:
        return c[0]
    ratio = sqrt_int(3, wp) / pi(wp)
    half, odd = divmod(m, 2)
    acc = IntervalReal.exact(0, wp)
    if odd:
        for ell in range(half + 1):
            k = 2 * ell + 1
            acc = acc + c[k] * ratio**k * (binom(-(ell + Fraction(1, 2)), half - ell) * Fraction(24) ** (ell - half))
    else:
        for ell in range(1, half + 1):
            k = 2 * ell
            acc = acc + c[k] * ratio**k * (binom(-ell, half - ell) * Fraction(24) ** (ell - half))
    return acc.with_prec(prec)


# -- shifted chain ------------------------------------------------------------------

def e1_shift(s: int, m: int, prec: int = COEFF_PREC) -> IntervalReal:
    wp = prec + _GUARD
    if m == 0:
        return IntervalReal.exact(1, prec)
    x = -4 * pi(wp) ** 2 * s / 3
    acc = IntervalReal.exact(0, wp)
    for nu in range(1, m + 1):
        acc = acc + x**nu * Fraction(1, math.factorial(2 * nu - 1) * math.factorial(nu + m) * math.factorial(m - nu))
    return (acc * Fraction(s**m * math.factorial(2 * m - 1), (-4) ** m)).with_prec(prec)


def o1_shift(s: int, m: int, prec: int = COEFF_PREC) -> IntervalReal:
    wp = prec + _GUARD
    p = pi(wp)
    x = -4 * p**2 * s / 3
    acc = IntervalReal.exact(0, wp)
    for nu in range(m + 1):
        acc = acc + x**nu * Fraction(1, math.factorial(2 * nu) * math.factorial(m - nu) * math.factorial(nu + m + 1))
    pref = p * Fraction(s ** (m + 1) * math.factorial(2 * m), (-4) ** m) / sqrt_int(3, wp)
    return (acc * pref).with_prec(prec)


def e2_shift(s: int, m: int) -> Fraction:
    return binom(Fraction(-5, 4), m) * s**m


def d2_shift(s: int, m: int, prec: int = COEFF_PREC) -> IntervalReal:
    """Coefficients of F(n + s)/F(n) in powers of n^{-1/2}."""
    half, odd = divmod(m, 2)
    f = o1_shift if odd else e1_shift
    acc = IntervalReal.exact(0, prec)
    for k in range(half + 1):
        acc = acc + f(s, k, prec) * e2_shift(s, half - k)
    return acc


def _a_star_shift(A: tuple[IntervalReal, ...], s: int, m: int, prec: int) -> IntervalReal:
    """Re-expansion of sum A(m) (n+s)^{-m/2} in powers of n^{-1/2}."""
    if m == 0:
        return A[0]
    half, odd = divmod(m, 2)
    acc = IntervalReal.exact(0, prec)
    if odd:
        for ell in range(half + 1):
            acc = acc + A[2 * ell + 1] * (binom(-(ell + Fraction(1, 2)), half - ell) * s ** (half - ell))
    else:
        for ell in range(1, half + 1):
            acc = acc + A[2 * ell] * (binom(-ell, half - ell) * s ** (half - ell))
    return acc


# -- result containers ----------------------------------------------------------------

@dataclass(frozen=True)
class ErrorLedger:
    N: int
    E0: IntervalReal
    E1: Fraction
    E2: IntervalReal
    E3: IntervalReal
    C: IntervalReal
    S: tuple[IntervalReal, ...]
    R: tuple[int, ...]
    n_cut: int
    # shifted intermediates, empty for s = 0
    shift: int = 0
    C1: IntervalReal | None = None
    C2: IntervalReal | None = None
    C3: IntervalReal | None = None
    C4: Fraction | None = None
    C5: IntervalReal | None = None
    C_shift: IntervalReal | None = None

    def as_dict(self) -> dict:
        out = {
            "N": self.N,
            "E0": _iv_json(self.E0),
            "E1": str(self.E1),
            "E2": _iv_json(self.E2),
            "E3": _iv_json(self.E3),
            "C_N": _iv_json(self.C),
            "S": [_iv_json(x) for x in self.S],
            "R": list(self.R),
            "n_N": self.n_cut,
        }
        if self.shift:
            out.update(
                shift=self.shift,
                C1=_iv_json(self.C1),
                C2=_iv_json(self.C2),
                C3=_iv_json(self.C3),
                C4=str(self.C4),
                C5=_iv_json(self.C5),
                C_N_s=_iv_json(self.C_shift),
            )
        return out


@dataclass(frozen=True)
class CoefficientSet:
    N: int
    s: int
    A: tuple[IntervalReal, ...] = field(repr=False)
    C: IntervalReal
    cutoff: int
    nu: int
    prec: int

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "s": self.s,
            "A": [_iv_json(a) for a in self.A],
            "C": _iv_json(self.C),
            "cutoff": self.cutoff,
            "nu": self.nu,
            "prec": self.prec,
        }


def _iv_json(x: IntervalReal, digits: int | None = None) -> list[str]:
    return list(x.decimal_bounds(digits))


def _ceil(x: IntervalReal) -> int:
    """Smallest integer certified to be >= every point of x."""
    i = int(x.hi)
    return i + 1 if i < x.hi else i


def _check_N(N: int) -> None:
    if N < 3:
        raise ValueError("N must be at least 3")


# -- cutoffs and error constants ----------------------------------------------------

def cutoff_n(N: int, prec: int = COEFF_PREC) -> int:
    """n_N = (3(3N+4) log(6N+8) / 1.3^2)^4, rounded up."""
    _check_N(N)
    x = IntervalReal.exact(6 * N + 8, prec).log() * (3 * (3 * N + 4)) / D("1.69")
    return _ceil(x**4)


def _s_values(N: int, prec: int) -> tuple[IntervalReal, ...]:
    """S(0), S(1), ..., S(N+3)."""
    z = zeta_three_halves(prec) - 1
    powers = [z**j for j in range(N + 1)]
    out = [sum(powers[1:], powers[0])]
    for m in range(1, N + 4):
        acc = IntervalReal.exact(0, prec)
        for j in range(N + 1):
            acc = acc + powers[j] * math.comb(j + m, j)
        out.append(acc * math.factorial(m) / sqrt_int(m, prec))
    return tuple(out)


def _r(N: int, m: int) -> int:
    return (N + 1 - m) // 2


def _e1_const(N: int) -> Fraction:
    return max(abs(binom(Fraction(-m, 2), _r(N, m) + 1)) / Fraction(24) ** (_r(N, m) + 1) for m in range(1, N + 2))


@lru_cache(maxsize=None)
def error_constants(N: int, prec: int = COEFF_PREC) -> ErrorLedger:
    _check_N(N)
    wp = prec + _GUARD
    S = _s_values(N, wp)
    f = math.factorial
    E0 = (
        IntervalReal.exact(D("326.6") + 4 * D("1.4") ** N + D("19.4") * D("1.2") ** N * f(N + 3), wp)
        + S[0] * D("1.5")
        + S[1] * (D("13.3") * D("1.4") ** N)
        + (S[N + 2] * D("5.2") + S[N + 3] * D("44.5")) * D("0.7") ** N
    )
    E1 = _e1_const(N)
    E2 = IntervalReal.exact(D("6.1") * f(2 * N + 2) * E1, wp)
    E3 = (E0 + E2 + D("1.8")) * D("1.2") + D("1.3") * f(2 * N + 2)
    C = E3 + D("69.7")
    return ErrorLedger(
        N=N,
        E0=E0.with_prec(prec),
        E1=E1,
        E2=E2.with_prec(prec),
        E3=E3.with_prec(prec),
        C=C.with_prec(prec),
        S=tuple(x.with_prec(prec) for x in S),
        R=tuple(_r(N, m) for m in range(1, N + 2)),
        n_cut=cutoff_n(N, wp),
    )


def _cosh_shift(s: int, prec: int) -> IntervalReal:
    return (2 * pi(prec) * (IntervalReal.exact(Fraction(s, 3), prec).sqrt())).cosh()


def n1_shift(s: int) -> int:
    return 4 if s == 1 else 2 * s**4


def n2_shift(N: int, s: int) -> int:
    return max(n1_shift(s), -((-s * (N + 5)) // 4))


@lru_cache(maxsize=None)
def shifted_error_constants(N: int, s: int, prec: int = COEFF_PREC) -> ErrorLedger:
    _check_N(N)
    if s < 1:
        raise ValueError("shift must be positive")
    base = error_constants(N, prec)
    wp = prec + _GUARD
    f2 = math.factorial(2 * N + 2)
    ch = _cosh_shift(s, wp)
    rs = IntervalReal.exact(s, wp).sqrt()
    C1 = ch * IntervalReal.exact(s, wp).sqrt() ** (N + 3) * D("1.5")
    C2 = IntervalReal.exact(Fraction(5 * s, 4), wp).sqrt() ** N * Fraction(20 * s, 11)
    C3 = C1 * D("2.7") + (rs * D("1.2") + 1) * C2 + (C2 * (D("20.5") + 12 * s) + D("0.7")) * ch
    C4 = max(abs(binom(Fraction(-m, 2), _r(N, m) + 1)) * s ** (_r(N, m) + 1) for m in range(1, N + 2))
    C5 = base.C.with_prec(wp) + D("3.3") * f2 * C4
    Cs = (
        C3 * C5 / Fraction(2 * s) ** (N + 2)
        + C3 * (D("7.4") * f2)
        + ch * C5 * (4 * s)
        + ch * rs**3 * IntervalReal.exact(Fraction(5 * (s + 1), 4), wp).sqrt() ** N * (D("461.7") * f2)
    )
    return ErrorLedger(
        N=N,
        E0=base.E0,
        E1=base.E1,
        E2=base.E2,
        E3=base.E3,
        C=base.C,
        S=base.S,
        R=base.R,
        n_cut=base.n_cut,
        shift=s,
        C1=C1.with_prec(prec),
        C2=C2.with_prec(prec),
        C3=C3.with_prec(prec),
        C4=C4,
        C5=C5.with_prec(prec),
        C_shift=Cs.with_prec(prec),
    )


def cutoff_shift(N: int, s: int) -> int:
    """n_N(s) = max(n_N - s, n2_N(s)); n_N for s = 0."""
    n = cutoff_n(N)
    return n if s == 0 else max(n - s, n2_shift(N, s))


def nu_shift(N: int, s: int) -> int:
    """Validity threshold nu_N(s) of the envelope for u(n + s)."""
    n = cutoff_n(N)
    return n if s == 0 else max(n, n2_shift(N, s))


# -- coefficient sets -------------------------------------------------------------------

@lru_cache(maxsize=None)
def _base_A(N: int, prec: int) -> tuple[IntervalReal, ...]:
    wp = prec + _GUARD
    c = [c_coeff(m, N, wp) for m in range(N + 2)]
    cs = [_c_star(c, m, wp) for m in range(N + 2)]
    bs = [b_star(m, wp) for m in range(N + 2)]
    out = []
    for m in range(N + 2):
        acc = IntervalReal.exact(0, wp)
        for k in range(m + 1):
            acc = acc + bs[k] * cs[m - k]
        out.append(acc.with_prec(prec))
    return tuple(out)


@lru_cache(maxsize=None)
def base_coefficients(N: int, prec: int = COEFF_PREC) -> CoefficientSet:
    _check_N(N)
    led = error_constants(N, prec)
    return CoefficientSet(N=N, s=0, A=_base_A(N, prec), C=led.C, cutoff=led.n_cut, nu=led.n_cut, prec=prec)


@lru_cache(maxsize=None)
def shifted_coefficients(N: int, s: int, prec: int = COEFF_PREC) -> CoefficientSet:
    _check_N(N)
    if s == 0:
        return base_coefficients(N, prec)
    if s < 0:
        raise ValueError("shift must be nonnegative")
    wp = prec + _GUARD
    A = _base_A(N, wp)
    astar = [_a_star_shift(A, s, m, wp) for m in range(N + 2)]
    d2 = [d2_shift(s, m, wp) for m in range(N + 2)]
    out = []
    for m in range(N + 2):
        acc = IntervalReal.exact(0, wp)
        for k in range(m + 1):
            acc = acc + d2[k] * astar[m - k]
        out.append(acc.with_prec(prec))
    led = shifted_error_constants(N, s, prec)
    return CoefficientSet(
        N=N, s=s, A=tuple(out), C=led.C_shift, cutoff=cutoff_shift(N, s), nu=nu_shift(N, s), prec=prec
    )


# -- envelopes --------------------------------------------------------------------------

def prefactor(n, prec: int) -> IntervalReal:
    """F(n) = e^{2 pi sqrt(n/3)} / (8 3^{3/4} sqrt(pi) n^{5/4})."""
    x = IntervalReal.exact(n, prec) if not isinstance(n, IntervalReal) else n
    num = (2 * pi(prec) * (x / 3).sqrt()).exp()
    den = IntervalReal.exact(27, prec).root(4) * sqrt_pi(prec) * x.root(4) ** 5 * 8
    return num / den


def series_sum(A, n, prec: int) -> IntervalReal:
    """sum_m A[m] n^{-m/2}."""
    r = 1 / IntervalReal.exact(n, prec).sqrt()
    acc = IntervalReal.exact(0, prec)
    power = IntervalReal.exact(1, prec)
    for a in A:
        acc = acc + a * power
        power = power * r
    return acc


def envelope_polys(cs: CoefficientSet, n, error_const=None, prec: int | None = None) -> tuple[IntervalReal, IntervalReal]:
    """(P^-, P^+) = sum A_s(m) n^{-m/2} -/+ C n^{-(N+2)/2}."""
    prec = prec or cs.prec
    C = cs.C if error_const is None else error_const
    main = series_sum(cs.A, n, prec)
    err = IntervalReal.exact(n, prec).sqrt() ** (cs.N + 2)
    err = C / err if isinstance(C, IntervalReal) else IntervalReal.exact(C, prec) / err
    return main - err, main + err


def envelope_eval(cs: CoefficientSet, n: int) -> tuple[IntervalReal, IntervalReal]:
    """Certified bounds F(n) P^-(n, s) <= u(n + s) <= F(n) P^+(n, s).

    The lower bound is meaningful through its .lo endpoint, the upper through .hi.
    """
    if n < cs.nu:
        raise ValueError(f"n = {n} is below the validity threshold {cs.nu}")
    lo, hi = envelope_polys(cs, n)
    F = prefactor(n, cs.prec)
    return F * lo, F * hi


# -- the N = 12 Turan threshold -------------------------------------------------------

PRINTED_C12 = {0: D("1.4e27"), 1: D("8.8e32"), 2: D("1.4e35"), 3: D("4.8e36")}
NU12 = 9_400_000_000 - 1
Q_THRESHOLD = 78304
LOWER_THRESHOLD = 8492967488
UPPER_THRESHOLD = 7886464400


@dataclass(frozen=True)
class ConstantAudit:
    computed: dict[int, IntervalReal]
    printed: dict[int, Fraction]
    nu: dict[int, int]
    constants_ok: bool
    nu_ok: bool

    @property
    def ok(self) -> bool:
        return self.constants_ok and self.nu_ok

    def as_dict(self) -> dict:
        return {
            "C12": {s: _iv_json(c) for s, c in self.computed.items()},
            "printed": {s: str(float(v)) for s, v in self.printed.items()},
            "below_printed": {s: bool(self.computed[s].hi < self.printed[s]) for s in self.computed},
            "nu12": self.nu,
            "nu12_bound": NU12,
            "ok": self.ok,
        }


def audit_printed_constants(prec: int = COEFF_PREC) -> ConstantAudit:
    computed = {0: error_constants(12, prec).C}
    for s in (1, 2, 3):
        computed[s] = shifted_error_constants(12, s, prec).C_shift
    nus = {s: nu_shift(12, s) for s in range(4)}
    return ConstantAudit(
        computed=computed,
        printed=dict(PRINTED_C12),
        nu=nus,
        constants_ok=all(computed[s].hi < PRINTED_C12[s] for s in range(4)),
        nu_ok=max(nus.values()) <= NU12,
    )


def rounded_envelopes(n: int, prec: int) -> dict[int, tuple[IntervalReal, IntervalReal]]:
    """The N = 12 polynomials with the rounded error constants: s -> (P_-, P_+)."""
    out = {}
    for s in range(4):
        cs = shifted_coefficients(12, s, prec)
        out[s] = envelope_polys(cs, n, PRINTED_C12[s], prec)
    return out


def _sqrt3(prec):
    return sqrt_int(3, prec)


def q1(n, prec: int) -> IntervalReal:
    p = pi(prec)
    r3 = _sqrt3(prec)
    x = IntervalReal.exact(n, prec)
    rn = x.sqrt()
    c3 = p**4 / 12
    c35 = p**5 * 5 / (9 * r3) - p**3 * 35 / (16 * r3)
    c4 = p**2 * Fraction(1085, 128) - p**4 * Fraction(215, 36) + p**6 * Fraction(1609, 2592)
    c45 = (
        p**3 * 175 / (2 * r3)
        - r3 * p * Fraction(19215, 1024)
        - p**5 * 83111 / (3456 * r3)
        + p**7 * 65161 / (46656 * r3)
    )
    return c3 / x**3 + c35 / (x**3 * rn) + c4 / x**4 + c45 / (x**4 * rn) - 2060 / x**5


def q2(n, prec: int) -> IntervalReal:
    p = pi(prec)
    r3 = _sqrt3(prec)
    x = IntervalReal.exact(n, prec)
    rn = x.sqrt()
    c3 = p**4 / 3
    c35 = p**5 * 20 / (9 * r3) - p**3 * 35 / (4 * r3)
    c4 = p**2 * Fraction(1085, 32) - p**4 * Fraction(215, 9) + p**6 * Fraction(1609, 648)
    c45 = (
        p**3 * 350 / r3
        - r3 * p * Fraction(19215, 256)
        - p**5 * 83255 / (864 * r3)
        + p**7 * 65161 / (11664 * r3)
    )
    return c3 / x**3 + c35 / (x**3 * rn) + c4 / x**4 + c45 / (x**4 * rn)


def _sides(n: int, prec: int) -> tuple[IntervalReal, IntervalReal]:
    P = rounded_envelopes(n, prec)
    lhs = 4 * (P[1][0] ** 2 - P[0][1] * P[2][1]) * (P[2][0] ** 2 - P[1][1] * P[3][1])
    rhs = (P[1][1] * P[2][1] - P[0][0] * P[3][0]) ** 2
    return lhs, rhs


def _decide(iv: IntervalReal) -> bool | None:
    if iv.lo > 0:
        return True
    if iv.hi <= 0:
        return False
    return None


@dataclass(frozen=True)
class ThresholdCheck:
    n: int
    name: str
    holds: bool | None  # None: undecided at every precision tried
    prec: int
    margin: IntervalReal

    def as_dict(self) -> dict:
        return {"n": self.n, "check": self.name, "holds": self.holds, "prec": self.prec, "margin": _iv_json(self.margin)}


PRECISION_LADDER = (384, 768, 1536)


def _escalate(name: str, n: int, fn, ladder) -> ThresholdCheck:
    last = None
    for prec in ladder:
        margin = fn(n, prec)
        verdict = _decide(margin)
        last = ThresholdCheck(n, name, verdict, prec, margin)
        if verdict is not None:
            return last
    return last


def q_gap_check(n: int, ladder=PRECISION_LADDER) -> ThresholdCheck:
    """4 Q1(n) - Q2(n) > 0."""
    return _escalate("4Q1>Q2", n, lambda n, p: 4 * q1(n, p) - q2(n, p), ladder)


def lower_check(n: int, ladder=PRECISION_LADDER) -> ThresholdCheck:
    """Left side of the master inequality exceeds 4 Q1(n), and Q1(n) > 0."""

    def margin(n, p):
        lhs, _ = _sides(n, p)
        a = lhs - 4 * q1(n, p)
        b = q1(n, p)
        # report the smaller of the two margins
        return a if a.lo < b.lo else b

    return _escalate("lhs>4Q1>0", n, margin, ladder)


def upper_check(n: int, ladder=PRECISION_LADDER) -> ThresholdCheck:
    """Right side of the master inequality lies in (0, Q2(n))."""

    def margin(n, p):
        _, rhs = _sides(n, p)
        a = q2(n, p) - rhs
        return a if a.lo < rhs.lo else rhs

    return _escalate("0<rhs<Q2", n, margin, ladder)


def master_check(n: int, ladder=PRECISION_LADDER) -> ThresholdCheck:
    def margin(n, p):
        lhs, rhs = _sides(n, p)
        return lhs - rhs

    return _escalate("master", n, margin, ladder)


@dataclass(frozen=True)
class TuranThresholdReport:
    n: int
    master: ThresholdCheck
    lower: ThresholdCheck
    upper: ThresholdCheck
    q_gap: ThresholdCheck

    @property
    def holds(self) -> bool | None:
        return self.master.holds

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "holds": self.holds,
            "checks": [c.as_dict() for c in (self.master, self.lower, self.upper, self.q_gap)],
        }


def turan_threshold_check(n: int, ladder=PRECISION_LADDER) -> TuranThresholdReport:
    """Certified evaluation at one n of the N = 12 master inequality and its sub-checks."""
    if n < 1:
        raise ValueError("n must be positive")
    return TuranThresholdReport(
        n=n,
        master=master_check(n, ladder),
        lower=lower_check(n, ladder),
        upper=upper_check(n, ladder),
        q_gap=q_gap_check(n, ladder),
    )


# -- shifted convexity ------------------------------------------------------------------

def convexity_closed_forms(j: int, prec: int = COEFF_PREC) -> dict[int, IntervalReal]:
    """Closed forms of A_{2j}(m) - 2 A_j(m) + A(m) for m = 2, 3, 4."""
    wp = prec + _GUARD
    p = pi(wp)
    sp = sqrt_pi(wp)
    r3 = sqrt_int(3, wp)
    j2 = j * j
    a2 = p * p * sp * j2 / 3
    a3 = p * sp * j2 * (p * p * 8 * (6 * j + 1) - 567) / (144 * r3)
    a4 = sp * j2 * (p**2 * (-14256 * (6 * j + 1)) + p**4 * (16 * (24 * j * (7 * j + 2) + 13)) + 280665) / 41472
    return {2: a2.with_prec(prec), 3: a3.with_prec(prec), 4: a4.with_prec(prec)}


def convexity_coefficients(j: int, prec: int = COEFF_PREC) -> dict[int, IntervalReal]:
    """A_{2j}(m) - 2 A_j(m) + A(m), m = 0..4, from the N = 3 pipeline."""
    if j < 1:
        raise ValueError("j must be positive")
    A0 = base_coefficients(3, prec).A
    Aj = shifted_coefficients(3, j, prec).A
    A2j = shifted_coefficients(3, 2 * j, prec).A
    return {m: A2j[m] - 2 * Aj[m] + A0[m] for m in range(5)}


def _c3(s: int, prec: int) -> IntervalReal:
    return error_constants(3, prec).C if s == 0 else shifted_error_constants(3, s, prec).C_shift


def n_delta(j: int, weight: int = 1, prec: int = COEFF_PREC) -> int:
    """2j + max(n_3, 32 j^4, ceil(9 (58 j^2 + C_3(2j) + w C_3(j) + C_3)^2 / (pi^5 j^4))).

    weight = 1 reproduces the published cutoff; weight = 2 is the cutoff that
    matches the lower bound actually implied by the three envelopes.
    """
    if j < 1:
        raise ValueError("j must be positive")
    tot = _c3(2 * j, prec) + _c3(j, prec) * weight + _c3(0, prec) + 58 * j * j
    third = tot**2 * 9 / (pi(prec) ** 5 * j**4)
    return 2 * j + max(cutoff_n(3), 32 * j**4, _ceil(third))


@dataclass(frozen=True)
class ConvexityBound:
    j: int
    n: int
    holds: bool
    lower: IntervalReal
    cutoff_published: int
    cutoff_consistent: int


def convexity_bound(j: int, n: int, prec: int = COEFF_PREC) -> ConvexityBound:
    """Certified sign of the N = 3 lower bound for u(n+2j) - 2u(n+j) + u(n).

    Uses P^-(n, 2j) - 2 P^+(n, j) + P^-(n, 0), i.e. the error budget
    C_3(2j) + 2 C_3(j) + C_3, with the coefficient differences from the pipeline.
    """
    if j < 1:
        raise ValueError("j must be positive")
    need = max(nu_shift(3, 0), nu_shift(3, j), nu_shift(3, 2 * j))
    if n < need:
        raise ValueError(f"n = {n} is below the envelope range {need}")
    coeffs = convexity_coefficients(j, prec)
    main = series_sum([coeffs[m] for m in range(5)], n, prec)
    err = (_c3(2 * j, prec) + _c3(j, prec) * 2 + _c3(0, prec)) / IntervalReal.exact(n, prec).sqrt() ** 5
    poly = main - err
    lower = prefactor(n, prec) * poly
    return ConvexityBound(
        j=j,
        n=n,
        holds=poly.lo > 0,
        lower=lower,
        cutoff_published=n_delta(j, 1, prec),
        cutoff_consistent=n_delta(j, 2, prec),
    )

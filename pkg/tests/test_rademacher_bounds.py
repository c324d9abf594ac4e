"""p2 and u enclosures against exact values."""

from __future__ import annotations

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import to_mpf, turan_f
from unimodal.rademacher_bounds import (
    P2Source,
    UBounds,
    convexity_certificate,
    cuts,
    exact_formula_probe,
    logconcave_certificate,
    p2_enclosure,
    p2_main_sum,
    tail_f,
    turan_certificate,
    u_enclosure,
)


@given(st.integers(1, 3000))
def test_p2_enclosure_contains_exact(p2_3000, n):
    enc = p2_enclosure(75, n, 128, exact_threshold=0)
    assert enc.contains(p2_3000[n])


def test_p2_enclosure_every_n_in_a_window(p2_3000):
    src = P2Source(75, 128, exact_threshold=0)
    assert all(src.get(n).contains(p2_3000[n]) for n in range(2500, 3001))


def test_p2_small_cut_is_still_sound(p2_3000):
    for n in (10, 200, 2999):
        for M in (0, 1, 3):
            assert p2_enclosure(M, n, 128, exact_threshold=0).contains(p2_3000[n])


def test_p2_exact_route_and_negative_arguments(p2_3000):
    src = P2Source(75, 128, exact_threshold=1000)
    assert src.get(-5).lo == 0 and src.get(-5).hi == 0
    assert src.get(0).contains(1)
    assert src.get(777).provenance == "exact-table"
    assert src.get(777).contains(p2_3000[777]) and src.get(777).width() < 2.0**-120 * p2_3000[777]
    assert src.get(1001).provenance.startswith("truncation")


def test_tail_bound_formula():
    with mpmath.workdps(50):
        for M, n in ((75, 2000), (5, 100000), (3000, 100)):
            X = mpmath.pi * mpmath.sqrt(12 * n - 1) / 3
            ref = mpmath.pi**5 / 108
            if M <= X - 1:
                ref += 2 * mpmath.sqrt(6 * (M + 1)) * (X - M) * mpmath.exp(X / (M + 1)) / mpmath.mpf(12 * n - 1) ** 1.25
            t = tail_f(M, n, 128)
            assert to_mpf(t.lo) <= ref * (1 + mpmath.mpf(10) ** -30)
            assert ref <= to_mpf(t.hi) * (1 + mpmath.mpf(10) ** -30)
    with pytest.raises(ValueError):
        tail_f(-1, 10)


def test_main_sum_precision():
    a = p2_main_sum(75, 90000, 128)
    assert a.relative_width() < 1e-30


@pytest.mark.parametrize("reading", ["table", "literal"])
def test_u_sandwich_sample(u3000, reading):
    ub = UBounds(30, 75, 128, 1000, reading)
    for n in range(1001, 3001, 37):
        e = ub.get(n)
        assert e.lo <= u3000[n] <= e.hi


def test_cut_readings():
    assert cuts(30, 75) == (30, 75)
    assert cuts(30, 75, "literal") == (75, 30)
    with pytest.raises(ValueError):
        cuts(30, 75, "other")
    with pytest.raises(ValueError):
        cuts(-1, 3)


def test_certificates_verified_mid_range(u3000):
    assert turan_certificate(30, 75, 5000).verified
    assert logconcave_certificate(30, 75, 5000).verified
    assert convexity_certificate(3, 30, 75, 5000).verified


def test_certificate_route_agrees_with_exact_on_overlap(u3000):
    # above every exceptional n the exact sign is positive, so the certificate must be too
    for n in (1200, 2000, 2997):
        assert turan_f(u3000, n) > 0
        assert turan_certificate(30, 75, n).verified


def test_literal_reading_is_sound_but_too_wide():
    # summing the triangular series only to 2L + 1 leaves an alternating-series gap
    # far larger than the Turan margin once n is in the thousands
    lit = turan_certificate(30, 75, 7201, reading="literal")
    tab = turan_certificate(30, 75, 7201, reading="table")
    assert lit.status == "inconclusive"
    assert tab.status == "verified"
    e_lit = u_enclosure(30, 75, 7201, reading="literal")
    e_tab = u_enclosure(30, 75, 7201, reading="table")
    assert e_lit.lo <= e_tab.lo and e_tab.hi <= e_lit.hi


def test_certificate_never_claims_too_much_at_small_n():
    # at n = 30 the Turan inequality fails or is tiny; with the formula everywhere
    # the certificate is inconclusive rather than wrong
    c = turan_certificate(30, 75, 30, exact_threshold=0)
    assert c.status == "inconclusive"


def test_enclosure_serialization():
    d = u_enclosure(30, 75, 5000).as_dict(12)
    assert d["target"] == "U" and d["n"] == 5000
    assert float(d["lower"]) <= float(d["upper"])
    with pytest.raises(ValueError):
        u_enclosure(30, 75, 0)


def test_probe_small_n(u3000):
    r1 = exact_formula_probe(100, 1)
    r5 = exact_formula_probe(100, 5)
    assert not r1.certified
    assert abs(r1.imag) < 1e-20
    assert abs(r1.value - u3000[100]) <= r1.remainder + r1.quad_tol
    assert abs(r5.value - u3000[100]) < abs(r1.value - u3000[100])
    lo, hi = r5.interval()
    assert lo <= u3000[100] <= hi
    assert r5.enclosure().contains(u3000[100])
    with pytest.raises(ValueError):
        exact_formula_probe(1)

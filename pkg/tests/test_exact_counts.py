"""Exact p2 and u tables against schoolbook series division."""

from __future__ import annotations

import json

import pytest

from oracles import p2_naive, u_naive
from unimodal.exact_counts import (
    CountTable,
    Kind,
    TableCache,
    eta_sq_coeffs,
    p2_table,
    partition_table,
    pentagonal_coeffs,
    read_binary,
    triangular,
    u_from_p2,
    u_series_oracle,
    u_table,
    write_binary,
    write_json,
)


def test_small_values():
    # sequences of 2-colored partitions and of unimodal sequences with a marked peak
    assert p2_table(9).values == (1, 2, 5, 10, 20, 36, 65, 110, 185, 300)
    assert u_table(10).values == (1, 1, 3, 6, 12, 21, 38, 63, 106, 170, 272)


def test_partition_numbers():
    p = partition_table(100)
    assert p[:10] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30]
    assert p[100] == 190569292


def test_pentagonal_coeffs_match_product():
    n = 60
    series = [1] + [0] * n
    for k in range(1, n + 1):
        for i in range(n, k - 1, -1):
            series[i] -= series[i - k]
    coeffs = pentagonal_coeffs(n)
    assert [coeffs.get(i, 0) for i in range(n + 1)] == series


def test_p2_methods_agree_with_naive():
    ref = p2_naive(400)
    assert list(p2_table(400).values) == ref
    assert list(p2_table(400, method="eta_sq").values) == ref


def test_u_routes_agree_with_naive():
    ref = u_naive(500)
    assert list(u_table(500).values) == ref
    assert list(u_series_oracle(500).values) == ref


def test_eta_sq_is_square_of_pentagonal():
    n = 200
    pent = pentagonal_coeffs(n)
    sq = [sum(pent.get(i, 0) * pent.get(j - i, 0) for i in range(j + 1)) for j in range(n + 1)]
    assert list(eta_sq_coeffs(n).values) == sq


def test_u_from_p2_negative_index_is_zero():
    t = p2_table(5)
    assert t[-3] == 0
    assert u_from_p2(t).values == u_table(5).values
    with pytest.raises(ValueError):
        u_from_p2(t, 6)


def test_triangular():
    assert [triangular(m) for m in range(6)] == [0, 1, 3, 6, 10, 15]


def test_errors():
    with pytest.raises(ValueError):
        p2_table(-1)
    with pytest.raises(ValueError):
        p2_table(3, method="nope")
    with pytest.raises(ValueError):
        u_series_oracle(-1)


def test_binary_roundtrip(tmp_path):
    t = u_table(300)
    write_binary(t, tmp_path / "u.bin")
    back = read_binary(tmp_path / "u.bin")
    assert back == t and back.kind is Kind.U
    neg = CountTable(Kind.ETA_SQ, (1, -2, -1, 2, 1, 0))
    write_binary(neg, tmp_path / "e.bin")
    assert read_binary(tmp_path / "e.bin") == neg
    (tmp_path / "bad.bin").write_bytes(b"nope")
    with pytest.raises(ValueError):
        read_binary(tmp_path / "bad.bin")


def test_json_is_decimal_strings(tmp_path):
    t = u_table(50)
    text = write_json(t, tmp_path / "u.json")
    assert json.loads(text) == [str(v) for v in t.values]
    assert json.loads((tmp_path / "u.json").read_text())[50] == str(t[50])


def test_cache_is_prefix_stable(tmp_path):
    cache = TableCache(tmp_path)
    small = cache.u(100)
    big = cache.u(250)
    assert big.values[:101] == small.values
    # a fresh cache reads the persisted table
    again = TableCache(tmp_path).u(200)
    assert again.values[:201] == big.values[:201]

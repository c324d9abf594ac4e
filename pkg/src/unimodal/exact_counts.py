"""Exact big-integer tables for 2-colored partitions p2(n) and unimodal
sequences u(n).

p2 comes from two passes of Euler's pentagonal recurrence (equivalently the
linear recurrence against the coefficients of (q;q)_inf^2), and u(n) = sum_m (-1)^m p2(n - T_m) with triangular numbers T_m.  The double
series sum_k q^k / (q;q)_k^2 is expanded independently as an oracle.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path


class Kind(str, Enum):
    P2 = "P2"
    U = "U"
    ETA_SQ = "ETA_SQ"


@dataclass(frozen=True)
class CountTable:
    kind: Kind
    values: tuple[int, ...] = field(repr=False)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> int:
        if n < 0:
            if self.kind is Kind.ETA_SQ:
                raise IndexError(n)
            return 0
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


def triangular(m: int) -> int:
    return m * (m + 1) // 2


def pentagonal_coeffs(n_max: int) -> dict[int, int]:
    """Nonzero coefficients of (q;q)_inf up to q^n_max: exponent -> sign."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    out = {0: 1}
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 > n_max:
            break
        sign = -1 if k % 2 else 1
        out[g1] = sign
        g2 = k * (3 * k + 1) // 2
        if g2 <= n_max:
            out[g2] = sign
        k += 1
    return dict(sorted(out.items()))


def eta_sq_coeffs(n_max: int) -> CountTable:
    """Coefficients of (q;q)_inf^2 up to q^n_max."""
    pent = list(pentagonal_coeffs(n_max).items())
    coeffs = [0] * (n_max + 1)
    for e1, s1 in pent:
        for e2, s2 in pent:
            if e1 + e2 > n_max:
                break
            coeffs[e1 + e2] += s1 * s2
    return CountTable(Kind.ETA_SQ, tuple(coeffs))


def _pentagonal_solve(rhs: list[int], pent: list[tuple[int, int]]) -> list[int]:
    """Solve sum_g sign_g x(n - g) = rhs(n) for x, (q;q)_inf being the sparse kernel."""
    out = [0] * len(rhs)
    for n in range(len(rhs)):
        acc = rhs[n]
        for g, sg in pent:
            if g > n:
                break
            acc -= sg * out[n - g]
        out[n] = acc
    return out


def partition_table(n_max: int) -> list[int]:
    """Ordinary partition numbers p(0..n_max) by Euler's recurrence."""
    pent = [(g, sg) for g, sg in pentagonal_coeffs(n_max).items() if g > 0]
    return _pentagonal_solve([1] + [0] * n_max, pent)


def p2_table(n_max: int, method: str = "pentagonal") -> CountTable:
    """p2(0..n_max).

    "pentagonal" solves (q;q)_inf * P2 = P twice with the sparse Euler kernel
    (O(n^1.5) big-integer steps).  "eta_sq" runs the recurrence
    sum_j eta_sq[j] p2(n-j) = [n = 0] directly; (q;q)_inf^2 has roughly n/3
    nonzero coefficients, so that route is quadratic and kept as an oracle.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if method == "pentagonal":
        pent = [(g, sg) for g, sg in pentagonal_coeffs(n_max).items() if g > 0]
        p = _pentagonal_solve([1] + [0] * n_max, pent)
        return CountTable(Kind.P2, tuple(_pentagonal_solve(p, pent)))
    if method != "eta_sq":
        raise ValueError(f"unknown method {method!r}")
    eta = eta_sq_coeffs(n_max).values
    nz = [(j, c) for j, c in enumerate(eta) if j > 0 and c != 0]
    vals = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        acc = 0
        for j, c in nz:
            if j > n:
                break
            acc -= c * vals[n - j]
        vals[n] = acc
    return CountTable(Kind.P2, tuple(vals))


def u_from_p2(p2: CountTable, n_max: int | None = None) -> CountTable:
    if n_max is None:
        n_max = p2.n_max
    if n_max > p2.n_max:
        raise ValueError("p2 table too short")
    vals = []
    for n in range(n_max + 1):
        acc = 0
        m = 0
        while triangular(m) <= n:
            term = p2.values[n - triangular(m)]
            acc += -term if m % 2 else term
            m += 1
        vals.append(acc)
    return CountTable(Kind.U, tuple(vals))


def u_table(n_max: int) -> CountTable:
    """u(0..n_max) via the alternating triangular-number sum over p2."""
    return u_from_p2(p2_table(n_max), n_max)


def u_series_oracle(n_max: int) -> CountTable:
    """u(0..n_max) by expanding sum_k q^k / (q;q)_k^2 directly."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    total = [0] * (n_max + 1)
    term = [0] * (n_max + 1)  # q^k/(q;q)_k^2 for the current k
    term[0] = 1
    total[0] = 1
    for k in range(1, n_max + 1):
        # multiply by q, then divide twice by (1 - q^k)
        term = [0] + term[:-1]
        for _ in range(2):
            for i in range(k, n_max + 1):
                term[i] += term[i - k]
        for i in range(k, n_max + 1):
            total[i] += term[i]
    return CountTable(Kind.U, tuple(total))


# -- persistence ----------------------------------------------------------------
# binary layout: magic, kind tag, count, then per entry a 4-byte length and a
# signed big-endian integer of that many bytes

_MAGIC = b"UCT1"


def write_binary(table: CountTable, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        tag = table.kind.value.encode()
        fh.write(struct.pack(">I", len(tag)) + tag)
        fh.write(struct.pack(">Q", len(table.values)))
        for v in table.values:
            raw = v.to_bytes((v.bit_length() + 8) // 8, "big", signed=True)
            fh.write(struct.pack(">I", len(raw)) + raw)


def read_binary(path: str | Path) -> CountTable:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a count table")
        (tlen,) = struct.unpack(">I", fh.read(4))
        kind = Kind(fh.read(tlen).decode())
        (count,) = struct.unpack(">Q", fh.read(8))
        vals = []
        for _ in range(count):
            (ln,) = struct.unpack(">I", fh.read(4))
            vals.append(int.from_bytes(fh.read(ln), "big", signed=True))
    return CountTable(kind, tuple(vals))


def write_json(table: CountTable, path: str | Path | None = None) -> str:
    text = json.dumps([str(v) for v in table.values])
    if path is not None:
        Path(path).write_text(text)
    return text


class TableCache:
    """Process-wide prefix-stable tables, optionally persisted to a directory.

    Extending a table recomputes from scratch but never alters old entries,
    since each value depends only on smaller indices.
    """

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else None
        self._tables: dict[Kind, CountTable] = {}

    def _path(self, kind: Kind) -> Path | None:
        if self.directory is None:
            return None
        return self.directory / f"{kind.value.lower()}.bin"

    def get(self, kind: Kind, n_max: int) -> CountTable:
        have = self._tables.get(kind)
        if have is not None and have.n_max >= n_max:
            return have
        path = self._path(kind)
        if have is None and path is not None and path.exists():
            have = read_binary(path)
            self._tables[kind] = have
            if have.n_max >= n_max:
                return have
        target = max(n_max, 2 * have.n_max if have else n_max)
        if kind is Kind.P2:
            table = p2_table(target)
        elif kind is Kind.U:
            table = u_from_p2(self.get(Kind.P2, target), target)
        else:
            table = eta_sq_coeffs(target)
        self._tables[kind] = table
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            write_binary(table, path)
        return table

    def p2(self, n_max: int) -> CountTable:
        return self.get(Kind.P2, n_max)

    def u(self, n_max: int) -> CountTable:
        return self.get(Kind.U, n_max)


default_cache = TableCache()


"""Range verification of the inequalities in INEQUALITIES for u(n).

Small n use exact tables and larger n use certificates.  Work is chunked
over a process pool with an append-only JSON-lines checkpoint.
"""

from __future__ import annotations

import hashlib
import json
import logging
import multiprocessing as mp
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .exact_counts import default_cache
from .rademacher_bounds import EXACT_THRESHOLD as P2_EXACT_THRESHOLD
from .rademacher_bounds import (
    UBounds,
    convexity_value,
    logconcave_value,
    turan_value,
)

log = logging.getLogger(__name__)

EXACT_THRESHOLD = 3000
CHUNK_SIZE = 10_000
PRECISION_LADDER = (128, 256, 512)
INEQUALITIES = ("turan", "logconcave", "convexity")

EXIT_OK = 0
EXIT_FAILED = 2
EXIT_INCONCLUSIVE = 3


@dataclass(frozen=True)
class ScheduleEntry:
    n1: int
    n2: int
    M: int
    L: int

    def __post_init__(self):
        if self.n1 > self.n2 or self.M < 0 or self.L < 0:
            raise ValueError(f"invalid schedule entry {self}")


DEFAULT_SCHEDULE = (
    ScheduleEntry(1_000, 100_000, 75, 30),
    ScheduleEntry(100_000, 500_000, 110, 30),
    ScheduleEntry(500_000, 1_000_000, 150, 30),
    ScheduleEntry(1_000_000, 4_000_000, 200, 35),
    ScheduleEntry(4_000_000, 10_000_000, 400, 35),
    ScheduleEntry(10_000_000, 20_000_000, 500, 35),
    ScheduleEntry(20_000_000, 80_000_000, 600, 35),
    ScheduleEntry(80_000_000, 100_000_000, 700, 35),
    ScheduleEntry(100_000_000, 110_000_000, 750, 35),
    ScheduleEntry(110_000_000, 790_000_000, 1000, 40),
    ScheduleEntry(790_000_000, 1_000_000_000, 1300, 40),
    ScheduleEntry(1_000_000_000, 9_400_000_000, 2000, 40),
)


class Schedule:
    """Ordered (M, L) rows; a row covers n1 <= n <= n2, consecutive rows touch."""

    def __init__(self, entries: Iterable[ScheduleEntry] = DEFAULT_SCHEDULE):
        self.entries = tuple(entries)
        if not self.entries:
            raise ValueError("empty schedule")
        for a, b in zip(self.entries, self.entries[1:]):
            if b.n1 > a.n2 + 1:
                raise ValueError(f"gap between {a} and {b}")
            if b.n1 < a.n1:
                raise ValueError("schedule rows must be ordered")

    @classmethod
    def from_json(cls, data) -> "Schedule":
        return cls(ScheduleEntry(int(r["n1"]), int(r["n2"]), int(r["M"]), int(r["L"])) for r in data)

    @classmethod
    def load(cls, path: str | Path) -> "Schedule":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> list[dict]:
        return [asdict(e) for e in self.entries]

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]

    def row_index(self, n: int) -> int:
        for i, e in enumerate(self.entries):
            if e.n1 <= n <= e.n2:
                return i
        if n < self.entries[0].n1:
            return 0
        raise ValueError(f"n = {n} lies beyond the schedule")


@dataclass
class VerificationRecord:
    inequality: str
    n1: int
    n2: int
    status: str  # verified | failed | inconclusive
    failed: list[int]
    inconclusive: list[int]
    params: dict  # base (M, L, prec, reading) of the chunk
    escalations: list[list[int]]  # [n, M, L, prec] where the base parameters did not suffice
    wall_time: float
    worker_id: int
    j: int | None = None

    @property
    def key(self) -> str:
        return chunk_key(self.inequality, self.j, self.n1, self.n2)

    def status_fields(self) -> dict:
        return {"key": self.key, "status": self.status, "failed": self.failed, "inconclusive": self.inconclusive}

    def to_json(self) -> dict:
        out = {"type": "record", "key": self.key}
        out.update(asdict(self))
        return out

    @classmethod
    def from_json(cls, data: dict) -> "VerificationRecord":
        names = cls.__dataclass_fields__.keys()
        rec = cls(**{k: data[k] for k in names if k in data})
        if rec.status not in ("verified", "failed", "inconclusive"):
            raise ValueError(f"bad status {rec.status!r}")
        if data.get("key") != rec.key:
            raise ValueError("key does not match record")
        return rec


def chunk_key(inequality: str, j: int | None, n1: int, n2: int) -> str:
    name = inequality if j is None else f"{inequality}({j})"
    return f"{name}:{n1}-{n2}"


def _status(failed: list[int], inconclusive: list[int]) -> str:
    if failed:
        return "failed"
    if inconclusive:
        return "inconclusive"
    return "verified"


# -- exact route ---------------------------------------------------------------------------

def turan_exact(u, n: int) -> int:
    """f(n) = 4(u(n)^2 - u(n-1)u(n+1))(u(n+1)^2 - u(n)u(n+2)) - (u(n)u(n+1) - u(n-1)u(n+2))^2."""
    a, b, c, d = u[n - 1], u[n], u[n + 1], u[n + 2]
    return 4 * (b * b - a * c) * (c * c - b * d) - (b * c - a * d) ** 2


def logconcave_exact(u, n: int) -> int:
    return u[n] * u[n] - u[n - 1] * u[n + 1]


def convexity_exact(u, n: int, j: int) -> int:
    return u[n] - 2 * u[n - j] + u[n - 2 * j]


def _exact_holds(inequality: str, u, n: int, j: int | None) -> bool:
    if inequality == "turan":
        return turan_exact(u, n) >= 0
    if inequality == "logconcave":
        return logconcave_exact(u, n) >= 0
    return convexity_exact(u, n, j) > 0


def _lowest_n(inequality: str, j: int | None) -> int:
    if inequality == "convexity":
        return 2 * j + 1
    return 1


# -- certificate route ---------------------------------------------------------------------

def _cert_value(inequality: str, ub: UBounds, n: int, j: int | None):
    if inequality == "turan":
        return turan_value(ub, n)
    if inequality == "logconcave":
        return logconcave_value(ub, n)
    return convexity_value(ub, n, j)


def _cert_ok(inequality: str, value) -> bool:
    return value.lo > 0 if inequality == "convexity" else value.lo >= 0


@dataclass
class ChunkTask:
    inequality: str
    n1: int
    n2: int
    schedule: list[dict]
    exact_threshold: int
    ladder: tuple[int, ...]
    reading: str = "table"
    j: int | None = None
    p2_exact_threshold: int = P2_EXACT_THRESHOLD


def verify_chunk(task: ChunkTask, worker_id: int | None = None) -> VerificationRecord:
    """Check every n in [n1, n2]; deterministic given the task."""
    t0 = time.perf_counter()
    schedule = Schedule.from_json(task.schedule)
    ineq, j = task.inequality, task.j
    failed: list[int] = []
    inconclusive: list[int] = []
    escalations: list[list[int]] = []

    exact_hi = min(task.n2, task.exact_threshold)
    if task.n1 <= exact_hi:
        u = default_cache.u(exact_hi + 2).values
        for n in range(task.n1, exact_hi + 1):
            if not _exact_holds(ineq, u, n, j):
                failed.append(n)

    start = max(task.n1, task.exact_threshold + 1)
    base_row = schedule.row_index(start) if start <= task.n2 else schedule.row_index(task.n1)
    base = schedule.entries[base_row]
    bounds: dict[tuple[int, int], UBounds] = {}

    def get_bounds(row: int, prec: int) -> UBounds:
        key = (row, prec)
        if key not in bounds:
            e = schedule.entries[row]
            bounds[key] = UBounds(e.L, e.M, prec, task.p2_exact_threshold, task.reading)
        return bounds[key]

    for n in range(start, task.n2 + 1):
        if n % 1000 == 0:
            for ub in bounds.values():
                ub.forget_below(n - 2 * (j or 1) - 2)
        row = schedule.row_index(n)
        done = False
        for r in (row, row + 1):
            if r >= len(schedule.entries):
                break
            for prec in task.ladder:
                value = _cert_value(ineq, get_bounds(r, prec), n, j)
                if _cert_ok(ineq, value):
                    done = True
                    if (r, prec) != (row, task.ladder[0]):
                        e = schedule.entries[r]
                        escalations.append([n, e.M, e.L, prec])
                    break
                # more precision only helps when rounding straddles the sign
                if value.hi < 0 or (ineq == "convexity" and value.hi <= 0):
                    break
            if done:
                break
        if not done:
            inconclusive.append(n)

    return VerificationRecord(
        inequality=ineq,
        n1=task.n1,
        n2=task.n2,
        status=_status(failed, inconclusive),
        failed=failed,
        inconclusive=inconclusive,
        params={"M": base.M, "L": base.L, "prec": task.ladder[0], "reading": task.reading},
        escalations=escalations,
        wall_time=round(time.perf_counter() - t0, 3),
        worker_id=os.getpid() if worker_id is None else worker_id,
        j=j,
    )


def _run_task(task: ChunkTask) -> VerificationRecord:
    return verify_chunk(task)


# -- checkpoint ----------------------------------------------------------------------------

class Checkpoint:
    """Append-only JSON lines: one header, then one record per finished chunk.

    Unparseable or inconsistent lines are moved to ``<path>.quarantine`` on
    load, so their chunks count as not done and are verified again.
    """

    def __init__(self, path: str | Path, campaign_id: str, schedule_hash: str):
        self.path = Path(path)
        self.campaign_id = campaign_id
        self.schedule_hash = schedule_hash
        self.records: dict[str, VerificationRecord] = {}
        self.quarantined = 0

    def header(self) -> dict:
        return {"type": "header", "campaign_id": self.campaign_id, "schedule_hash": self.schedule_hash}

    def open(self, resume: bool) -> None:
        if self.path.exists() and self.path.stat().st_size > 0:
            if not resume:
                raise FileExistsError(f"{self.path} exists; pass resume=True or remove it")
            self._load()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w") as fh:
                fh.write(json.dumps(self.header(), sort_keys=True) + "\n")

    def _load(self) -> None:
        lines = self.path.read_text().splitlines()
        good, bad = [], []
        header_ok = False
        for i, line in enumerate(lines):
            try:
                data = json.loads(line)
                if i == 0:
                    if data.get("type") != "header":
                        raise ValueError("missing header")
                    if data.get("campaign_id") != self.campaign_id or data.get("schedule_hash") != self.schedule_hash:
                        raise RuntimeError(
                            f"{self.path} belongs to campaign {data.get('campaign_id')}, not {self.campaign_id}"
                        )
                    header_ok = True
                    good.append(line)
                    continue
                rec = VerificationRecord.from_json(data)
                self.records[rec.key] = rec
                good.append(line)
            except RuntimeError:
                raise
            except Exception:
                bad.append(line)
        if not header_ok:
            bad = [ln for ln in lines if ln not in good]
            good = [json.dumps(self.header(), sort_keys=True)] + [ln for ln in good]
        if bad:
            self.quarantined = len(bad)
            with open(str(self.path) + ".quarantine", "a") as fh:
                for ln in bad:
                    fh.write(ln + "\n")
            log.warning("quarantined %d corrupt checkpoint line(s)", len(bad))
            with open(self.path, "w") as fh:
                for ln in good:
                    fh.write(ln + "\n")

    def append(self, rec: VerificationRecord) -> None:
        with open(self.path, "a") as fh:
            fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self.records[rec.key] = rec


# -- campaigns -----------------------------------------------------------------------------

@dataclass
class CampaignConfig:
    ranges: list[dict]  # {"inequality": ..., "from": a, "to": b, "j": optional}
    schedule: list[dict] = field(default_factory=lambda: Schedule().to_json())
    workers: int = 1
    precision_ladder: tuple[int, ...] = PRECISION_LADDER
    checkpoint: str | None = None
    exact_threshold: int = EXACT_THRESHOLD
    chunk_size: int = CHUNK_SIZE
    reading: str = "table"
    resume: bool = False

    @classmethod
    def from_json(cls, data: dict, base_dir: Path | None = None) -> "CampaignConfig":
        data = dict(data)
        sched = data.get("schedule")
        if isinstance(sched, str):
            p = Path(sched)
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            data["schedule"] = Schedule.load(p).to_json()
        elif sched is None:
            data.pop("schedule", None)
        if "precision_ladder" in data:
            data["precision_ladder"] = tuple(int(x) for x in data["precision_ladder"])
        known = cls.__dataclass_fields__.keys()
        unknown = set(data) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def campaign_id(self) -> str:
        ident = {
            "ranges": self.ranges,
            "schedule": self.schedule,
            "ladder": list(self.precision_ladder),
            "exact_threshold": self.exact_threshold,
            "chunk_size": self.chunk_size,
            "reading": self.reading,
        }
        return hashlib.sha256(json.dumps(ident, sort_keys=True).encode()).hexdigest()[:16]


def make_tasks(cfg: CampaignConfig) -> list[ChunkTask]:
    tasks = []
    for rng in cfg.ranges:
        ineq = {"logconcavity": "logconcave"}.get(rng["inequality"], rng["inequality"])
        if ineq not in INEQUALITIES:
            raise ValueError(f"unknown inequality {ineq!r}")
        j = rng.get("j")
        if ineq == "convexity" and (j is None or j < 1):
            raise ValueError("convexity needs j >= 1")
        a, b = int(rng["from"]), int(rng["to"])
        a = max(a, _lowest_n(ineq, j))
        if a > b:
            continue
        for n1 in range(a, b + 1, cfg.chunk_size):
            tasks.append(
                ChunkTask(
                    inequality=ineq,
                    n1=n1,
                    n2=min(b, n1 + cfg.chunk_size - 1),
                    schedule=cfg.schedule,
                    exact_threshold=cfg.exact_threshold,
                    ladder=tuple(cfg.precision_ladder),
                    reading=cfg.reading,
                    j=j if ineq == "convexity" else None,
                )
            )
    return tasks


@dataclass
class CampaignSummary:
    campaign_id: str
    records: list[VerificationRecord]
    skipped: int
    quarantined: int
    wall_time: float

    @property
    def failed(self) -> list[int]:
        return sorted({n for r in self.records for n in r.failed})

    @property
    def inconclusive(self) -> list[int]:
        return sorted({n for r in self.records for n in r.inconclusive})

    @property
    def cpu_time(self) -> float:
        return round(sum(r.wall_time for r in self.records), 3)

    @property
    def exit_code(self) -> int:
        if self.failed:
            return EXIT_FAILED
        if self.inconclusive:
            return EXIT_INCONCLUSIVE
        return EXIT_OK

    def status_set(self) -> set[tuple]:
        return {(r.key, r.status, tuple(r.failed), tuple(r.inconclusive)) for r in self.records}

    def as_dict(self) -> dict:
        return {
            "campaign_id": self.campaign_id,
            "chunks": len(self.records),
            "skipped_from_checkpoint": self.skipped,
            "quarantined_lines": self.quarantined,
            "failed": self.failed,
            "inconclusive": self.inconclusive,
            "cpu_time": self.cpu_time,
            "wall_time": round(self.wall_time, 3),
            "exit_code": self.exit_code,
        }


def iter_campaign(cfg: CampaignConfig) -> Iterator[tuple[VerificationRecord, bool]]:
    """Yield (record, from_checkpoint) in completion order."""
    tasks = make_tasks(cfg)
    ckpt = None
    done: dict[str, VerificationRecord] = {}
    if cfg.checkpoint:
        ckpt = Checkpoint(cfg.checkpoint, cfg.campaign_id(), Schedule.from_json(cfg.schedule).digest())
        ckpt.open(cfg.resume)
        done = dict(ckpt.records)
    iter_campaign.quarantined = ckpt.quarantined if ckpt else 0  # type: ignore[attr-defined]
    todo = []
    for t in tasks:
        key = chunk_key(t.inequality, t.j, t.n1, t.n2)
        if key in done:
            yield done[key], True
        else:
            todo.append(t)
    if not todo:
        return
    # the exact tables are built once here and inherited by forked workers
    if any(t.n1 <= cfg.exact_threshold for t in todo):
        default_cache.u(min(cfg.exact_threshold, max(t.n2 for t in todo)) + 2)
    default_cache.p2(P2_EXACT_THRESHOLD)
    if cfg.workers <= 1:
        results = (verify_chunk(t) for t in todo)
        for rec in results:
            if ckpt:
                ckpt.append(rec)
            yield rec, False
        return
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    with ctx.Pool(cfg.workers) as pool:
        for rec in pool.imap_unordered(_run_task, todo):
            if ckpt:
                ckpt.append(rec)
            yield rec, False


def run_campaign(cfg: CampaignConfig, on_record=None) -> CampaignSummary:
    t0 = time.perf_counter()
    records, skipped = [], 0
    for rec, cached in iter_campaign(cfg):
        records.append(rec)
        skipped += cached
        if on_record is not None:
            on_record(rec, cached)
    records.sort(key=lambda r: (r.inequality, r.j or 0, r.n1))
    return CampaignSummary(
        campaign_id=cfg.campaign_id(),
        records=records,
        skipped=skipped,
        quarantined=getattr(iter_campaign, "quarantined", 0),
        wall_time=time.perf_counter() - t0,
    )


def _range_campaign(inequality: str, n1: int, n2: int, j: int | None = None, **kw) -> CampaignSummary:
    rng = {"inequality": inequality, "from": n1, "to": n2}
    if j is not None:
        rng["j"] = j
    return run_campaign(CampaignConfig(ranges=[rng], **kw))


def verify_turan_range(n1: int, n2: int, **kw) -> CampaignSummary:
    return _range_campaign("turan", n1, n2, **kw)


def verify_logconcavity_range(n1: int, n2: int, **kw) -> CampaignSummary:
    return _range_campaign("logconcave", n1, n2, **kw)


def verify_convexity_range(j: int, n1: int, n2: int, **kw) -> CampaignSummary:
    if n1 <= 2 * j:
        raise ValueError("need n1 > 2j")
    return _range_campaign("convexity", n1, n2, j=j, **kw)

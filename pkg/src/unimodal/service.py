"""HTTP service over the library, plus the request models and handlers the CLI
reuses in-process.

Each handler takes a pydantic request and returns a JSON-ready dict, so the
CLI and the HTTP routes produce identical payloads.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from . import asymptotic_coefficients as ac
from . import exact_counts, modular_sums, rademacher_bounds, special_functions, verifier
from .exact_counts import Kind
from .interval import DEFAULT_PREC, IntervalReal


def _prec(digits: int) -> int:
    """Working precision that comfortably resolves ``digits`` decimal digits."""
    return max(DEFAULT_PREC, int(math.ceil(digits * 3.3219)) + 32)


def _iv(x: IntervalReal, digits: int) -> list[str]:
    return list(x.decimal_bounds(digits))


# -- request models ---------------------------------------------------------------------

class ExactRequest(BaseModel):
    kind: Literal["u", "p2"] = "u"
    n_max: int = Field(ge=0, le=200_000)


class DedekindRequest(BaseModel):
    h: int
    k: int = Field(ge=1)


class KloostermanP2Request(BaseModel):
    k: int = Field(ge=1)
    n: int
    m: int
    digits: int = Field(default=30, ge=1, le=1000)


class KloostermanURequest(BaseModel):
    k: int = Field(ge=1)
    n: int
    r: int
    digits: int = Field(default=30, ge=1, le=1000)


class BesselRequest(BaseModel):
    kappa: str = "2"
    x: str
    digits: int = Field(default=30, ge=1, le=1000)


class PhiRequest(BaseModel):
    ell: int = Field(ge=0)
    digits: int = Field(default=30, ge=1, le=1000)


class CoeffsRequest(BaseModel):
    N: int = Field(default=12, ge=3, le=40)
    shift: int = Field(default=0, ge=0)
    digits: int = Field(default=30, ge=1, le=200)


class ConstantsRequest(BaseModel):
    N: int = Field(default=12, ge=3, le=40)


class EncloseP2Request(BaseModel):
    n: int = Field(ge=1)
    M: int = Field(default=75, ge=0)
    digits: int = Field(default=30, ge=1, le=1000)
    exact_threshold: int = Field(default=rademacher_bounds.EXACT_THRESHOLD, ge=0)


class EncloseURequest(BaseModel):
    n: int = Field(ge=1)
    M: int = Field(default=75, ge=0)
    L: int = Field(default=30, ge=0)
    digits: int = Field(default=30, ge=1, le=1000)
    exact_threshold: int = Field(default=rademacher_bounds.EXACT_THRESHOLD, ge=0)
    reading: Literal["table", "literal"] = "table"


class CertifyRequest(BaseModel):
    n: int = Field(ge=2)
    M: int = Field(default=75, ge=0)
    L: int = Field(default=30, ge=0)
    prec: int = Field(default=DEFAULT_PREC, ge=53)
    exact_threshold: int = Field(default=rademacher_bounds.EXACT_THRESHOLD, ge=0)
    reading: Literal["table", "literal"] = "table"


class ProbeRequest(BaseModel):
    n: int = Field(ge=2, le=100_000)
    kmax: int = Field(default=1, ge=1, le=50)
    tol: float = Field(default=1e-20, gt=0)


class ThresholdRequest(BaseModel):
    n: int = Field(ge=1)


class ScheduleRow(BaseModel):
    n1: int
    n2: int
    M: int
    L: int


class VerifyRequest(BaseModel):
    inequality: Literal["turan", "logconcave", "convexity"]
    from_: int = Field(alias="from", ge=1)
    to: int = Field(ge=1)
    j: int | None = Field(default=None, ge=1)
    schedule: list[ScheduleRow] | None = None
    exact_threshold: int = Field(default=verifier.EXACT_THRESHOLD, ge=0)
    chunk_size: int = Field(default=verifier.CHUNK_SIZE, ge=1)
    precision_ladder: list[int] = Field(default_factory=lambda: list(verifier.PRECISION_LADDER))
    reading: Literal["table", "literal"] = "table"
    workers: int = Field(default=1, ge=1)
    checkpoint: str | None = None
    resume: bool = False

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _check(self):
        if self.to < self.from_:
            raise ValueError("'to' must be at least 'from'")
        if self.inequality == "convexity" and self.j is None:
            raise ValueError("convexity needs j")
        return self

    def config(self) -> verifier.CampaignConfig:
        rng = {"inequality": self.inequality, "from": self.from_, "to": self.to}
        if self.inequality == "convexity":
            rng["j"] = self.j
        sched = [r.model_dump() for r in self.schedule] if self.schedule else verifier.Schedule().to_json()
        return verifier.CampaignConfig(
            ranges=[rng],
            schedule=sched,
            workers=self.workers,
            precision_ladder=tuple(self.precision_ladder),
            checkpoint=self.checkpoint,
            exact_threshold=self.exact_threshold,
            chunk_size=self.chunk_size,
            reading=self.reading,
            resume=self.resume,
        )


# -- handlers ---------------------------------------------------------------------------

def exact(req: ExactRequest) -> dict:
    table = exact_counts.default_cache.get(Kind.U if req.kind == "u" else Kind.P2, req.n_max)
    return {"kind": req.kind, "n_max": req.n_max, "values": [str(v) for v in table.values[: req.n_max + 1]]}


def dedekind(req: DedekindRequest) -> dict:
    if math.gcd(req.h, req.k) != 1:
        raise ValueError("h and k must be coprime")
    s = modular_sums.dedekind_sum(req.h, req.k)
    return {"h": req.h, "k": req.k, "s": str(s)}


def kloosterman_p2(req: KloostermanP2Request) -> dict:
    z = modular_sums.kloosterman_p2(req.k, req.n, req.m, _prec(req.digits))
    return {"k": req.k, "n": req.n, "m": req.m, "re": _iv(z.re, req.digits), "im": _iv(z.im, req.digits)}


def kloosterman_u(req: KloostermanURequest) -> dict:
    z = modular_sums.kloosterman_u(req.k, req.n, req.r, _prec(req.digits))
    return {"k": req.k, "n": req.n, "r": req.r, "re": _iv(z.re, req.digits), "im": _iv(z.im, req.digits)}


def bessel_i(req: BesselRequest) -> dict:
    x = Fraction(req.x)
    val = special_functions.bessel_I(Fraction(req.kappa), x, _prec(req.digits))
    return {"kappa": req.kappa, "x": req.x, "value": _iv(val, req.digits)}


def phi_coeff(req: PhiRequest) -> dict:
    val = special_functions.phi_coeff(req.ell, _prec(req.digits))
    return {"ell": req.ell, "value": _iv(val, req.digits)}


def coeffs(req: CoeffsRequest) -> dict:
    cs = ac.shifted_coefficients(req.N, req.shift)
    out = cs.as_dict()
    out["A"] = [_iv(a, req.digits) for a in cs.A]
    out["C"] = _iv(cs.C, req.digits)
    return out


def constants(req: ConstantsRequest) -> dict:
    out = {"N": req.N, "ledger": ac.error_constants(req.N).as_dict()}
    out["shifted"] = {s: ac.shifted_error_constants(req.N, s).as_dict() for s in (1, 2, 3)}
    if req.N == 12:
        out["audit"] = ac.audit_printed_constants().as_dict()
    return out


def enclose_p2(req: EncloseP2Request) -> dict:
    enc = rademacher_bounds.p2_enclosure(req.M, req.n, _prec(req.digits), req.exact_threshold)
    return enc.as_dict(req.digits)


def enclose_u(req: EncloseURequest) -> dict:
    enc = rademacher_bounds.u_enclosure(req.L, req.M, req.n, _prec(req.digits), req.exact_threshold, req.reading)
    return enc.as_dict(req.digits)


def certify_turan(req: CertifyRequest) -> dict:
    c = rademacher_bounds.turan_certificate(
        req.L, req.M, req.n, req.prec, exact_threshold=req.exact_threshold, reading=req.reading
    )
    return {
        "inequality": c.inequality,
        "n": c.n,
        "status": c.status,
        "value": list(c.value.decimal_bounds(20)),
        "L": c.L,
        "M": c.M,
        "prec": c.prec,
        "reading": req.reading,
    }


def probe(req: ProbeRequest) -> dict:
    return rademacher_bounds.exact_formula_probe(req.n, req.kmax, req.tol).as_dict()


def threshold(req: ThresholdRequest) -> dict:
    return ac.turan_threshold_check(req.n).as_dict()


def verify(req: VerifyRequest) -> dict:
    summary = verifier.run_campaign(req.config())
    out = summary.as_dict()
    if req.inequality == "convexity":
        # analytic cutoff beyond which the asymptotic route alone proves the inequality
        out["n_delta"] = str(ac.n_delta(req.j))
    out["records"] = [r.to_json() for r in summary.records]
    return out


# -- app --------------------------------------------------------------------------------

app = FastAPI(title="unimodal", version="0.1.0")


def _call(handler, req):
    try:
        return handler(req)
    except (ValueError, ArithmeticError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/exact")
def exact_route(req: ExactRequest) -> dict:
    return _call(exact, req)


@app.post("/sums/dedekind")
def dedekind_route(req: DedekindRequest) -> dict:
    return _call(dedekind, req)


@app.post("/sums/kloosterman-p2")
def kloosterman_p2_route(req: KloostermanP2Request) -> dict:
    return _call(kloosterman_p2, req)


@app.post("/sums/kloosterman-u")
def kloosterman_u_route(req: KloostermanURequest) -> dict:
    return _call(kloosterman_u, req)


@app.post("/special/bessel-i")
def bessel_route(req: BesselRequest) -> dict:
    return _call(bessel_i, req)


@app.post("/special/phi-coeff")
def phi_route(req: PhiRequest) -> dict:
    return _call(phi_coeff, req)


@app.post("/coeffs")
def coeffs_route(req: CoeffsRequest) -> dict:
    return _call(coeffs, req)


@app.post("/constants")
def constants_route(req: ConstantsRequest) -> dict:
    return _call(constants, req)


@app.post("/enclose/p2")
def enclose_p2_route(req: EncloseP2Request) -> dict:
    return _call(enclose_p2, req)


@app.post("/enclose/u")
def enclose_u_route(req: EncloseURequest) -> dict:
    return _call(enclose_u, req)


@app.post("/certify/turan")
def certify_route(req: CertifyRequest) -> dict:
    return _call(certify_turan, req)


@app.post("/probe/exact-formula")
def probe_route(req: ProbeRequest) -> dict:
    return _call(probe, req)


@app.post("/threshold/turan")
def threshold_route(req: ThresholdRequest) -> dict:
    return _call(threshold, req)


@app.post("/verify")
def verify_route(req: VerifyRequest) -> dict:
    if req.checkpoint is not None:
        raise HTTPException(status_code=422, detail="checkpoints are a CLI feature; omit 'checkpoint'")
    return _call(verify, req)

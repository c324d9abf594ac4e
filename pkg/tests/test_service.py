"""HTTP routes through the FastAPI test client."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from unimodal.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_exact(client):
    r = client.post("/exact", json={"kind": "u", "n_max": 10})
    assert r.status_code == 200
    assert r.json()["values"] == ["1", "1", "3", "6", "12", "21", "38", "63", "106", "170", "272"]
    assert client.post("/exact", json={"kind": "p2", "n_max": 3}).json()["values"] == ["1", "2", "5", "10"]


def test_sums(client):
    assert client.post("/sums/dedekind", json={"h": 5, "k": 17}).json()["s"] == "1/17"
    assert client.post("/sums/dedekind", json={"h": 2, "k": 4}).status_code == 422
    z = client.post("/sums/kloosterman-u", json={"k": 3, "n": 4, "r": 1, "digits": 10}).json()
    assert float(z["re"][0]) <= float(z["re"][1])
    z = client.post("/sums/kloosterman-p2", json={"k": 5, "n": 3, "m": 1}).json()
    assert z["re"][0].startswith("2.6180339887")


def test_special(client):
    b = client.post("/special/bessel-i", json={"kappa": "3/2", "x": "2.5", "digits": 20}).json()
    assert b["value"][0].startswith("1.87327838883761888")
    p = client.post("/special/phi-coeff", json={"ell": 0, "digits": 10}).json()
    assert p["value"][0].startswith("9.99999999") or p["value"][0].startswith("1.0")


def test_coefficients_and_constants(client):
    c = client.post("/coeffs", json={"N": 3, "shift": 0, "digits": 12}).json()
    assert len(c["A"]) == 5 and c["cutoff"] == 31957104
    k = client.post("/constants", json={"N": 12}).json()
    assert k["audit"]["ok"] is True


def test_enclose_and_certify(client):
    e = client.post("/enclose/u", json={"n": 5000, "digits": 15}).json()
    assert e["target"] == "U" and float(e["lower"]) <= float(e["upper"])
    p = client.post("/enclose/p2", json={"n": 5000, "M": 75}).json()
    assert p["provenance"] == "truncation(M=75)"
    c = client.post("/certify/turan", json={"n": 5000}).json()
    assert c["status"] == "verified"


def test_threshold(client):
    t = client.post("/threshold/turan", json={"n": 78304}).json()
    assert [c["check"] for c in t["checks"]][-1] == "4Q1>Q2"
    assert t["checks"][-1]["holds"] is True


def test_probe(client):
    r = client.post("/probe/exact-formula", json={"n": 100, "kmax": 1}).json()
    assert r["certified"] is False


def test_verify(client):
    r = client.post("/verify", json={"inequality": "logconcave", "from": 1, "to": 50}).json()
    assert r["failed"] == [1, 5, 7] and r["exit_code"] == 2
    r = client.post("/verify", json={"inequality": "convexity", "j": 1, "from": 3, "to": 40}).json()
    assert r["exit_code"] == 0 and r["n_delta"] == "84951175932783245429"
    bad = client.post("/verify", json={"inequality": "convexity", "from": 3, "to": 40})
    assert bad.status_code == 422
    bad = client.post("/verify", json={"inequality": "turan", "from": 30, "to": 3})
    assert bad.status_code == 422
    bad = client.post("/verify", json={"inequality": "turan", "from": 3, "to": 30, "checkpoint": "/tmp/x"})
    assert bad.status_code == 422

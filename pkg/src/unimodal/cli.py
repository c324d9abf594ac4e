"""Command-line client.  Every subcommand builds the same request model the HTTP
service accepts and runs its handler in-process, printing JSON.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from . import asymptotic_coefficients as ac
from . import exact_counts, service, verifier
from .exact_counts import Kind


def _emit(payload) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_exact(args) -> int:
    req = service.ExactRequest(kind=args.kind, n_max=args.n_max)
    if args.format == "binary":
        if not args.out:
            raise ValueError("--format binary needs --out")
        table = exact_counts.default_cache.get(Kind.U if args.kind == "u" else Kind.P2, args.n_max)
        exact_counts.write_binary(exact_counts.CountTable(table.kind, table.values[: args.n_max + 1]), args.out)
        return 0
    payload = service.exact(req)["values"]
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh)
    else:
        _emit(payload)
    return 0


def _cmd_sums(args) -> int:
    if args.which == "dedekind":
        _emit(service.dedekind(service.DedekindRequest(h=args.h, k=args.k)))
    elif args.which == "kloosterman-p2":
        _emit(service.kloosterman_p2(service.KloostermanP2Request(k=args.k, n=args.n, m=args.m, digits=args.digits)))
    else:
        _emit(service.kloosterman_u(service.KloostermanURequest(k=args.k, n=args.n, r=args.r, digits=args.digits)))
    return 0


def _cmd_special(args) -> int:
    if args.which == "bessel-i":
        _emit(service.bessel_i(service.BesselRequest(kappa=args.kappa, x=args.x, digits=args.digits)))
    else:
        _emit(service.phi_coeff(service.PhiRequest(ell=args.ell, digits=args.digits)))
    return 0


def _cmd_coeffs(args) -> int:
    _emit(service.coeffs(service.CoeffsRequest(N=args.N, shift=args.shift, digits=args.digits)))
    return 0


def _cmd_constants(args) -> int:
    _emit(service.constants(service.ConstantsRequest(N=args.N)))
    return 0


def _cmd_enclose(args) -> int:
    if args.which == "p2":
        req = service.EncloseP2Request(n=args.n, M=args.M, digits=args.digits, exact_threshold=args.exact_threshold)
        _emit(service.enclose_p2(req))
    else:
        req = service.EncloseURequest(
            n=args.n, M=args.M, L=args.L, digits=args.digits, exact_threshold=args.exact_threshold, reading=args.reading
        )
        _emit(service.enclose_u(req))
    return 0


def _cmd_certify(args) -> int:
    req = service.CertifyRequest(
        n=args.n, M=args.M, L=args.L, prec=args.prec, exact_threshold=args.exact_threshold, reading=args.reading
    )
    out = service.certify_turan(req)
    _emit(out)
    return 0 if out["status"] == "verified" else verifier.EXIT_INCONCLUSIVE


def _cmd_probe(args) -> int:
    _emit(service.probe(service.ProbeRequest(n=args.n, kmax=args.kmax, tol=args.tol)))
    return 0


def _cmd_threshold(args) -> int:
    out = service.threshold(service.ThresholdRequest(n=args.n))
    _emit(out)
    return 0 if out["holds"] else verifier.EXIT_INCONCLUSIVE


_INEQ = {"turan": "turan", "logconcavity": "logconcave", "convexity": "convexity"}


def _cmd_verify(args) -> int:
    schedule = verifier.Schedule.load(args.schedule).to_json() if args.schedule else None
    req = service.VerifyRequest(
        inequality=_INEQ[args.which],
        **{"from": getattr(args, "from")},
        to=args.to,
        j=args.j,
        schedule=schedule,
        exact_threshold=args.exact_threshold,
        chunk_size=args.chunk_size,
        reading=args.reading,
        workers=args.workers,
        checkpoint=args.checkpoint,
        resume=args.resume,
    )

    label = f"{args.which} {req.from_}..{req.to}"
    j = req.j if req.inequality == "convexity" else None
    return _run_and_report(req.config(), label, j)


def _run_and_report(cfg: verifier.CampaignConfig, label: str, j: int | None = None) -> int:
    """Stream JSON-line records to stdout and a summary to stderr; return the exit code."""

    def show(rec, cached):
        line = rec.to_json()
        line["from_checkpoint"] = bool(cached)
        sys.stdout.write(json.dumps(line, sort_keys=True) + "\n")
        sys.stdout.flush()

    summary = verifier.run_campaign(cfg, on_record=show)
    s = summary.as_dict()
    print(
        f"{label}: {s['chunks']} chunks "
        f"({s['skipped_from_checkpoint']} from checkpoint), "
        f"failed={len(s['failed'])} inconclusive={len(s['inconclusive'])}, "
        f"cpu {s['cpu_time']:.1f}s wall {s['wall_time']:.1f}s",
        file=sys.stderr,
    )
    if j is not None:
        print(f"analytic cutoff n_delta({j}) = {ac.n_delta(j)}", file=sys.stderr)
    if s["failed"]:
        print(f"failed n: {s['failed']}", file=sys.stderr)
    if s["inconclusive"]:
        print(f"inconclusive n: {s['inconclusive'][:50]}", file=sys.stderr)
    return summary.exit_code


def _cmd_campaign(args) -> int:
    path = Path(args.config)
    cfg = verifier.CampaignConfig.from_json(json.loads(path.read_text()), base_dir=path.parent)
    if args.resume:
        cfg.resume = True
    if args.workers is not None:
        cfg.workers = args.workers
    js = sorted({r["j"] for r in cfg.ranges if r.get("inequality") == "convexity" and "j" in r})
    return _run_and_report(cfg, f"campaign {path.name}", js[0] if len(js) == 1 else None)


def _cmd_serve(args) -> int:
    try:
        import uvicorn
    except ImportError:
        print("serve needs uvicorn: pip install 'artifact[serve]'", file=sys.stderr)
        return 1
    uvicorn.run(service.app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unimodal", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("exact", help="exact u(n) or p2(n) table")
    e.add_argument("--kind", choices=("u", "p2"), default="u")
    e.add_argument("--n-max", type=int, required=True)
    e.add_argument("--out")
    e.add_argument("--format", choices=("json", "binary"), default="json")
    e.set_defaults(func=_cmd_exact)

    s = sub.add_parser("sums", help="Dedekind and Kloosterman sums")
    ss = s.add_subparsers(dest="which", required=True)
    d = ss.add_parser("dedekind")
    d.add_argument("--h", type=int, required=True)
    d.add_argument("--k", type=int, required=True)
    kp = ss.add_parser("kloosterman-p2")
    kp.add_argument("--k", type=int, required=True)
    kp.add_argument("--n", type=int, required=True)
    kp.add_argument("--m", type=int, required=True)
    kp.add_argument("--digits", type=int, default=30)
    ku = ss.add_parser("kloosterman-u")
    ku.add_argument("--k", type=int, required=True)
    ku.add_argument("--n", type=int, required=True)
    ku.add_argument("--r", type=int, required=True)
    ku.add_argument("--digits", type=int, default=30)
    s.set_defaults(func=_cmd_sums)

    sp = sub.add_parser("special", help="Bessel I and cotangent-kernel coefficients")
    sps = sp.add_subparsers(dest="which", required=True)
    b = sps.add_parser("bessel-i")
    b.add_argument("--kappa", default="2")
    b.add_argument("--x", required=True)
    b.add_argument("--digits", type=int, default=30)
    ph = sps.add_parser("phi-coeff")
    ph.add_argument("--ell", type=int, required=True)
    ph.add_argument("--digits", type=int, default=30)
    sp.set_defaults(func=_cmd_special)

    c = sub.add_parser("coeffs", help="asymptotic coefficients A_s(m), C_N(s) and cutoffs")
    c.add_argument("--N", type=int, default=12)
    c.add_argument("--shift", type=int, default=0)
    c.add_argument("--digits", type=int, default=30)
    c.add_argument("--format", choices=("json",), default="json")
    c.set_defaults(func=_cmd_coeffs)

    k = sub.add_parser("constants", help="error constants and the audit of the rounded N = 12 constants")
    k.add_argument("--N", type=int, default=12)
    k.set_defaults(func=_cmd_constants)

    t = sub.add_parser("threshold", help="certified N = 12 Turan checks at one n")
    t.add_argument("--n", type=int, required=True)
    t.set_defaults(func=_cmd_threshold)

    en = sub.add_parser("enclose", help="certified enclosures of p2(n) or u(n)")
    ens = en.add_subparsers(dest="which", required=True)
    for name in ("p2", "u"):
        q = ens.add_parser(name)
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--M", type=int, default=75)
        if name == "u":
            q.add_argument("--L", type=int, default=30)
            q.add_argument("--reading", choices=("table", "literal"), default="table")
        q.add_argument("--digits", type=int, default=30)
        q.add_argument("--exact-threshold", type=int, default=1000)
    en.set_defaults(func=_cmd_enclose)

    ce = sub.add_parser("certify", help="certificate for one n")
    ces = ce.add_subparsers(dest="which", required=True)
    ct = ces.add_parser("turan")
    ct.add_argument("--n", type=int, required=True)
    ct.add_argument("--M", type=int, default=75)
    ct.add_argument("--L", type=int, default=30)
    ct.add_argument("--prec", type=int, default=128)
    ct.add_argument("--exact-threshold", type=int, default=1000)
    ct.add_argument("--reading", choices=("table", "literal"), default="table")
    ce.set_defaults(func=_cmd_certify)

    pr = sub.add_parser("probe", help="numerical probe of the exact formula (not certified)")
    prs = pr.add_subparsers(dest="which", required=True)
    pe = prs.add_parser("exact-formula")
    pe.add_argument("--n", type=int, required=True)
    pe.add_argument("--kmax", type=int, default=1)
    pe.add_argument("--tol", type=float, default=1e-20)
    pr.set_defaults(func=_cmd_probe)

    v = sub.add_parser("verify", help="range verification campaign")
    vs = v.add_subparsers(dest="which", required=True)
    for name in ("turan", "logconcavity", "convexity"):
        q = vs.add_parser(name)
        q.add_argument("--from", type=int, required=True)
        q.add_argument("--to", type=int, required=True)
        q.add_argument("--j", type=int, default=None, required=name == "convexity")
        q.add_argument("--schedule")
        q.add_argument("--workers", type=int, default=1)
        q.add_argument("--checkpoint")
        q.add_argument("--resume", action="store_true")
        q.add_argument("--exact-threshold", type=int, default=verifier.EXACT_THRESHOLD)
        q.add_argument("--chunk-size", type=int, default=verifier.CHUNK_SIZE)
        q.add_argument("--reading", choices=("table", "literal"), default="table")
    v.set_defaults(func=_cmd_verify)

    cp = sub.add_parser("campaign", help="run a campaign described by a JSON config file")
    cp.add_argument("--config", required=True)
    cp.add_argument("--workers", type=int, default=None)
    cp.add_argument("--resume", action="store_true")
    cp.set_defaults(func=_cmd_campaign)

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    sv.set_defaults(func=_cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValueError, ValidationError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

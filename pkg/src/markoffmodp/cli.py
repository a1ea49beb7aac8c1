"""Command-line interface.

Exit codes: 0 success, 1 domain error, 2 inconclusive verdict,
3 resource limit, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 64 if exc.code not in (0, None) else 0
    if not hasattr(args, "func"):
        parser.print_usage()
        return 64
    try:
        return args.func(args) or 0
    except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceWarning as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3


def _build_parser():
    p = argparse.ArgumentParser(prog="markoff", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command")

    r = sub.add_parser("reduce", help="reduce a polynomial in x, y, z")
    r.add_argument("--kappa", required=True, help="'sym' or a rational value")
    r.add_argument("--poly", required=True, help="e.g. 'y^4 - y^2*z^2 + 1/2*x^2*y^2'")
    r.add_argument("--p", type=int, help="prime modulus (required for numeric kappa)")
    r.add_argument("--phi-x", action="store_true", help="first-coordinate-preserving reduction")
    r.set_defaults(func=cmd_reduce)

    o = sub.add_parser("orbits", help="orbit decomposition of the surface at (p, kappa)")
    o.add_argument("--p", type=int, required=True)
    o.add_argument("--kappa", type=int, required=True)
    o.add_argument("--vieta-only", action="store_true")
    o.add_argument("--json", action="store_true")
    o.set_defaults(func=cmd_orbits)

    v1 = sub.add_parser("verify-main1", help="single-orbit check for coordinate moves")
    v1.add_argument("--p", type=int, required=True)
    v1.add_argument("--kappa", type=int, help="restrict to one kappa")
    v1.set_defaults(func=cmd_verify_main1)

    vn = sub.add_parser("verify-nielsen", help="pair-move orbit counts over SL2(F_p)")
    vn.add_argument("--p", type=int, required=True)
    vn.add_argument("--kappa", type=int)
    vn.set_defaults(func=cmd_verify_nielsen)

    sp = sub.add_parser("spectral", help="q-vector and determinant diagnostics")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--kappa", type=int, required=True)
    sp.add_argument("--qn", type=int, default=4, help="compare q_1..q_n (n <= 4)")
    sp.set_defaults(func=cmd_spectral)

    ce = sub.add_parser("certify", help="matrix-rank certification for a modulus d")
    ce.add_argument("--d", type=int, required=True)
    ce.add_argument("--out", help="write the certificate JSON here")
    ce.add_argument("--seed", type=int, default=1729)
    ce.add_argument("--n-d", type=int, help="override the level bound")
    ce.add_argument("--threads", type=int, default=1, help="cap worker parallelism")
    ce.set_defaults(func=cmd_certify)

    rc = sub.add_parser("recheck", help="re-verify a certificate")
    rc.add_argument("--cert", required=True)
    rc.set_defaults(func=cmd_recheck)

    ca = sub.add_parser("cache", help="build or verify the reduction table")
    ca.add_argument("--build", nargs=2, type=int, metavar=("M_MAX", "N_MAX"))
    ca.add_argument("--path", help="cache file (default MARKOFF_CACHE or ./markoff_cache.json)")
    ca.add_argument("--verify", action="store_true")
    ca.set_defaults(func=cmd_cache)

    st = sub.add_parser("selftest", help="run the recorded checks")
    st.add_argument("--level", choices=("fast", "full"), default="fast")
    st.set_defaults(func=cmd_selftest)
    return p


def cmd_reduce(args):
    from fractions import Fraction
    from .trired import (
        SYM, XPoly, TriPoly, parse_poly, phi, phi_x, format_xpoly, format_tripoly,
        prime_ring,
    )
    from .rings import KPoly

    if args.p is not None:
        if args.p < 3 or args.p % 2 == 0:
            raise ValueError("p must be an odd prime")
        ring = prime_ring(args.p, 0)
        kv = 0 if args.kappa == "sym" else ring.from_fraction(Fraction(args.kappa))
        if args.kappa == "sym":
            raise ValueError("symbolic kappa cannot be combined with --p")
        ring = prime_ring(args.p, kv)
        f = parse_poly(args.poly, ring)
        out = phi_x(f).to_tripoly() if args.phi_x else phi(f).to_tripoly()
        print(format_tripoly(out))
        return 0
    # exact arithmetic over Q: reduce symbolically, then specialize kappa
    f = parse_poly(args.poly, SYM)
    res = phi_x(f).to_tripoly() if args.phi_x else phi(f).to_tripoly()
    if args.kappa != "sym":
        kv = Fraction(args.kappa)
        spec = TriPoly(SYM)
        for e, c in res.terms.items():
            spec = spec + TriPoly.monomial(SYM, *e, coeff=c(kv))
        res = spec
        print(format_tripoly(res))
    elif not args.phi_x:
        # univariate symbolic output reads best with grouped coefficients
        print(format_xpoly(XPoly(SYM, {a: c for (a, _, _), c in res.terms.items()})))
    else:
        print(format_tripoly(res))
    return 0


def cmd_orbits(args):
    from .orbits import enumerate_orbits

    rep = enumerate_orbits(args.p, args.kappa, "vieta" if args.vieta_only else "gamma")
    if args.json:
        print(rep.to_json())
    else:
        print(f"p={rep.p} kappa={rep.kappa} generators={rep.generators} points={rep.total}")
        for o in rep.orbits:
            tag = o.category if not o.essential else "essential"
            print(f"  orbit rep={o.rep} size={o.size} [{tag}]")
    return 0


def cmd_verify_main1(args):
    from .orbits import verify_main1

    if args.p < 3 or args.p == 2:
        raise ValueError("p must be an odd prime")
    kappas = [args.kappa] if args.kappa is not None else [k for k in range(args.p) if k != 4 % args.p]
    all_ok = True
    for kappa in kappas:
        res = verify_main1(args.p, kappa)
        ok = "ok" if res["matches"] else "MISMATCH"
        all_ok &= res["matches"]
        print(
            f"p={args.p} kappa={kappa}: orbits={res['orbit_count']} "
            f"exceptional={res['exceptional_orbits']} {ok}"
        )
    return 0 if all_ok else 1


def cmd_verify_nielsen(args):
    from .nielsen import nielsen_orbits

    kappas = [args.kappa] if args.kappa is not None else [k for k in range(args.p) if k != 4 % args.p]
    all_ok = True
    for kappa in kappas:
        res = nielsen_orbits(args.p, kappa)
        expect = 2 if (kappa % args.p == 0 and args.p % 4 == 1) else 1
        ok = res["orbit_count"] in (0, expect)
        all_ok &= ok
        print(json.dumps(res, sort_keys=True), "" if ok else "MISMATCH")
    return 0 if all_ok else 1


def cmd_spectral(args):
    from .spectral import qn_direct, qn_formula, local_determinants

    out = {"p": args.p, "kappa": args.kappa, "qn_match": {}}
    for n in range(1, min(args.qn, 4) + 1):
        out["qn_match"][str(n)] = qn_direct(n, args.p, args.kappa) == qn_formula(n, args.p, args.kappa)
    dets = local_determinants(args.p, args.kappa)
    out["det2"] = dets["det2"]
    out["det2_expected"] = dets["det2_expected"]
    out["chi_kappa"] = dets["chi_kappa"]
    if "det3" in dets:
        out["det3"] = dets["det3"]
        out["det3_expected"] = dets["det3_expected"]
    print(json.dumps(out, sort_keys=True))
    ok = all(out["qn_match"].values())
    if dets["chi_kappa"] == 1:
        ok &= dets["det2"] == dets["det2_expected"]
    elif "det3" in dets:
        ok &= dets["det3"] == dets["det3_expected"]
    return 0 if ok else 1


def cmd_certify(args):
    from .certify import certify

    if args.d < 2:
        raise ValueError("d must be >= 2")
    _ = args.threads  # reductions and folds are sequential and deterministic
    cert = certify(args.d, n_d=args.n_d, seed=args.seed)
    text = cert.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out} ({len(text)} bytes)")
    print(f"d={args.d} verdict={cert.verdict()}")
    s = cert.payload.get("stripped")
    if s:
        print(f"  residual={s['residual']} b={s['b']} a_digits={len(s['a'])}")
        if s["exempt_primes"]:
            print(f"  exempt primes: {s['exempt_primes']}")
    return 0 if cert.verdict() == "true" else 2


def cmd_recheck(args):
    from .certify import Certificate, recheck_errors

    with open(args.cert) as fh:
        cert = Certificate.from_json(fh.read())
    errors = recheck_errors(cert.payload)
    if errors:
        for e in errors:
            print(f"FAIL: {e}")
        return 1
    print("certificate consistent")
    return 0


def _cache_path(args):
    return args.path or os.environ.get("MARKOFF_CACHE") or "markoff_cache.json"


def cmd_cache(args):
    from .trired import cache_build, ReductionTable
    from .certify import canonical_json

    path = _cache_path(args)
    if args.build:
        m_max, n_max = args.build
        table = cache_build(m_max, n_max)
        payload = table.to_payload()
        body = canonical_json(payload)
        payload["checksum"] = hashlib.sha256(body.encode()).hexdigest()
        with open(path, "w") as fh:
            fh.write(canonical_json(payload))
        print(f"wrote {path}: {len(payload['entries'])} entries")
        return 0
    # verify / load
    with open(path) as fh:
        payload = json.load(fh)
    stored = payload.pop("checksum", None)
    body = canonical_json(payload)
    digest = hashlib.sha256(body.encode()).hexdigest()
    if stored != digest:
        print("checksum mismatch: cache is corrupt; rebuild it", file=sys.stderr)
        return 1
    if payload.get("version") != ReductionTable.VERSION:
        print(
            f"cache version {payload.get('version')!r} unsupported: rebuilding",
            file=sys.stderr,
        )
        table = cache_build(payload["m_max"], payload["n_max"])
        fresh = table.to_payload()
        fresh["checksum"] = hashlib.sha256(canonical_json(fresh).encode()).hexdigest()
        with open(path, "w") as fh:
            fh.write(canonical_json(fresh))
        print(f"rebuilt {path}")
        return 0
    table = ReductionTable.from_payload(payload)
    print(f"cache ok: m_max={table.m_max} n_max={table.n_max} entries={len(table.entries)}")
    return 0


def cmd_selftest(args):
    checks = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except Exception as exc:  # noqa: BLE001 - report, do not crash the harness
            ok = False
            name = f"{name} ({exc!r})"
        checks.append(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name}")

    from fractions import Fraction
    from .trired import SYM, parse_poly, phi, phi_x, prime_ring
    from .rings import KPoly, CycloElem
    from .spectral import (
        qn_direct, qn_formula, local_determinants, verify_An_eigen, gen_eigen_lambda2,
    )
    from .orbits import enumerate_orbits, verify_main1
    from .nielsen import nielsen_orbits

    R0 = prime_ring(10**6 + 3, 0)
    check("reduction anchor x^4-3x^2", lambda: phi(parse_poly("y^4 - y^2*z^2 + 1/2*x^2*y^2", R0)).coeffs == {4: 1, 2: 10**6})
    check("reduction anchor 2x^4+24x^2", lambda: phi(parse_poly("x^4*y^2", R0)).coeffs == {4: 2, 2: 24})
    check("reduction anchor 3x^4+36x^2", lambda: phi(parse_poly("x^2*y^2*z^2", R0)).coeffs == {4: 3, 2: 36})
    check("x-preserving reduction vanishes", lambda: phi_x(parse_poly("x*y^4 - x*y^2*z^2 + 1/2*x^3*y^2", R0)).is_zero())
    check("block eigen identity", lambda: verify_An_eigen(3, CycloElem.zeta(6)))
    check("generalized eigenvectors", lambda: gen_eigen_lambda2(2)[2] == [Fraction(4, 6), Fraction(8, 6), Fraction(4, 6), Fraction(1, 6), 0, 0])
    check("q vectors (p=13)", lambda: all(qn_direct(n, 13, 5) == qn_formula(n, 13, 5) for n in (1, 2, 3, 4)))
    check("pairing determinant chi=+1", lambda: (lambda r: r["det2"] == r["det2_expected"])(local_determinants(101, 5)))
    check("pairing determinant chi=-1", lambda: (lambda r: r.get("det3") == r.get("det3_expected"))(local_determinants(101, 2)))
    check("orbit count (7, 0)", lambda: len(enumerate_orbits(7, 0).orbits) == 2)
    check("single-orbit check (13, all kappa)", lambda: all(verify_main1(13, k)["matches"] for k in range(13) if k != 4))
    check("pair orbits (5, 0) doubled", lambda: nielsen_orbits(5, 0)["orbit_count"] == 2)
    check("pair orbits (7, 0) single", lambda: nielsen_orbits(7, 0)["orbit_count"] == 1)

    if args.level == "full":
        from .certify import certify, recheck

        check("single-orbit sweep p<=31", lambda: all(
            verify_main1(p, k)["matches"]
            for p in (5, 7, 11, 13, 17, 19, 23, 29, 31)
            for k in range(p) if k != 4 % p
        ))
        check("pair orbit counts p=11", lambda: all(
            nielsen_orbits(11, k)["orbit_count"] in (0, 1)
            for k in range(11) if k != 4
        ))
        cert = certify(5)
        check("certification d=5 verdict true", lambda: cert.verdict() == "true")
        check("certificate recheck", lambda: recheck(cert))
    print(f"{sum(checks)}/{len(checks)} checks passed")
    return 0 if all(checks) else 1

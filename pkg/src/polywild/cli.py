"""Command-line front end.

JSON goes to stdout and diagnostics to stderr.  Exit codes: 0 success,
1 negative verdict (wild or uncertified), 2 input error, 3 an identity
that must hold failed.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from .coeff import QQ, domain_from_name
from .deriv import Derivation, LndEvidence, exp, formal_log, lnd_verify
from .endo import Endo, compose
from .errors import ConsistencyFailure, InputError, PolywildError
from .parse import parse_poly
from .poly import Ring
from .weights import Weight

OK, NEGATIVE, INPUT_ERROR, CONSISTENCY = 0, 1, 2, 3


class UsageError(InputError):
    pass


# ----------------------------------------------------------------------
# input helpers


def _split(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    if any(not p for p in parts):
        raise UsageError(f"empty entry in list {text!r}")
    return parts


def _arity(texts: list[str]) -> int:
    found = [int(v) for t in texts for v in re.findall(r"x(\d+)", t)]
    return max(found, default=1)


def _ring(args, texts: list[str], n: int | None = None) -> Ring:
    dom = domain_from_name(args.ring) if args.ring else None
    if dom is None:
        dom = QQ
        for t in texts:
            probe = parse_poly(t, n=max(_arity([t]), 1))
            if probe.ring.domain != QQ:
                dom = probe.ring.domain
                break
    arity = n or args.n or _arity(texts)
    return Ring(arity, dom)


def _polys(texts: list[str], ring: Ring):
    return [parse_poly(t, ring) for t in texts]


def _endo(args, images: str, inverse: str | None = None, n: int | None = None) -> Endo:
    ims = _split(images)
    inv = _split(inverse) if inverse else []
    ring = _ring(args, ims + inv, n or len(ims))
    return Endo(ring, _polys(ims, ring), _polys(inv, ring) if inv else None)


def _weight(text: str | None, n: int) -> Weight:
    if not text:
        return Weight.standard(n)
    try:
        return Weight.of(json.loads(text))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot read weight {text!r}: {exc}") from exc


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) in (None, ""):
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _fractions(text: str | None) -> tuple:
    if not text:
        return ()
    return tuple(Fraction(p) for p in _split(text))


# ----------------------------------------------------------------------
# subcommands; each returns (exit code, JSON payload)


def cmd_eval(args):
    _need(args, "f")
    texts = [args.f] + (_split(args.at) if args.at else [])
    ring = _ring(args, texts)
    f = parse_poly(args.f, ring)
    out = {"f": str(f), "total_degree": f.total_degree()}
    if args.at:
        pts = _polys(_split(args.at), ring)
        out["value"] = str(f.substitute(pts, ring))
    return OK, out


def cmd_exp(args):
    _need(args, "d")
    ims = _split(args.d)
    texts = ims + ([args.f] if args.f else [])
    ring = _ring(args, texts, len(ims))
    d = Derivation(ring, _polys(ims, ring))
    if args.f:
        d = d.scale(parse_poly(args.f, ring))
    ev = lnd_verify(d, cap=args.cap)
    if not isinstance(ev, LndEvidence):
        raise UsageError(f"no nilpotency evidence within {args.cap} iterations; raise --cap")
    phi = exp(d, ev)
    return OK, {"derivation": d.to_json(), "evidence": ev.to_json(), **phi.to_json()}


def cmd_log(args):
    _need(args, "images")
    phi = _endo(args, args.images)
    d = formal_log(phi, cap=args.cap)
    return OK, {"derivation": d.to_json()}


def cmd_compose(args):
    _need(args, "outer", "inner")
    outer = _split(args.outer)
    inner = _split(args.inner)
    ring = _ring(args, outer + inner, len(outer))
    sigma = Endo(ring, _polys(outer, ring))
    tau = Endo(ring, _polys(inner, ring))
    return OK, compose(sigma, tau).to_json()


def cmd_tame2(args):
    from .tame2 import decide_tame

    _need(args, "images")
    phi = _endo(args, args.images, args.inverse, 2)
    v = decide_tame(phi, _weight(args.weight, 2), check_inverse=args.inverse is not None)
    return (OK if v.is_tame else NEGATIVE), v.to_json()


def cmd_reduce_poly(args):
    from .tame2 import tame_reduce_poly

    _need(args, "f")
    ring = _ring(args, [args.f], 2)
    tau, g = tame_reduce_poly(parse_poly(args.f, ring))
    return OK, {"map": tau.to_json(), "reduced": str(g)}


def cmd_classify(args):
    from .tame2 import classify_coordinate_type

    _need(args, "f")
    ring = _ring(args, [args.f], 2)
    return OK, classify_coordinate_type(parse_poly(args.f, ring)).to_json()


def _derivation_and_f(args, n):
    _need(args, "d", "f")
    ims = _split(args.d)
    ring = _ring(args, ims + [args.f], n)
    return Derivation(ring, _polys(ims, ring)), parse_poly(args.f, ring)


def _verdict_exit(v) -> int:
    return NEGATIVE if v.outcome == "wild" else OK


def cmd_hd_verdict(args):
    from .verdicts import TriangularData2, nagata_coordinate_wildness, thm_hD_verdict

    d, f = _derivation_and_f(args, 2)
    data = TriangularData2.from_derivation(d)
    v = thm_hD_verdict(data, f)
    out = v.to_json()
    if args.coordinate is not None:
        out["coordinate"] = nagata_coordinate_wildness(data, f, args.coordinate)
    return _verdict_exit(v), out


def cmd_tri3_verdict(args):
    from .verdicts import thm_triangular3_verdict

    d, f = _derivation_and_f(args, 3)
    v = thm_triangular3_verdict(d, f)
    return _verdict_exit(v), v.to_json()


def cmd_wtest(args):
    from .su3wild import wtest_apply, wtest_certify

    _need(args, "p")
    ring = _ring(args, [args.p] + (_split(args.images) if args.images else []), 3)
    P = parse_poly(args.p, ring)
    cert = wtest_certify(P)
    out = {"certification": cert.to_json()}
    if not cert.certified:
        return NEGATIVE, out
    if args.images:
        phi = _endo(args, args.images, args.inverse, 3)
        wc = wtest_apply(phi, P, _weight(args.weight, 3), cert)
        out["wild_certificate"] = None if wc is None else wc.to_json()
        if wc is None:
            return NEGATIVE, out
    return OK, out


def cmd_su_check(args):
    from .su3wild import su_condition_check

    _need(args, "F", "G")
    F = _split(args.F)
    G = _split(args.G)
    ring = _ring(args, F + G, 3)
    rep = su_condition_check(_polys(F, ring), _polys(G, ring), _weight(args.weight, 3), slack=args.slack)
    out = {**rep.to_json(), "holds": rep.holds(), "holds_weak": rep.holds_weak()}
    return (OK if rep.holds() or rep.holds_weak() else NEGATIVE), out


def cmd_lsc(args):
    from .lsc import LscParams, build_family, sigma3_build

    alpha0 = _fractions(args.alpha0) or (Fraction(0),) * (args.t0 - 1)
    alpha1 = _fractions(args.alpha1) or (Fraction(0),) * (args.t1 - 1)
    params = LscParams(args.t0, args.t1, alpha0, alpha1, args.depth)
    fam = build_family(params, verify=args.action == "verify")
    out = fam.to_json()
    if args.action == "verify" and (args.t0, args.t1) == (3, 1) and args.depth >= 5:
        s3 = sigma3_build(fam)
        out["sigma3"] = s3.to_json()
        if not all(s3.checks.values()):
            raise ConsistencyFailure("sigma3 identities failed")
    return OK, out


def cmd_theta(args):
    from .verdicts import nagata_check, phi_zeta_verify, theta_family

    _need(args, "theta")
    text = re.sub(r"\bz\b", "x1", args.theta)
    fam = theta_family(parse_poly(text, Ring(1, QQ)))
    out = fam.to_json()
    if args.verify:
        checks = phi_zeta_verify(fam)
        out["checks"] = checks
        out["nagata"] = nagata_check(fam)
        if not all(checks.values()):
            raise ConsistencyFailure("theta family identities failed")
    return OK, out


def cmd_repro(args):
    from .repro import run_all

    only = [int(k) for k in _split(args.only)] if args.only else None
    results = run_all(only)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.ok for r in results)
    return (OK if ok else CONSISTENCY), {"passed": ok, "criteria": [r.to_json() for r in results]}


COMMANDS = {
    "eval": cmd_eval,
    "exp": cmd_exp,
    "log": cmd_log,
    "compose": cmd_compose,
    "tame2": cmd_tame2,
    "reduce-poly": cmd_reduce_poly,
    "classify": cmd_classify,
    "hd-verdict": cmd_hd_verdict,
    "tri3-verdict": cmd_tri3_verdict,
    "wtest": cmd_wtest,
    "su-check": cmd_su_check,
    "lsc": cmd_lsc,
    "theta": cmd_theta,
    "repro": cmd_repro,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", help="Q, Z, Q[t] or cyclo:e (default: inferred)")
    common.add_argument("--n", type=int, help="number of variables (default: inferred)")
    common.add_argument("--json-in", dest="json_in", help="job file with option values")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="polywild", description="Exact polynomial automorphism toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="canonical form, optionally substituted")
    s.add_argument("--f")
    s.add_argument("--at", help="comma-separated images of x1..xn")

    s = sub.add_parser("exp", parents=[common], help="exponential of f*D")
    s.add_argument("--d", help="comma-separated images D(x1),...,D(xn)")
    s.add_argument("--f")
    s.add_argument("--cap", type=int, default=64)

    s = sub.add_parser("log", parents=[common], help="formal logarithm of a unipotent map")
    s.add_argument("--images")
    s.add_argument("--cap", type=int, default=64)

    s = sub.add_parser("compose", parents=[common], help="outer o inner")
    s.add_argument("--outer")
    s.add_argument("--inner")

    s = sub.add_parser("tame2", parents=[common], help="decide tameness in two variables")
    s.add_argument("--images")
    s.add_argument("--inverse")
    s.add_argument("--weight", help="JSON weight, e.g. [1,1]")

    s = sub.add_parser("reduce-poly", parents=[common], help="greedy reduction of a polynomial")
    s.add_argument("--f")

    s = sub.add_parser("classify", parents=[common], help="coordinate type of f")
    s.add_argument("--f")

    s = sub.add_parser("hd-verdict", parents=[common], help="verdict for exp(fD), D triangular in two variables")
    s.add_argument("--d")
    s.add_argument("--f")
    s.add_argument("--coordinate", type=int, help="also grade the coordinate with this index")

    s = sub.add_parser("tri3-verdict", parents=[common], help="verdict for exp(fD), D triangular in three variables")
    s.add_argument("--d")
    s.add_argument("--f")

    s = sub.add_parser("wtest", parents=[common], help="certify a W-test polynomial, optionally apply it")
    s.add_argument("--p")
    s.add_argument("--images")
    s.add_argument("--inverse")
    s.add_argument("--weight")

    s = sub.add_parser("su-check", parents=[common], help="SU conditions for a pair of triples")
    s.add_argument("--F")
    s.add_argument("--G")
    s.add_argument("--weight")
    s.add_argument("--slack", type=int, default=4)

    s = sub.add_parser("lsc", parents=[common], help="local slice construction families")
    s.add_argument("action", choices=["build", "verify"])
    s.add_argument("--t0", type=int, required=False, default=3)
    s.add_argument("--t1", type=int, required=False, default=1)
    s.add_argument("--alpha0", help="comma-separated rationals, t0-1 of them")
    s.add_argument("--alpha1", help="comma-separated rationals, t1-1 of them")
    s.add_argument("--depth", type=int, default=4, help="highest index N of f_0..f_N")

    s = sub.add_parser("theta", parents=[common], help="theta family invariants")
    s.add_argument("--theta", help="polynomial in z")
    s.add_argument("--verify", action="store_true")

    s = sub.add_parser("repro", parents=[common], help="run the acceptance suite")
    s.add_argument("--only", help="comma-separated criterion numbers")
    return p


def _apply_job(args, parser: argparse.ArgumentParser):
    with open(args.json_in) as fh:
        job = json.load(fh)
    if not isinstance(job, dict):
        raise UsageError("job file must hold a JSON object")
    if job.get("command", args.command) != args.command:
        raise UsageError(f"job is for {job['command']!r}, not {args.command!r}")
    for key, value in job.get("options", job).items():
        if key == "command":
            continue
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"unknown job field {key!r}")
        if isinstance(value, list):
            value = ",".join(str(v) for v in value) if attr != "weight" else json.dumps(value)
        setattr(args, attr, value)


def _glue_values(argv: list[str]) -> list[str]:
    """Attach values such as '-2*x2,x3,0' to their option so argparse does not read them as flags."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None
                and nxt.startswith("-") and not nxt.startswith("--") and nxt != "-h"):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        if args.json_in:
            _apply_job(args, parser)
        code, payload = COMMANDS[args.command](args)
    except ConsistencyFailure as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return CONSISTENCY
    except PolywildError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())

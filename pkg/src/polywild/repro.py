"""The reproducibility suite: ten end-to-end checks with time budgets."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .coeff import QQ, QQT
from .deriv import (
    Derivation,
    apply,
    exp,
    formal_log,
    jacobian_derivation,
    plinth_witness,
    random_triangular,
    rank3_evidence,
    rentschler_kernel,
    triangular_kernel,
)
from .endo import det_j
from .lsc import (
    LscParams,
    build_family,
    build_tilde,
    delta,
    delta_recurrence_check,
    fibonacci_identity_check,
    homogeneity_check,
    seq_ab,
    sigma3_check,
)
from .parse import parse_poly
from .poly import Ring
from .su3wild import wtest_certify
from .tame2 import decide_tame, nagata_endo, random_tame
from .verdicts import TriangularData2, nagata_check, phi_zeta_verify, theta_family, thm_hD_verdict

R3 = Ring(3, QQ)


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    seconds: float
    limit: float
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed and self.seconds < self.limit

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} ({self.seconds:.2f}s / {self.limit:.0f}s)"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.ok,
            "seconds": round(self.seconds, 3),
            "limit": self.limit,
            "details": self.details,
        }


def _timed(number: int, title: str, limit: float, body: Callable[[dict], bool]) -> Result:
    details: dict = {}
    start = time.perf_counter()
    try:
        passed = bool(body(details))
    except Exception as exc:  # a failing check is reported, not raised
        details["error"] = f"{type(exc).__name__}: {exc}"
        passed = False
    return Result(number, title, passed, time.perf_counter() - start, limit, details)


# ----------------------------------------------------------------------


def _nagata3(details: dict) -> bool:
    x1, x2, x3 = R3.gens()
    d = Derivation(R3, [x2.scale(-2), x3, R3.zero()])
    f = x1 * x3 + x2 ** 2
    phi = exp(d.scale(f))
    want = [x1 - (f * x2).scale(2) - f ** 2 * x3, x2 + f * x3, x3]
    details["images"] = [str(g) for g in phi.images]
    return list(phi.images) == want


def criterion_1() -> Result:
    return _timed(1, "Nagata automorphism from exp(fD)", 1, _nagata3)


def _tame_soundness(details: dict, count: int = 200, seed: int = 2024) -> bool:
    ring = Ring(2, QQ)
    rng = random.Random(seed)
    failures = 0
    for _ in range(count):
        phi = random_tame(ring, rng, max_steps=8, height=10, max_exp=4)
        v = decide_tame(phi)
        if not v.is_tame or v.recompose(ring).images != phi.images:
            failures += 1
    details.update({"maps": count, "failures": failures, "seed": seed})
    return failures == 0


def criterion_2() -> Result:
    return _timed(2, "200 random tame maps decided tame with exact certificates", 60, _tame_soundness)


HD_CORPUS = [
    ("t", ["0", "-2"], 0), ("t", ["1", "1"], 0), ("t^2", ["t", "1"], 0), ("t", ["0", "1"], 1),
    ("t", ["1"], 0), ("t", ["1"], 1), ("t", ["t", "1"], 2), ("t+1", ["0", "0", "3"], 0),
    ("t", ["0", "t", "1"], 3), ("t^2", ["1", "t"], 0), ("t", ["t", "t^2"], 1), ("2*t", ["1", "0", "t"], 0),
    ("t", ["0", "1"], 2), ("t-1", ["2", "t"], 0), ("t", ["t"], 0), ("t", ["t", "2*t"], 0),
    ("1", ["t", "1"], 0), ("t^2", ["t^2", "t^3"], 1), ("t", ["5"], 2), ("t", ["0", "0", "0", "1"], 0),
]


def hd_case(a: str, bs: list[str], shape: int):
    """(D, f) over Q[t] with f a polynomial in the kernel generator."""
    ring = Ring(2, QQT)
    x1, x2 = ring.gens()
    A = parse_poly(a, ring)
    B = [parse_poly(b, ring) for b in bs]
    d2 = ring.zero()
    h = A * x2
    for i, b in enumerate(B):
        d2 = d2 + b * x1 ** i
        h = h - (b * x1 ** (i + 1)).scale(Fraction(1, i + 1))
    f = [h, h * h, h * h + h, h.scale(3) + ring.const(QQT(5))][shape]
    return Derivation(ring, [A, d2]), f


def _hd_agreement(details: dict) -> bool:
    ok = True
    nag = decide_tame(nagata_endo())
    details["nagata"] = nag.outcome
    ok &= nag.outcome == "wild"
    rows = []
    for a, bs, shape in HD_CORPUS:
        d, f = hd_case(a, bs, shape)
        table = thm_hD_verdict(TriangularData2.from_derivation(d), f).outcome
        engine = decide_tame(exp(d.scale(f))).outcome
        rows.append({"a": a, "b": bs, "f": shape, "theorem": table, "engine": engine})
        ok &= table == engine
    details["cases"] = rows
    details["wild_cases"] = sum(r["theorem"] == "wild" for r in rows)
    return ok


def criterion_3() -> Result:
    return _timed(3, "Nagata and the exponential corpus: engine agrees with the verdict table", 120, _hd_agreement)


LSC_SHAPES = [(3, 1), (3, 2), (2, 3), (3, 3), (4, 1)]


def _random_alpha(t: int, rng: random.Random) -> tuple:
    return tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(t - 1))


def _lsc_identities(details: dict, seed: int = 7) -> bool:
    rng = random.Random(seed)
    ok = True
    runs = []
    for t0, t1 in LSC_SHAPES:
        top = seq_ab(t0, t1, 6).I.max
        depth = min(top or 5, 5) + 1
        for params in (LscParams.zero(t0, t1, depth),
                       LscParams(t0, t1, _random_alpha(t0, rng), _random_alpha(t1, rng), depth)):
            fam = build_family(params)
            runs.append({"params": params.to_json(), "identities": len(fam.transcript),
                         "irreducible": {str(k): v for k, v in fam.irreducible.items()}})
            if (t0, t1) == (3, 1):
                ok &= _closed_forms_31(fam)
    details["runs"] = runs
    return ok


def _closed_forms_31(fam) -> bool:
    x1, x2, x3 = R3.gens()
    a2 = R3.const(Fraction(fam.params.alpha0[1]))
    f = fam.f
    f3 = x1 - (x2.scale(2) + a2) * f[2] + x3 * f[2] ** 2
    f4 = x3 * f[2] - x2 - a2
    f5 = x3 * f4 - 1
    return f[3] == f3 and f[4] == f4 and f[5] == f5


def criterion_4() -> Result:
    return _timed(4, "local slice identities, exact divisions and irreducibility", 300, _lsc_identities)


A_TABLE = {
    (3, 1): ([1, 1, 2, 1, 1, 0], 4),
    (2, 2): ([1, 1, 1, 1, 1, 1], None),
    (3, 2): ([1, 1, 2, 3, 7, 11], None),
    (2, 1): ([1, 1, 1, 0], 2),
    (1, 3): ([1, 1, 0], 1),
}


def _recurrences(details: dict) -> bool:
    ok = True
    for (t0, t1), (a, top) in A_TABLE.items():
        s = seq_ab(t0, t1, len(a) - 1)
        ok &= s.a == a and s.I.max == top
    for t0, t1 in LSC_SHAPES:
        s = seq_ab(t0, t1, 6)
        ok &= all(s.a[i] == (t0 if i % 2 == 0 else t1) * s.b[i] + s.xi[i] for i in range(len(s.a)))
    deltas = {}
    for t0, t1 in LSC_SHAPES:
        top = seq_ab(t0, t1, 6).I.max
        fam = build_family(LscParams.zero(t0, t1, min(top or 4, 4) + 1), verify=False)
        ok &= homogeneity_check(fam)
        if t0 >= 3:
            ok &= delta_recurrence_check(fam)
            ok &= delta(fam.f[2]) == (1, 0, 1)
            deltas[f"{t0},{t1}"] = [list(delta(g)) for g in fam.f]
    fam44 = build_family(LscParams.zero(4, 3, 5), verify=False)
    ok &= homogeneity_check(fam44)
    details["deltas"] = deltas
    return ok


def criterion_5() -> Result:
    return _timed(5, "sequence, degree and homogeneity recurrences", 30, _recurrences)


def _fibonacci(details: dict) -> bool:
    fam = build_family(LscParams.zero(3, 3, 5), verify=False)
    ok = fibonacci_identity_check(fam, 4)
    res = build_tilde(LscParams.zero(3, 3), "y", "-z^3", 2)
    x1, x2, x3 = R3.gens()
    f2 = fam.f[2]
    want = f2 ** 2 * x3 + (f2 * x1 ** 2 * x2).scale(2) + x1 ** 5
    details["tilde_f3"] = str(res.f_next)
    return ok and res.f_next == want


def criterion_6() -> Result:
    return _timed(6, "Fibonacci identities and the twisted construction", 60, _fibonacci)


def _wtest(details: dict) -> bool:
    good = wtest_certify(parse_poly("x1*x3 - x2^2", R3))
    bad = wtest_certify(parse_poly("x1*x3 - x2", R3))
    forms = sorted(str(form) for _, form, _, _ in good.supports)
    details["supports"] = forms
    details["failure"] = bad.failure
    expected = sorted(["x1*x3", "-x2^2", "x1*x3 - x2^2"])
    return (good.certified and forms == expected and not bad.certified
            and bad.failure is not None and bad.failure["clause"] == "linear")


def criterion_7() -> Result:
    return _timed(7, "W-test certification", 10, _wtest)


def _theta(details: dict) -> bool:
    R1 = Ring(1, QQ)
    fam = theta_family(parse_poly("x1^2", R1))
    checks = phi_zeta_verify(fam)
    big = theta_family(parse_poly("x1^9", R1))
    details.update({"e(z^2)": fam.e, "checks": checks, "e(z^9)": big.e, "T(z^9)": big.T_over_Q,
                    "classification(z^9)": big.classification()})
    return fam.e == 3 and all(checks.values()) and nagata_check(fam) and big.e == 17 and big.T_over_Q == [1]


def criterion_8() -> Result:
    return _timed(8, "theta family identities and invariants", 30, _theta)


def _cross_routes(details: dict, seed: int = 99) -> bool:
    rng = random.Random(seed)
    ok = True
    done = 0
    while done < 50:
        n = rng.choice([1, 2, 3])
        d = random_triangular(Ring(n, QQ), rng)
        if d.is_zero():
            continue
        phi = exp(d)
        ok &= formal_log(phi) == d
        ok &= det_j(phi) == Ring(n, QQ).one()
        done += 1
    agree = 0
    ring = Ring(2, QQ)
    while agree < 30:
        d = random_triangular(ring, rng)
        if d.images[0].is_zero() and d.images[1].is_zero():
            continue
        h = triangular_kernel(d)
        g, _ = rentschler_kernel(d)
        ok &= _same_up_to_unit_and_constant(g, h)
        agree += 1
    details.update({"log_exp": done, "kernels": agree})
    return ok


def _same_up_to_unit_and_constant(g, h) -> bool:
    g0 = g - g.ring.const(g.coeff((0,) * g.ring.n))
    h0 = h - h.ring.const(h.coeff((0,) * h.ring.n))
    if g0.is_zero() or h0.is_zero():
        return g0.is_zero() and h0.is_zero()
    ratio = g0.leading_coeff().to_fraction() / h0.leading_coeff().to_fraction()
    return g0 == h0.scale(ratio)


def criterion_9() -> Result:
    return _timed(9, "log/exp, Jacobian and kernel cross-checks", 60, _cross_routes)


def _plinth(details: dict) -> bool:
    fam = build_family(LscParams.zero(3, 2, 3), verify=False)
    d = fam.D[2]
    f2, f3, r = fam.f[2], fam.f[3], fam.r
    bound = 2 * r.total_degree()
    ws = [plinth_witness(d, r, p, [f2, f3], bound) for p in (f2, f3)]
    ev = rank3_evidence(d, ws)
    details["witnesses"] = [w.to_json() for w in ws]
    details["rank3"] = ev is not None
    return all(w.i_lower == 1 and w.search_complete for w in ws) and ev is not None


def criterion_10() -> Result:
    return _timed(10, "plinth witnesses and rank-three evidence", 120, _plinth)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(only: list[int] | None = None) -> list[Result]:
    out = []
    for k, fn in enumerate(CRITERIA, start=1):
        if only and k not in only:
            continue
        out.append(fn())
    return out

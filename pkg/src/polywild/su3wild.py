"""Three-variable wildness tools: SU conditions, direct certificates and W-test polynomials."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .deriv import _in_span
from .endo import Endo
from .errors import ArityMismatch, NotAutomorphism, PreconditionFailed, RankDeficient, UncertifiedP
from .poly import Poly, wedge2
from .weights import (
    NEG_INF,
    InitialSupport,
    Weight,
    enumerate_initial_supports,
    gadd,
    gscale,
    gsub,
    initial_form,
    integer_rank,
    support_form,
    wdeg,
    wdeg_form,
)

INCONCLUSIVE = "inconclusive"


def _need_three(f: Poly):
    if f.ring.n != 3:
        raise ArityMismatch("this operation works in three variables")


# ----------------------------------------------------------------------
# subalgebra membership


def _exponent_tuples(degs: Sequence[int], bound: int):
    out = []

    def rec(k, cur, total):
        if k == len(degs):
            out.append(tuple(cur))
            return
        e = 0
        while total + e * degs[k] <= bound:
            rec(k + 1, cur + [e], total + e * degs[k])
            e += 1

    rec(0, [], 0)
    return out


def _top_forms_independent(gens: Sequence[Poly]) -> bool:
    """Top homogeneous parts algebraically independent (Jacobian criterion)."""
    n = gens[0].ring.n
    tops = [initial_form(g, Weight.standard(n)) for g in gens]
    if len(tops) == 1:
        return not tops[0].is_constant()
    if len(tops) == 2 and n in (2, 3):
        return any(not c.is_zero() for c in wedge2(tops[0], tops[1]))
    return False


def subalgebra_member(target: Poly, gens: Sequence[Poly], slack: int = 0):
    """Is target in k[gens]?  True/False, or INCONCLUSIVE past the degree bound."""
    if target.is_constant():
        return True
    gens = [g for g in gens if not g.is_constant()]
    if not gens:
        return False
    degs = [g.total_degree() for g in gens]
    exact = _top_forms_independent(gens)
    bound = target.total_degree() + (0 if exact else slack)
    monos = []
    for e in _exponent_tuples(degs, bound):
        m = target.ring.one()
        for g, k in zip(gens, e):
            if k:
                m = m * g ** k
        monos.append(m)
    if _in_span(target, monos) is not None:
        return True
    return False if exact else INCONCLUSIVE


def _graded_member(target: Poly, gens: Sequence[Poly], w: Weight) -> bool:
    """Membership of a w-homogeneous target in k[gens] for w-homogeneous gens of positive degree."""
    if target.is_zero():
        return True
    top = wdeg(target, w)
    degs = [wdeg(g, w) for g in gens]
    monos = []

    def rec(k, acc, deg):
        if k == len(gens):
            if deg == top:
                monos.append(acc)
            return
        d = deg
        a = acc
        while d <= top:
            rec(k + 1, a, d)
            d = gadd(d, degs[k])
            a = a * gens[k]

    rec(0, target.ring.one(), tuple(0 for _ in range(w.m)))
    return _in_span(target, monos) is not None


def _solve_scalars(target: Poly, basis: Sequence[Poly]):
    return _in_span(target, list(basis))


# ----------------------------------------------------------------------
# SU conditions


@dataclass
class SUReport:
    clauses: dict
    a: Fraction | None = None
    b: Fraction | None = None
    c: Fraction | None = None
    s: int | None = None

    def holds(self) -> bool:
        return all(self.clauses[k] is True for k in ("SU1", "SU2", "SU3", "SU4", "SU5", "SU6"))

    def holds_weak(self) -> bool:
        return all(self.clauses[k] is True for k in ("SU1'", "SU2'", "SU3'", "SU4", "SU5", "SU6"))

    def to_json(self) -> dict:
        return {
            "clauses": {k: (v if isinstance(v, bool) else str(v)) for k, v in self.clauses.items()},
            "a": None if self.a is None else str(self.a),
            "b": None if self.b is None else str(self.b),
            "c": None if self.c is None else str(self.c),
            "s": self.s,
        }


def odd_multiple(big, small) -> int | None:
    """Odd s >= 3 with 2*big == s*small (componentwise), if any."""
    if small is NEG_INF or big is NEG_INF:
        return None
    twice = gscale(2, big)
    ratio = None
    for x, y in zip(twice, small):
        if y == 0:
            if x != 0:
                return None
            continue
        if x % y:
            return None
        r = x // y
        if ratio is not None and r != ratio:
            return None
        ratio = r
    if ratio is None or ratio < 3 or ratio % 2 == 0:
        return None
    return ratio


def _proportional(p: Poly, q: Poly) -> bool:
    if p.is_zero() or q.is_zero():
        return False
    c = Fraction(p.leading_coeff().to_fraction(), q.leading_coeff().to_fraction())
    return p == q.scale(c)


def su_condition_check(F: Sequence[Poly], G: Sequence[Poly], w: Weight, slack: int = 4) -> SUReport:
    f1, f2, f3 = F
    g1, g2, g3 = G
    for p in (*F, *G):
        _need_three(p)
    if w.n != 3 or not w.all_positive():
        raise ArityMismatch("need a weight with three positive entries")
    d = {name: wdeg(p, w) for name, p in zip(("f1", "f2", "f3", "g1", "g2", "g3"), (*F, *G))}
    rep = SUReport({})
    cl = rep.clauses

    # (SU1)
    ac = _solve_scalars(g1 - f1, [f3 ** 2, f3])
    bb = _solve_scalars(g2 - f2, [f3])
    mem = subalgebra_member(g3 - f3, [g1, g2], slack)
    if ac is not None:
        rep.a, rep.c = ac
    if bb is not None:
        rep.b = bb[0]
    if ac is None or bb is None or mem is False:
        cl["SU1"] = False
    else:
        cl["SU1"] = True if mem is True else INCONCLUSIVE
    # (SU2)
    cl["SU2"] = d["f1"] <= d["g1"] and d["f2"] == d["g2"]
    # (SU3)
    s = odd_multiple(d["g1"], d["g2"])
    rep.s = s
    cl["SU3"] = s is not None and _proportional(initial_form(g1, w) ** 2, initial_form(g2, w) ** s)
    # (SU4)
    cl["SU4"] = d["f3"] <= d["g1"] and not _graded_member(
        initial_form(f3, w), [initial_form(g1, w), initial_form(g2, w)], w)
    # (SU5)
    cl["SU5"] = d["g3"] < d["f3"]
    # (SU6)
    form = wdeg_form(wedge2(g1, g2), w)
    rhs = gadd(gsub(d["g1"], d["g2"]), form) if form is not NEG_INF else NEG_INF
    cl["SU6"] = d["g3"] < rhs
    # weak conditions
    m1 = subalgebra_member(g1 - f1, [f2, f3], slack)
    m2 = subalgebra_member(g2 - f2, [f3], slack)
    if False in (m1, m2, mem):
        cl["SU1'"] = False
    elif (m1, m2, mem) == (True, True, True):
        cl["SU1'"] = True
    else:
        cl["SU1'"] = INCONCLUSIVE
    cl["SU2'"] = d["f1"] <= d["g1"] and d["f2"] <= d["g2"]
    g1w, g2w = initial_form(g1, w), initial_form(g2, w)
    cl["SU3'"] = d["g2"] < d["g1"] and not _graded_member(g1w, [g2w], w)
    return rep


def su_reduction_excluded(F: Sequence[Poly], w: Weight) -> bool:
    """True when F provably admits no SU reduction for w (rank w = 3)."""
    if w.rank() != 3:
        raise RankDeficient("the weight must have rank 3")
    degs = [wdeg(f, w) for f in F]
    pairs = [(0, 1), (0, 2), (1, 2)]
    if all(integer_rank([list(degs[i]), list(degs[j])]) == 2 for i, j in pairs):
        return True
    order = sorted(range(3), key=lambda i: degs[i], reverse=True)
    d1, d2, d3 = (degs[i] for i in order)
    if not d1 > d2 > d3:
        return False
    if gscale(3, d2) == gscale(4, d3):
        return False
    if odd_multiple(d1, d2) is not None or odd_multiple(d1, d3) is not None:
        return False
    return True


# ----------------------------------------------------------------------
# direct wildness certificate


def _monomial_exps(f: Poly) -> tuple:
    terms = f.monomials()
    if len(terms) != 1:
        raise RankDeficient("initial form is not a monomial")
    return terms[0]


def _semigroup_member(target: tuple, a: tuple, b: tuple) -> bool:
    """target = i*a + j*b for some integers i, j >= 0."""
    bound = max(target) + 1
    for i in range(bound + 1):
        rest = [t - i * x for t, x in zip(target, a)]
        if any(r < 0 for r in rest):
            break
        if not any(b):
            if not any(rest):
                return True
            continue
        ratios = {Fraction(r, y) for r, y in zip(rest, b) if y}
        if len(ratios) == 1:
            j = ratios.pop()
            if j.denominator == 1 and j >= 0 and all(r == j * y for r, y in zip(rest, b)):
                return True
        elif not ratios and not any(rest):
            return True
    return False


@dataclass
class WildCertificate:
    kind: str  # "direct" or "wtest"
    weight: Weight
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "weight": self.weight.to_json(), **self.data}


def wild_certificate_check(F: Endo, w: Weight) -> WildCertificate | None:
    """Wildness by conditions (1) and (2) on monomial initial forms (rank w = 3)."""
    if F.inverse is None:
        raise NotAutomorphism("an automorphism witness is required")
    if w.rank() != 3:
        raise RankDeficient("the weight must have rank 3")
    forms = [initial_form(f, w) for f in F.images]
    exps = [_monomial_exps(f) for f in forms]
    if integer_rank([list(e) for e in exps]) == 3:
        return None
    if any(integer_rank([list(exps[i]), list(exps[j])]) < 2 for i, j in ((0, 1), (0, 2), (1, 2))):
        return None
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        if _semigroup_member(exps[i], exps[j], exps[k]):
            return None
    return WildCertificate("direct", w, {
        "initial_forms": [str(f) for f in forms],
        "exponents": [list(e) for e in exps],
        "dependent": True,
        "pairwise_independent": True,
        "non_membership": True,
    })


# ----------------------------------------------------------------------
# factor searches


def _factors(f: Poly) -> list[Poly]:
    _, facs = f.p.factor()
    return [Poly(f.ring, g) for g, _ in facs]


def linear_factor_search(f: Poly, i: int):
    """g outside k with (x_i - g) | f, or None.  Complete via full factorization."""
    _need_three(f)
    if f.is_zero():
        return None
    xi = f.ring.var(i)
    for h in _factors(f):
        if h.degree(i) != 1:
            continue
        lead = h.diff(i)
        if not lead.is_constant():
            continue
        a = lead.constant_value()
        g = -(h - xi * f.ring.const(a)).div_scalar(a)
        if not g.is_constant():
            return g
    return None


def _quasi_homogeneous_exponents(h: Poly, i: int, j: int):
    """(q_i, q_j) with h a form in X = x_i^q_i, Y = x_j^q_j, or None."""
    monos = h.monomials()
    if len(monos) < 2:
        return None
    from math import gcd

    base = monos[0]
    diffs = [(m[i - 1] - base[i - 1], m[j - 1] - base[j - 1]) for m in monos[1:]]
    # all differences must be proportional to (q_i, -q_j)
    di, dj = diffs[0]
    g = gcd(abs(di), abs(dj)) or 1
    qi, qj = abs(di) // g, abs(dj) // g
    if qi == 0 or qj == 0 or di * dj > 0:
        return None
    for a, b in diffs:
        if a * qj + b * qi != 0:
            return None
    return qi, qj


def binomial_proportionality_factor(f: Poly, max_power: int | None = None):
    """(i, j, s_i, s_j, c) with (x_i^s_i - c x_j^s_j) | f, None, or INCONCLUSIVE."""
    _need_three(f)
    if f.is_zero():
        return None
    verdict = None
    for h in _factors(f):
        vars_ = h.variables()
        if len(vars_) != 2:
            continue
        i, j = sorted(vars_)
        q = _quasi_homogeneous_exponents(h, i, j)
        if q is None:
            continue
        qi, qj = q
        monos = h.monomials()
        if len(monos) == 2:
            # h = u x_i^a + v x_j^b up to a monomial factor, which an irreducible h lacks
            ti = next(m for m in monos if m[j - 1] == 0)
            tj = next(m for m in monos if m[i - 1] == 0)
            c = -h.coeff(tj).to_fraction() / h.coeff(ti).to_fraction()
            return (i, j, ti[i - 1], tj[j - 1], c)
        found = _radical_power(h, i, j, qi, qj, max_power)
        if found is not None:
            return found
        verdict = INCONCLUSIVE
    return verdict


def _radical_power(h: Poly, i: int, j: int, qi: int, qj: int, max_power: int | None):
    """Smallest N with X^N = c mod h(X, 1), X = x_i^qi, Y = x_j^qj."""
    import flint

    coeffs: dict[int, Fraction] = {}
    for m, c in h.terms().items():
        coeffs[m[i - 1] // qi] = c.to_fraction()
    deg = max(coeffs)
    P = flint.fmpq_poly([flint.fmpq(coeffs.get(k, Fraction(0)).numerator, coeffs.get(k, Fraction(0)).denominator)
                         for k in range(deg + 1)])
    bound = max_power or (2 * deg * deg + 2)
    X = flint.fmpq_poly([0, 1])
    power = flint.fmpq_poly([1])
    for N in range(1, bound + 1):
        power = (power * X) % P
        if power.degree() <= 0:
            c = power.coeffs()[0] if power.degree() == 0 else flint.fmpq(0)
            if c == 0:
                return None
            return (i, j, N * qi, N * qj, Fraction(int(c.p), int(c.q)))
    return None


# ----------------------------------------------------------------------
# W-test polynomials


@dataclass
class WTestCertification:
    certified: bool
    polynomial: Poly
    supports: list  # (InitialSupport, form, clause results)
    failure: dict | None = None

    def to_json(self) -> dict:
        return {
            "certified": self.certified,
            "P": str(self.polynomial),
            "supports": [
                {"support": s.to_json(), "form": str(form), "linear": lin, "binomial": bino}
                for s, form, lin, bino in self.supports
            ],
            "failure": self.failure,
            "note": "supports form a sound over-approximation of the initial forms",
        }


def wtest_certify(P: Poly) -> WTestCertification:
    """Certify P as a W-test polynomial by the two divisor-freeness clauses."""
    _need_three(P)
    for i in (1, 2, 3):
        if P.degree(i) <= 0:
            raise PreconditionFailed(f"P does not involve x{i}")
    records = []
    failure = None
    for s in enumerate_initial_supports(P):
        if not s.certify(P.monomials()):
            raise AssertionError("initial support failed to replay its witness")
        form = support_form(P, s)
        lin = {}
        for i in (1, 2, 3):
            g = linear_factor_search(form, i) if form.degree(i) >= 1 else None
            lin[i] = None if g is None else str(g)
            if g is not None and failure is None:
                failure = {"clause": "linear", "form": str(form), "i": i, "g": str(g)}
        bino = binomial_proportionality_factor(form)
        bino_json = bino if bino in (None, INCONCLUSIVE) else [bino[0], bino[1], bino[2], bino[3], str(bino[4])]
        if bino is not None and failure is None:
            failure = {"clause": "binomial" if bino != INCONCLUSIVE else "inconclusive",
                       "form": str(form), "factor": bino_json}
        records.append((s, form, lin, bino_json))
    return WTestCertification(failure is None, P, records, failure)


def wtest_apply(phi: Endo, P: Poly, w: Weight, certification: WTestCertification | None) -> WildCertificate | None:
    """Wildness of phi from a certified W-test polynomial P, conditions (a) and (b)."""
    if certification is None or not certification.certified or certification.polynomial != P:
        raise UncertifiedP("P carries no successful certification")
    if w.rank() != 3:
        raise RankDeficient("the weight must have rank 3")
    if phi.inverse is None:
        raise NotAutomorphism("an automorphism witness is required")
    image_degs = [wdeg(g, w) for g in phi.images]
    dP = wdeg(phi(P), w)
    a_idx = [i + 1 for i, d in enumerate(image_degs) if dP < d]
    if not a_idx:
        return None
    b_pair = None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if integer_rank([list(image_degs[i]), list(image_degs[j])]) == 2:
            b_pair = (i + 1, j + 1)
            break
    if b_pair is None:
        return None
    return WildCertificate("wtest", w, {
        "P": str(P),
        "deg_phi_P": list(dP) if dP is not NEG_INF else None,
        "image_degrees": [list(d) for d in image_degs],
        "clause_a": a_idx[0],
        "clause_b": list(b_pair),
    })


__all__ = [
    "INCONCLUSIVE", "SUReport", "WildCertificate", "WTestCertification", "InitialSupport",
    "su_condition_check", "su_reduction_excluded", "wild_certificate_check",
    "linear_factor_search", "binomial_proportionality_factor", "wtest_certify", "wtest_apply",
    "subalgebra_member",
]

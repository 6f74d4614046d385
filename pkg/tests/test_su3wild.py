import random

import pytest

from polywild import QQ, Ring, parse_poly
from polywild.deriv import exp, lnd_verify
from polywild.endo import Endo
from polywild.errors import NotAutomorphism, PreconditionFailed, RankDeficient, UncertifiedP
from polywild.lsc import LscParams, build_family
from polywild.su3wild import (
    INCONCLUSIVE,
    binomial_proportionality_factor,
    linear_factor_search,
    odd_multiple,
    su_condition_check,
    su_reduction_excluded,
    wild_certificate_check,
    wtest_apply,
    wtest_certify,
)
from polywild.weights import Weight

LEX3 = Weight.of([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
X1_TOP = Weight.of([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def polys(texts, ring):
    return [parse_poly(t, ring) for t in texts]


def test_su2_fails_on_degree_mismatch(r3):
    rep = su_condition_check(polys(["x1", "x2", "x3"], r3), polys(["x1", "x2^2", "x3"], r3), Weight.standard(3))
    assert rep.clauses["SU2"] is False
    assert not rep.holds()


def test_su3_odd_multiple(r3):
    F = polys(["x1^3", "x1^2 + x2", "x3"], r3)
    G = polys(["x1^3 + x2", "x1^2", "x3"], r3)
    rep = su_condition_check(F, G, Weight.standard(3))
    assert rep.s == 3 and rep.clauses["SU3"] is True


def test_su5_fails_when_g3_not_lower(r3):
    F = polys(["x1^3", "x1^2", "x3"], r3)
    G = polys(["x1^3", "x1^2", "x3 + x1^5"], r3)
    assert su_condition_check(F, G, Weight.standard(3)).clauses["SU5"] is False


def test_odd_multiple():
    assert odd_multiple((6,), (4,)) == 3
    assert odd_multiple((4,), (2,)) is None
    assert odd_multiple((5, 0), (2, 0)) == 5


def test_reduction_excluded(r3):
    assert su_reduction_excluded(polys(["x1", "x2", "x3"], r3), LEX3)
    assert not su_reduction_excluded(polys(["x1^3", "x1^2", "x2"], r3), X1_TOP)
    with pytest.raises(RankDeficient):
        su_reduction_excluded(polys(["x1", "x2", "x3"], r3), Weight.standard(3))


def test_wild_certificate_direct(r3):
    # exponents (2,0,1), (1,0,1), (0,0,1) style: dependent, pairwise independent, no membership
    F = polys(["x1^2*x3", "x1*x3", "x3"], r3)
    cert = wild_certificate_check(Endo(r3, F, F), LEX3)
    assert cert is not None and cert.kind == "direct"


def test_wild_certificate_none(r3):
    gens = r3.gens()
    assert wild_certificate_check(Endo(r3, gens, gens), LEX3) is None
    m = parse_poly("x1*x2", r3)
    F = [m, m * m, m * m * m]
    assert wild_certificate_check(Endo(r3, F, F), LEX3) is None
    with pytest.raises(NotAutomorphism):
        wild_certificate_check(Endo(r3, gens), LEX3)


def test_linear_factor_search(r3):
    assert linear_factor_search(parse_poly("x2 - x1*x3", r3), 2) == parse_poly("x1*x3", r3)
    for i in (1, 2, 3):
        assert linear_factor_search(parse_poly("x1*x3 - x2^2", r3), i) is None
    assert linear_factor_search(parse_poly("x1*x3", r3), 1) is None
    assert linear_factor_search(parse_poly("(x1 - x2^2)*x3", r3), 1) == parse_poly("x2^2", r3)


def test_binomial_factor(r3):
    hit = binomial_proportionality_factor(parse_poly("(x1^2 - 3*x2)*x3", r3))
    assert hit[:4] == (1, 2, 2, 1) and hit[4] == 3
    assert binomial_proportionality_factor(parse_poly("x1*x3 - x2^2", r3)) is None
    assert binomial_proportionality_factor(parse_poly("x1^2*x3^2 - x2^4", r3)) is None


def test_binomial_factor_radical(r3):
    hit = binomial_proportionality_factor(parse_poly("(x1^2 + x1*x2 + x2^2)*x3", r3))
    assert hit not in (None, INCONCLUSIVE)
    assert hit[:2] == (1, 2)


def test_wtest_certify(r3):
    good = wtest_certify(parse_poly("x1*x3 - x2^2", r3))
    assert good.certified and len(good.supports) == 3
    bad = wtest_certify(parse_poly("x1*x3 - x2", r3))
    assert not bad.certified and bad.failure["clause"] == "linear"
    with pytest.raises(PreconditionFailed):
        wtest_certify(r3.var(1))


def test_wtest_apply_errors(r3):
    P = parse_poly("x1*x3 - x2^2", r3)
    cert = wtest_certify(P)
    gens = r3.gens()
    ident = Endo(r3, gens, gens)
    assert wtest_apply(ident, P, LEX3, cert) is None
    with pytest.raises(RankDeficient):
        wtest_apply(ident, P, Weight.standard(3), cert)
    with pytest.raises(UncertifiedP):
        wtest_apply(ident, P, LEX3, None)


def test_wtest_apply_lsc():
    fam = build_family(LscParams.zero(3, 2, 4), verify=False)
    d = fam.D[3]
    phi = exp(d, lnd_verify(d, cap=64))
    cert = wtest_certify(fam.f[2])
    wc = wtest_apply(phi, fam.f[2], LEX3, cert)
    assert wc is not None and wc.kind == "wtest"


def test_no_certificate_on_random_tame_triangular(r3):
    # tame maps built from triangular steps never receive a direct wildness certificate
    rng = random.Random(17)
    for _ in range(20):
        x1, x2, x3 = r3.gens()
        a = parse_poly(f"{rng.randint(-3, 3)}*x1^{rng.randint(1, 3)}", r3)
        b = parse_poly(f"{rng.randint(-3, 3)}*x1*x2^{rng.randint(1, 2)} + {rng.randint(-3, 3)}", r3)
        F = [x1, x2 + a, x3 + b]
        G = [x1, x2 - a, x3 - b.substitute([x1, x2 - a, x3])]
        phi = Endo(r3, F, G)
        assert wild_certificate_check(phi, LEX3) is None

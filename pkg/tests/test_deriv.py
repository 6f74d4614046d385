import random
from fractions import Fraction

import pytest

from polywild import QQ, QQT, Ring, parse_poly
from polywild.deriv import (
    Derivation,
    ExceededCap,
    LndEvidence,
    apply,
    conjugate,
    coprime,
    exp,
    formal_log,
    irreducible_check,
    jacobian_derivation,
    lnd_verify,
    plinth_witness,
    random_triangular,
    rank3_evidence,
    rentschler_kernel,
    triangular_kernel,
    vp_valuation,
)
from polywild.endo import Endo, compose, det_j
from polywild.errors import NotExact, UnsupportedDomain
from polywild.lsc import LscParams, build_family


def der(texts, ring):
    return Derivation(ring, [parse_poly(t, ring) for t in texts])


def test_apply(r3):
    d = der(["0", "0", "1"], r3)
    r = parse_poly("x1*x2*x3 - x2^3 - x1", r3)
    assert apply(d, r) == parse_poly("x1*x2", r3)
    assert apply(d, r3.const(9)).is_zero()


def test_d1_kills_f2(r3):
    d1 = jacobian_derivation(parse_poly("x1*x3 - x2^2", r3), r3.var(1))
    assert d1.images == (r3.zero(), r3.var(1), parse_poly("2*x2", r3))
    assert apply(d1, parse_poly("x1*x3 - x2^2", r3)).is_zero()


def test_jacobian_derivation_base(r3):
    assert jacobian_derivation(r3.var(1), r3.var(2)).images == (r3.zero(), r3.zero(), r3.one())
    g = parse_poly("x1^2 + x3", r3)
    assert jacobian_derivation(g, g).is_zero()


def test_lnd_verify(r3):
    ev = lnd_verify(der(["1", "0", "0"], r3))
    assert isinstance(ev, LndEvidence)
    euler = der(["x1", "x2", "x3"], r3)
    assert isinstance(lnd_verify(euler, cap=20), ExceededCap)


def test_lnd_theta_family(r3):
    # D(x1) = -2 x2, D(x2) = x3 after swapping x1 and x3 is triangular
    ev = lnd_verify(der(["-2*x2", "x3", "0"], r3))
    assert isinstance(ev, LndEvidence) and ev.kind == "triangular"


def test_exp_small(r2, r3):
    assert exp(der(["0", "0", "1"], r3)).images[2] == parse_poly("x3 + 1", r3)
    assert exp(der(["0", "x1"], r2)).images == (r2.var(1), parse_poly("x2 + x1", r2))


def test_exp_nagata(r3):
    d = der(["-2*x2", "x3", "0"], r3)
    f = parse_poly("x1*x3 + x2^2", r3)
    phi = exp(d.scale(f))
    x1, x2, x3 = r3.gens()
    assert phi.images == (x1 - f * x2 * 2 - f * f * x3, x2 + f * x3, x3)
    assert det_j(phi) == r3.one()
    assert compose(phi, Endo(r3, phi.inverse)).is_identity()


def test_exp_needs_rationals():
    from polywild.coeff import ZZ

    R = Ring(2, ZZ)
    with pytest.raises(UnsupportedDomain):
        exp(Derivation(R, [R.zero(), R.var(1)]))


def test_formal_log(r2, r3):
    d = formal_log(Endo(r2, [r2.var(1), parse_poly("x2 + x1", r2)]))
    assert d.images == (r2.zero(), r2.var(1))
    assert formal_log(Endo.identity(r3)).is_zero()
    base = der(["-2*x2", "x3", "0"], r3).scale(parse_poly("x1*x3 + x2^2", r3))
    assert formal_log(exp(base)) == base


def test_conjugate_identity(r3):
    d = der(["x2", "x3^2", "0"], r3)
    assert conjugate(d, Endo.identity(r3)) == d


def test_conjugate_jacobian(r3):
    # phi^{-1} o Delta_(g1,g2) o phi = det J(phi)^{-1} Delta_(phi^{-1} g1, phi^{-1} g2) for det 1 maps
    step = Endo(r3, [r3.var(1), parse_poly("x2 + x1^2", r3), r3.var(3)],
                [r3.var(1), parse_poly("x2 - x1^2", r3), r3.var(3)])
    g1, g2 = parse_poly("x1*x3 + x2", r3), parse_poly("x3^2 + x1", r3)
    lhs = conjugate(jacobian_derivation(g1, g2), step)
    inv = Endo(r3, step.inverse)
    rhs = jacobian_derivation(inv(g1), inv(g2))
    assert lhs == rhs


def test_triangular_kernel(r2):
    assert triangular_kernel(der(["1", "x1"], r2)) == parse_poly("x2 - 1/2*x1^2", r2)
    assert triangular_kernel(der(["1", "0"], r2)) == r2.var(2)


def test_triangular_kernel_over_qt():
    R = Ring(2, QQT)
    d = Derivation(R, [parse_poly("t", R), parse_poly("-2*x1", R)])
    h = triangular_kernel(d)
    assert apply(d, h).is_zero()
    assert h * parse_poly("t", R) == parse_poly("t*x2 + x1^2", R) or h == parse_poly("t*x2 + x1^2", R)


def test_rentschler_kernel(r2):
    g, _ = rentschler_kernel(der(["0", "1"], r2))
    assert g in (r2.var(1), -r2.var(1))
    with pytest.raises(NotExact):
        rentschler_kernel(der(["x1", "x2"], r2))


def test_rentschler_matches_triangular(r2):
    rng = random.Random(11)
    for _ in range(10):
        d = random_triangular(r2, rng)
        if d.is_zero():
            continue
        g, _ = rentschler_kernel(d)
        h = triangular_kernel(d)
        assert apply(d, g).is_zero() and apply(d, h).is_zero()


def test_irreducible(r3):
    d1 = jacobian_derivation(parse_poly("x1*x3 - x2^2", r3), r3.var(1))
    assert irreducible_check(d1)
    assert irreducible_check(der(["1", "0", "0"], r3))
    assert not irreducible_check(der(["x1", "x1*x2", "0"], r3))


def test_d4_of_31_not_irreducible():
    fam = build_family(LscParams.zero(3, 1, 5), verify=False)
    assert not irreducible_check(fam.D[4])


def test_coprime(r3):
    assert coprime([r3.var(1), parse_poly("x2^2", r3)])
    assert not coprime([parse_poly("x1*x2", r3), parse_poly("x1*x3", r3)])


def test_vp_valuation(r2, r3):
    assert vp_valuation(parse_poly("x1^2*x2", r2), r2.var(1)) == 2
    assert vp_valuation(parse_poly("x1 + 1", r2), r2.var(2)) == 0
    fam = build_family(LscParams.zero(3, 2, 4), verify=False)
    assert vp_valuation(apply(fam.D[3], fam.r), fam.f[3]) == 1


def test_plinth_trivial(r3):
    d = der(["0", "0", "1"], r3)
    w = plinth_witness(d, r3.var(3), r3.var(1), [r3.var(1), r3.var(2)], 3)
    assert w.valuation == 0 and w.i_lower == 0


def test_plinth_d1():
    fam = build_family(LscParams.zero(3, 2, 3), verify=False)
    R = fam.r.ring
    w = plinth_witness(fam.D[1], R.var(2), R.var(1), [fam.f[1], fam.f[2]], 4)
    assert w.valuation == 1 and w.j_found == 0 and w.i_lower == 1


def test_rank3():
    fam = build_family(LscParams.zero(3, 2, 3), verify=False)
    ws = [plinth_witness(fam.D[2], fam.r, p, [fam.f[2], fam.f[3]], 6) for p in (fam.f[2], fam.f[3])]
    assert all(w.i_lower == 1 and w.search_complete for w in ws)
    ev = rank3_evidence(fam.D[2], ws)
    assert ev is not None and ev.to_json()["tag"] == "rank3"


def test_random_triangular_is_triangular(r3):
    rng = random.Random(3)
    for _ in range(20):
        d = random_triangular(r3, rng)
        for k, g in enumerate(d.images, start=1):
            assert all(g.degree(v) <= 0 for v in range(k, 4))

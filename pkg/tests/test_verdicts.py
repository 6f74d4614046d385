from fractions import Fraction

import pytest

from polywild import QQ, QQT, ZZ, Ring, parse_poly
from polywild.deriv import Derivation, exp
from polywild.endo import compose
from polywild.errors import ConstantTheta, NotAffine, NotInKernel, NotTriangular, UnsupportedDomain
from polywild.tame2 import decide_tame, nagata_endo
from polywild.verdicts import (
    TriangularData2,
    affine_lnd_verdict,
    decompose_T_gh,
    nagata_check,
    nagata_coordinate_wildness,
    phi_zeta_verify,
    theta_family,
    thm_hD_verdict,
    thm_triangular3_verdict,
)

RT = Ring(2, QQT)
R3 = Ring(3, QQ)
R1 = Ring(1, QQ)


def tri2(a, b, ring=RT):
    return Derivation(ring, [parse_poly(a, ring), parse_poly(b, ring)])


def test_hd_nagata_wild():
    d = tri2("t", "-2*x1")
    data = TriangularData2.from_derivation(d)
    f = parse_poly("t*x2 + x1^2", RT)
    v = thm_hD_verdict(data, f)
    assert v.outcome == "wild" and v.data["I"] == [1]
    assert decide_tame(exp(d.scale(f))).outcome == "wild"


def test_hd_tame_cases():
    R = Ring(2, QQ)
    d = tri2("1", "x1", R)
    assert thm_hD_verdict(TriangularData2.from_derivation(d), parse_poly("x2 - 1/2*x1^2", R)).outcome == "tame"
    d = tri2("t", "1")
    f = parse_poly("t*x2 - x1", RT)
    v = thm_hD_verdict(TriangularData2.from_derivation(d), f)
    assert v.outcome == "tame" and v.data["I"] == [0]
    assert decide_tame(exp(d.scale(f))).is_tame


def test_hd_needs_kernel_element():
    with pytest.raises(NotInKernel):
        thm_hD_verdict(TriangularData2.from_derivation(tri2("t", "-2*x1")), RT.var(2))


def test_hd_rejects_integers():
    R = Ring(2, ZZ)
    d = Derivation(R, [R.const(2), parse_poly("-2*x1", R)])
    with pytest.raises(UnsupportedDomain):
        thm_hD_verdict(TriangularData2.from_derivation(d), parse_poly("2*x2 + x1^2", R))


def test_not_triangular():
    with pytest.raises(NotTriangular):
        TriangularData2.from_derivation(tri2("x2", "1"))


def test_coordinate_wildness():
    data = TriangularData2.from_derivation(tri2("t", "-2*x1"))
    f = parse_poly("t*x2 + x1^2", RT)
    assert nagata_coordinate_wildness(data, f, 1)["grade"] == "wild_not_qtw"
    assert nagata_coordinate_wildness(data, f, 2)["grade"] == "totally_wild"
    clean = TriangularData2.from_derivation(tri2("t", "1"))
    assert nagata_coordinate_wildness(clean, parse_poly("t*x2 - x1", RT), 1)["grade"] == "not_wild"


def der3(texts):
    return Derivation(R3, [parse_poly(t, R3) for t in texts])


def test_triangular3():
    f = parse_poly("x1*x3 + x2^2", R3)
    assert thm_triangular3_verdict(der3(["0", "x1", "-2*x2"]), f).outcome == "wild"
    assert thm_triangular3_verdict(der3(["0", "x1", "x1*x2"]), R3.var(1)).outcome == "tame"
    assert thm_triangular3_verdict(der3(["0", "0", "x1"]), parse_poly("x1^2 + 1", R3)).outcome == "tame"
    with pytest.raises(NotTriangular):
        thm_triangular3_verdict(der3(["x3", "0", "0"]), R3.var(2))


def test_decompose():
    f = parse_poly("x1*x3 + x2^2", R3)
    dec = decompose_T_gh(der3(["0", "x1", "-2*x2"]), f)
    assert (str(dec.g), str(dec.h), str(dec.f0)) == ("x1", "x2^2", "x1*x3 + x2^2")
    scaled = decompose_T_gh(der3(["0", "3*x1", "-6*x2"]), f)
    assert (scaled.g, scaled.h) == (dec.g, dec.h) and scaled.f0 == dec.f0.scale(3)
    other = decompose_T_gh(der3(["0", "x1^2", "-2*x1*x2"]), f)
    assert other.f1 == R3.var(1) and other.f0 == R3.var(1) * f


def test_affine():
    R = Ring(2, QQ)
    d = Derivation(R, [parse_poly("x1 + x2", R), parse_poly("-x1 - x2", R)])
    f = parse_poly("x1 + x2", R)
    assert affine_lnd_verdict(d, f).outcome == "not_applicable"
    assert affine_lnd_verdict(d, R.const(2), v_oracle=lambda q: False).outcome == "tame"
    assert affine_lnd_verdict(d, f, v_oracle=lambda q: False).outcome == "wild"
    with pytest.raises(NotAffine):
        affine_lnd_verdict(Derivation(R, [R.zero(), parse_poly("x1^2", R)]), R.var(1))


def test_theta_square():
    fam = theta_family(parse_poly("x1^2", R1))
    assert fam.e == 3 and fam.T_over_Q == [1]
    assert nagata_check(fam)
    x1, x2, x3 = fam.ring.gens()
    assert fam.y[2] == x3
    assert fam.y[1] == x2 + fam.f * x3
    checks = phi_zeta_verify(fam)
    assert checks and all(checks.values())


def test_theta_ninth_power():
    fam = theta_family(parse_poly("x1^9", R1))
    assert fam.e == 17 and fam.T_over_Q == [1]
    cls = fam.classification()
    assert cls["T_theta over Q"] == [1] and cls["e odd"]


def test_theta_root_case():
    # theta(kappa) = 0 makes phi fix x1 and commute with sigma
    fam = theta_family(parse_poly("x1^2 - 2*x1 + 1", R1))
    assert fam.kappa == 1
    checks = phi_zeta_verify(fam)
    assert checks["phi(x1)=x1"] and checks["sigma o phi = phi o sigma"]
    assert all(checks.values())


def test_theta_constant():
    with pytest.raises(ConstantTheta):
        theta_family(R1.const(4))

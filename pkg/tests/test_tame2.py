import random

import pytest

from polywild import QQ, QQT, ZZ, Ring, parse_poly
from polywild.endo import Endo, compose
from polywild.errors import ArityMismatch, ConstantInput
from polywild.tame2 import (
    affine_reduction_step,
    classify_coordinate_type,
    decide_tame,
    elementary_reduction_step,
    h_membership,
    nagata_endo,
    random_tame,
    tame_reduce_poly,
    tamely_reduced_check,
)
from polywild.weights import bidegree


def endo(texts, ring):
    return Endo(ring, [parse_poly(t, ring) for t in texts])


def test_elementary_step(r2):
    step = elementary_reduction_step(endo(["x1", "x2 + x1^3"], r2))
    assert step.i == 2 and step.f == parse_poly("-x1^3", r2)
    assert elementary_reduction_step(endo(["x1 + x2", "x2"], r2)) is None


def test_affine_step(r2):
    phi = endo(["x1 + x2^2", "x2^2 + x2"], r2)
    step = affine_reduction_step(phi)
    reduced = compose(phi, step.endo())
    assert [g.total_degree() for g in reduced.images] == [1, 2]
    assert affine_reduction_step(endo(["x1^2 + x2", "x2^3"], r2)) is None


def test_affine_step_integer_ratio():
    R = Ring(2, ZZ)
    f = parse_poly("x1 + x2^2", R)
    phi = Endo(R, [f * 3 + R.var(2), f * 2 + R.one()])
    step = affine_reduction_step(phi)
    assert step is not None and step.det().is_unit()


def test_identity_is_tame(r2):
    v = decide_tame(Endo.identity(r2))
    assert v.is_tame and v.steps == []


def test_nagata_is_wild():
    phi = nagata_endo()
    assert phi.ring.domain == QQT
    v = decide_tame(phi)
    assert v.outcome == "wild"
    assert v.to_json()["stuck"]["degree"] == [6]
    assert elementary_reduction_step(v.stuck) is None


def test_random_tame_recomposes(r2):
    rng = random.Random(42)
    for _ in range(15):
        phi = random_tame(r2, rng, max_steps=6)
        v = decide_tame(phi)
        assert v.is_tame
        assert v.recompose(r2).images == phi.images


def test_random_tame_over_integers():
    R = Ring(2, ZZ)
    rng = random.Random(8)
    for _ in range(5):
        phi = random_tame(R, rng, max_steps=4, max_exp=3)
        v = decide_tame(phi)
        assert v.is_tame and v.recompose(R).images == phi.images


def test_three_variables_rejected(r3):
    with pytest.raises(ArityMismatch):
        decide_tame(Endo.identity(r3))


def test_tame_reduce_poly(r2):
    tau, g = tame_reduce_poly(parse_poly("x2 + x1^2", r2))
    assert g.total_degree() == 1
    assert tau(parse_poly("x2 + x1^2", r2)) == g
    tau, g = tame_reduce_poly(parse_poly("2*x2 + 3*x1", r2))
    assert sum(bidegree(g)) == 1
    with pytest.raises(ConstantInput):
        tame_reduce_poly(r2.const(3))


def test_type_two_is_already_reduced():
    R = Ring(2, ZZ)
    g2 = parse_poly("x1 + (2*x2 + x1^2)^2", R)
    tau, g = tame_reduce_poly(g2)
    assert tau.is_identity() and g == g2


def test_tamely_reduced(r2):
    R = Ring(2, ZZ)
    assert tamely_reduced_check(parse_poly("2*x2 + x1^2", R))
    assert not tamely_reduced_check(parse_poly("x2 + x1^2", r2))
    assert tamely_reduced_check(r2.var(1))


def test_classify():
    R = Ring(2, ZZ)
    assert classify_coordinate_type(parse_poly("2*x2 + x1^2", R)).kind == "I"
    t2 = classify_coordinate_type(parse_poly("x1 + (2*x2 + x1^2)^2", R))
    assert t2.kind == "II" and t2.to_json()["zeta"] == "-1" and t2.to_json()["e"] == "2"
    assert t2.to_json()["g"] == "-x1^2"


def test_classify_over_field(r2):
    assert classify_coordinate_type(parse_poly("(x2 + 3*x1)^2 + x1", r2)).kind == "none"
    assert classify_coordinate_type(parse_poly("x2^2 + x1^3", r2)).kind == "none"


def test_h_membership(r2):
    assert h_membership(Endo.identity(r2), parse_poly("x1^2 + x2", r2))

import random

import pytest

from polywild import QQ, ZZ, Ring, parse_poly
from polywild.endo import (
    AffineStep,
    ElementaryStep,
    Endo,
    compose,
    coordinate_verify,
    det_j,
    invert_structured,
    swap,
    verify_automorphism,
)
from polywild.errors import MissingProvenance, NonUnit
from polywild.tame2 import random_tame


def endo(texts, ring):
    return Endo(ring, [parse_poly(t, ring) for t in texts])


def test_swap_squared(r2):
    iota = swap(r2)
    assert compose(iota, iota).is_identity()


def test_swap_from_three_affine_maps(r2):
    # x1 -> x1 + x2, then x2 -> x2 - x1, then x1 -> x1 + x2, then a sign
    a = endo(["x1 + x2", "x2"], r2)
    b = endo(["x1", "x2 - x1"], r2)
    c = endo(["x1", "-x2"], r2)
    got = compose(compose(compose(a, b), a), c)
    assert got.images == swap(r2).images


def test_compose_order(r2):
    sigma = endo(["x1", "x2 + x1^2"], r2)
    tau = endo(["x1 + x2", "x2"], r2)
    # (sigma o tau)(x1) = sigma(x1 + x2)
    assert compose(sigma, tau).images[0] == parse_poly("x1 + x2 + x1^2", r2)


def test_det_j(r2, r3):
    assert det_j(Endo.identity(r3)) == r3.one()
    tau = endo(["x1 + x2^2", "x2"], r2)
    assert det_j(tau) == r2.one()
    phi = endo(["x1", "3*x2 + x1^5"], r2)
    assert det_j(phi) == r2.const(3)


def test_invert_structured(r2):
    step = ElementaryStep(2, QQ(1), r2.var(1) ** 2)
    phi = Endo.from_step(step)
    inv = invert_structured(phi)
    assert inv.images[1] == parse_poly("x2 - x1^2", r2)
    with pytest.raises(MissingProvenance):
        invert_structured(Endo(r2, r2.gens()))


def test_affine_inverse_over_integers():
    R = Ring(2, ZZ)
    step = AffineStep(R, ((ZZ(2), ZZ(1)), (ZZ(1), ZZ(1))), (ZZ(3), ZZ(-1)))
    phi = Endo.from_step(step)
    assert verify_automorphism(phi, Endo(R, phi.inverse))


def test_non_unit_step_has_no_inverse(r2):
    R = Ring(2, ZZ)
    with pytest.raises(NonUnit):
        ElementaryStep(1, ZZ(2), R.var(2)).inverse()


def test_verify_automorphism(r2):
    phi = endo(["x1^2", "x2"], r2)
    assert not verify_automorphism(phi, Endo.identity(r2))


def test_random_round_trip(r2):
    rng = random.Random(5)
    for _ in range(10):
        phi = random_tame(r2, rng, max_steps=5)
        again = Endo.from_steps(r2, phi.steps)
        assert again.images == phi.images
        assert verify_automorphism(phi, Endo(r2, phi.inverse))


def test_coordinate_verify_integers():
    R = Ring(2, ZZ)
    x1, x2 = R.gens()
    h1 = parse_poly("4*x2 + 1 + x1 + 2*x1^2", R)
    h1p = (x1 - 1 - (h1 * h1 * 2 - h1 * 3)).exact_div(R.const(4))
    # solve for x1 from the second coordinate, then x2 from the first
    back1 = x2 * 4 + 1 + x1 * x1 * 2 - x1 * 3
    back2 = (x1 - 1 - back1 - back1 * back1 * 2).exact_div(R.const(4))
    assert coordinate_verify(h1, [h1p], [back1, back2])
    assert not coordinate_verify(x1 * x1, [x2], [x1, x2])


def test_coordinate_verify_specialized(r2):
    x1, x2 = r2.gens()
    a1, a2 = 2, 3
    u = x1 * a1 + x2 * a2
    h4 = u * u * a1 + x2
    h4p = (u - h4 * a2).div_scalar(-a1)
    assert h4 * a2 - h4p * a1 == u
    # back: u = a2*y1 - a1*y2, x2 = y1 - a1*u^2, x1 = (u - a2*x2)/a1
    ub = x1 * a2 - x2 * a1
    bx2 = x1 - ub * ub * a1
    bx1 = (ub - bx2 * a2).div_scalar(a1)
    assert coordinate_verify(h4, [h4p], [bx1, bx2])

"""Property tests for the algebraic invariants."""
import random
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from polywild import QQ, QQT, Ring, parse_poly, wedge2
from polywild.coeff import ext_gcd
from polywild.deriv import Derivation, apply, exp, formal_log, random_triangular, triangular_kernel
from polywild.endo import Endo, compose, det_j, verify_automorphism
from polywild.su3wild import wild_certificate_check, wtest_certify
from polywild.tame2 import decide_tame, random_tame
from polywild.weights import Weight, initial_form

R2 = Ring(2, QQ)
R3 = Ring(3, QQ)
FAST = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def poly_strategy(ring, max_terms=4, max_exp=3):
    mono = st.tuples(*[st.integers(0, max_exp)] * ring.n)
    coef = st.fractions(min_value=-5, max_value=5, max_denominator=3)
    return st.dictionaries(mono, coef, max_size=max_terms).map(ring.from_terms)


polys3 = poly_strategy(R3)
nonzero3 = polys3.filter(lambda p: not p.is_zero())
weights3 = st.tuples(*[st.integers(1, 4)] * 3).map(lambda t: Weight.of(list(t)))


@FAST
@given(st.lists(polys3, min_size=3, max_size=3), polys3, polys3)
def test_leibniz(images, f, g):
    d = Derivation(R3, images)
    assert apply(d, f * g) == apply(d, f) * g + f * apply(d, g)


@FAST
@given(polys3, nonzero3)
def test_exact_div_round_trip(f, g):
    assert (f * g).exact_div(g) == f


@FAST
@given(polys3, polys3)
def test_wedge_antisymmetry(f, g):
    assert wedge2(f, g) == tuple(-c for c in wedge2(g, f))


@FAST
@given(polys3)
def test_parse_print_round_trip(f):
    text = str(f)
    again = parse_poly(text, R3)
    assert again == f
    assert str(again) == text


@FAST
@given(nonzero3, nonzero3, weights3)
def test_initial_form_multiplicative(f, g, w):
    assert initial_form(f * g, w) == initial_form(f, w) * initial_form(g, w)


@FAST
@given(st.integers(0, 10_000))
def test_exp_log_and_jacobian(seed):
    rng = random.Random(seed)
    d = random_triangular(R3, rng)
    phi = exp(d)
    assert formal_log(phi) == d
    assert det_j(phi) == R3.one()
    assert verify_automorphism(phi, Endo(R3, phi.inverse))


@FAST
@given(st.integers(0, 10_000))
def test_kernel_elements_fixed_by_exp(seed):
    d = random_triangular(R2, random.Random(seed))
    if d.is_zero():
        return
    h = triangular_kernel(d)
    assert exp(d)(h) == h


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_tame_engine_sound(seed):
    phi = random_tame(R2, random.Random(seed), max_steps=5)
    v = decide_tame(phi)
    assert v.is_tame and v.recompose(R2).images == phi.images


@FAST
@given(st.integers(0, 10_000))
def test_compose_associative(seed):
    rng = random.Random(seed)
    a, b, c = (random_tame(R2, rng, max_steps=2, max_exp=2) for _ in range(3))
    assert compose(compose(a, b), c).images == compose(a, compose(b, c)).images


@FAST
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=4), st.lists(st.integers(-6, 6), min_size=1, max_size=4))
def test_bezout_over_qt(ca, cb):
    t = QQT.gen()
    a = sum((t ** i * c for i, c in enumerate(ca)), QQT(0))
    b = sum((t ** i * c for i, c in enumerate(cb)), QQT(0))
    g, u, v = ext_gcd(a, b)
    assert u * a + v * b == g
    if not g.is_zero():
        assert g.divides(a) and g.divides(b)


LEX3 = Weight.of([[0, 0, 1], [0, 1, 0], [1, 0, 0]])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_no_direct_certificate_on_triangular_tame(seed):
    rng = random.Random(seed)
    x1, x2, x3 = R3.gens()
    a = x1 ** rng.randint(1, 3) * rng.choice([-2, -1, 1, 3])
    b = x1 * x2 ** rng.randint(1, 2) * rng.choice([-1, 1, 2]) + x1 ** rng.randint(0, 2)
    F = [x1, x2 + a, x3 + b]
    G = [x1, x2 - a, x3 - b.substitute([x1, x2 - a, x3])]
    assert wild_certificate_check(Endo(R3, F, G), LEX3) is None


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=-7, max_value=7, max_denominator=4).filter(lambda c: c != 0))
def test_wtest_scaling_stable(c):
    P = parse_poly("x1*x3 - x2^2", R3)
    Q = parse_poly("x1*x3 - x2", R3)
    assert wtest_certify(P.scale(c)).certified == wtest_certify(P).certified
    assert wtest_certify(Q.scale(c)).certified == wtest_certify(Q).certified

from fractions import Fraction

import pytest

from polywild import parse_poly
from polywild.deriv import apply
from polywild.errors import DegenerateInput, DepthBeyondI, HypothesisNotMet, PreconditionFailed
from polywild.lsc import (
    R2,
    R3,
    LscParams,
    build_family,
    build_tilde,
    bt_weight,
    delta,
    delta_recurrence_check,
    eta,
    fibonacci_identity_check,
    homogeneity_check,
    r_poly,
    seq_ab,
    sigma3_build,
    sigma3_check,
)
from polywild.weights import wdeg


def P(text):
    return parse_poly(text, R3)


def test_sequences():
    s = seq_ab(3, 1, 5)
    assert s.a[1:6] == [1, 2, 1, 1, 0] and s.I.max == 4
    s = seq_ab(2, 2, 8)
    assert all(v == 1 for v in s.a[1:]) and s.I.max is None
    assert seq_ab(3, 2, 5).a == [1, 1, 2, 3, 7, 11]
    assert seq_ab(1, 4, 3).I.max == 1 and seq_ab(2, 1, 3).I.max == 2


def test_eta_first_gives_q1():
    params = LscParams(3, 1, (Fraction(2), Fraction(5)), ())
    q1 = eta(1, params).substitute([R3.var(1), r_poly(params)], R3)
    assert q1 == P("x1*x2*x3 - 2*x2 - 5*x2^2 - x2^3")


def test_eta_homogeneous_shape():
    params = LscParams.zero(3, 3, 5)
    s = seq_ab(3, 3, 5)
    y, z = R2.gens()
    for i in range(1, 5):
        assert eta(i, params, s) == y ** 3 + z ** s.a[i]


def test_eta_z_degree_is_a():
    params = LscParams(3, 2, (Fraction(1), Fraction(-1)), (Fraction(4),))
    s = seq_ab(3, 2, 6)
    for i in range(1, 6):
        assert eta(i, params, s).degree(2) == s.a[i]


def test_closed_forms_31():
    a2 = Fraction(3, 2)
    fam = build_family(LscParams(3, 1, (Fraction(0), a2), (), 5))
    f, x1, x2, x3 = fam.f, *R3.gens()
    c = R3.const(a2)
    assert f[2] == x1 * x3 - x2 * x2 - c * x2
    assert f[3] == x1 - (x2 * 2 + c) * f[2] + x3 * f[2] ** 2
    assert f[4] == x3 * f[2] - x2 - c
    assert f[5] == x3 * f[4] - 1
    assert fam.irreducible == {1: True, 2: True, 3: True, 4: False}


def test_family_identities():
    fam = build_family(LscParams(3, 2, (Fraction(1), Fraction(2)), (Fraction(-1),), 5))
    for i in range(1, 5):
        assert apply(fam.D[i], fam.r) == fam.f[i] * fam.f[i + 1]
    assert all(row["status"] == "verified" for row in fam.transcript)


def test_depth_guard():
    with pytest.raises(DepthBeyondI):
        build_family(LscParams.zero(3, 1, 6))
    with pytest.raises(DepthBeyondI):
        build_family(LscParams.zero(1, 3, 3))


def test_homogeneity():
    fam = build_family(LscParams.zero(3, 3, 3), verify=False)
    w = bt_weight(fam.params)
    assert w.to_json() == [[3], [3], [3]]
    assert homogeneity_check(fam)
    assert homogeneity_check(build_family(LscParams.zero(4, 3, 5), verify=False))
    with pytest.raises(PreconditionFailed):
        homogeneity_check(build_family(LscParams(3, 3, (Fraction(1), Fraction(0)), (Fraction(0),) * 2, 3)))


def test_delta_values():
    fam = build_family(LscParams.zero(3, 1, 5), verify=False)
    assert [delta(g) for g in fam.f] == [(0, 1, 0), (1, 0, 0), (1, 0, 1), (2, 0, 3), (1, 0, 2), (1, 0, 3)]
    assert delta(fam.r) == (1, 1, 1)
    assert delta_recurrence_check(fam)
    assert delta_recurrence_check(build_family(LscParams.zero(3, 2, 5), verify=False))
    with pytest.raises(HypothesisNotMet):
        delta_recurrence_check(build_family(LscParams.zero(2, 2, 4), verify=False))


def test_fibonacci():
    fam = build_family(LscParams.zero(3, 3, 5), verify=False)
    f, r = fam.f, fam.r
    assert f[0] * f[2] == f[1] ** 3 + r
    assert fibonacci_identity_check(fam, 4)
    a = fam.seqs.a
    assert all(a[i + 1] == 3 * a[i] - a[i - 1] for i in range(1, 5))


def test_tilde_fibonacci_form():
    for l, m in [(1, 3), (2, 3), (1, 5)]:
        res = build_tilde(LscParams.zero(3, 3), f"y^{l}", f"-z^{m}", 2)
        f2 = P("x1*x3 - x2^2")
        x1, x2, x3 = R3.gens()
        want = f2 ** (2 * l) * x3 + f2 ** l * x1 ** (m - 1) * x2 * 2 + x1 ** (2 * m - 1)
        assert res.f_next == want


def test_tilde_other_shape():
    res = build_tilde(LscParams.zero(3, 2), "y", "-z", 3)
    assert all(row["status"] == "verified" for row in res.transcript)


def test_tilde_degenerate():
    with pytest.raises(DegenerateInput):
        build_tilde(LscParams.zero(3, 3), "2", "0", 2)


def test_sigma3():
    assert sigma3_check(build_family(LscParams.zero(3, 1, 5), verify=False))
    fam = build_family(LscParams(3, 1, (Fraction(0), Fraction(1)), (), 5), verify=False)
    s3 = sigma3_build(fam)
    assert all(s3.checks.values())
    assert s3.sigma.images[2] == R3.var(3)
    with pytest.raises(PreconditionFailed):
        sigma3_check(build_family(LscParams.zero(3, 2, 5), verify=False))


def test_catalog_json():
    out = build_family(LscParams.zero(3, 1, 5)).to_json()
    assert out["f"][5] == "x1*x3^3 - x2^2*x3^2 - x2*x3 - 1"
    assert {"params", "a", "I", "f", "identities"} <= set(out)

"""Closed-form tame/wild verdicts for exponential automorphisms and the theta family."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd
from typing import Callable, Sequence

from .coeff import QQ, Elem, Frac, cyclotomic, v_of_r_member
from .deriv import Derivation, LndEvidence, apply, coprime, exp, lnd_verify
from .endo import Endo, compose
from .errors import (
    ArityMismatch,
    ConstantTheta,
    DivisionFailure,
    NotAffine,
    NotDivisible,
    NotInKernel,
    NotNilpotentLinearPart,
    NotTriangular,
    PreconditionFailed,
    UnsupportedDomain,
)
from .poly import Poly, Ring, mgcd

TAME = "tame"
WILD = "wild"
NOT_APPLICABLE = "not_applicable"


@dataclass
class Verdict:
    outcome: str
    theorem: str
    clauses: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def is_tame(self) -> bool:
        return self.outcome == TAME

    def to_json(self) -> dict:
        return {"outcome": self.outcome, "theorem": self.theorem, "clauses": self.clauses, "data": self.data}


def _divides_in_ring(a: Elem, b: Elem) -> bool:
    """b in aR."""
    if b.is_zero():
        return True
    try:
        b.exact_div(a)
    except NotDivisible:
        return False
    return True


# ----------------------------------------------------------------------
# triangular derivations in two variables over R


@dataclass
class TriangularData2:
    """D(x1) = a, D(x2) = sum b_i x1^i over R."""

    ring: Ring
    a: Elem
    b: tuple

    def __post_init__(self):
        if self.ring.n != 2:
            raise ArityMismatch("two variables expected")
        if self.a.is_zero():
            raise PreconditionFailed("D(x1) must be nonzero")

    @classmethod
    def from_derivation(cls, d: Derivation) -> "TriangularData2":
        if d.ring.n != 2:
            raise ArityMismatch("two variables expected")
        d1, d2 = d.images
        if not d1.is_constant() or d2.degree(2) > 0:
            raise NotTriangular("need D(x1) in R and D(x2) in R[x1]")
        l = max(d2.degree(1), 0)
        b = tuple(d2.coeff((i, 0)) for i in range(l + 1))
        return cls(d.ring, d1.constant_value(), b)

    def derivation(self) -> Derivation:
        x1 = self.ring.var(1)
        d2 = self.ring.zero()
        for i, c in enumerate(self.b):
            if not c.is_zero():
                d2 = d2 + x1 ** i * self.ring.const(c)
        return Derivation(self.ring, [self.ring.const(self.a), d2])

    def index_set(self) -> list[int]:
        return [i for i, c in enumerate(self.b) if not _divides_in_ring(self.a, c)]

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": [str(c) for c in self.b], "I": self.index_set()}


def _check_kernel(d: Derivation, f: Poly):
    if not apply(d, f).is_zero():
        raise NotInKernel("D(f) != 0")


def thm_hD_verdict(data: TriangularData2, f: Poly) -> Verdict:
    """exp(fD) for triangular D on R[x1, x2]: tame iff I is empty, or I = {0} with b0/a in V(R) or deg_x2 f = 1."""
    d = data.derivation()
    _check_kernel(d, f)
    dom = data.ring.domain
    if dom.kind not in ("QQ", "QQ[t]"):
        raise UnsupportedDomain("the exponential verdict needs a Q-domain: Q or Q[t]")
    if f.is_constant():
        return Verdict(TAME, "hD", {"f in R": True}, {"reason": "fD is triangular"})
    if all(c.is_zero() for c in data.b):
        return Verdict(TAME, "hD", {"D(x2)=0": True}, {"reason": "exp fD fixes x2"})
    I = data.index_set()
    deg = f.degree(2)
    clauses = {"I empty": not I}
    info = {**data.to_json(), "deg_x2 f": deg}
    if not I:
        return Verdict(TAME, "hD", clauses, info)
    if I == [0]:
        ratio = Frac(data.b[0], data.a)
        in_v = v_of_r_member(ratio)
        clauses.update({"I={0}": True, "b0/a in V(R)": in_v, "deg_x2 f=1": deg == 1})
        info["b0/a"] = str(ratio)
        return Verdict(TAME if in_v or deg == 1 else WILD, "hD", clauses, info)
    clauses["I={0}"] = False
    info["I meets 1..l"] = True
    return Verdict(WILD, "hD", clauses, info)


def nagata_coordinate_wildness(data: TriangularData2, f: Poly, i: int) -> dict:
    """Wildness grade of phi(x_i) for phi = exp(fD) over a PID."""
    if i not in (1, 2):
        raise PreconditionFailed("i must be 1 or 2")
    if not data.ring.domain.is_pid:
        raise PreconditionFailed("needs a PID so that V(R) = K^x")
    verdict = thm_hD_verdict(data, f)
    wild = verdict.outcome == WILD
    deg = f.degree(2)
    if not wild:
        grade = "not_wild"
    elif i == 2 or deg >= 2:
        grade = "totally_wild"
    else:
        grade = "wild_not_qtw"
    return {"grade": grade, "i": i, "phi_wild": wild, "deg_x2 f": deg, "verdict": verdict.to_json()}


# ----------------------------------------------------------------------
# triangular derivations in three variables over Q


def _is_triangular3(d: Derivation) -> bool:
    d1, d2, d3 = d.images
    return d1.is_constant() and d2.variables() <= {1} and d3.variables() <= {1, 2}


def thm_triangular3_verdict(d: Derivation, f: Poly) -> Verdict:
    if d.ring.n != 3 or d.ring.domain.kind != "QQ":
        raise ArityMismatch("triangular verdicts work in Q[x1, x2, x3]")
    if not _is_triangular3(d):
        raise NotTriangular("need D(x1) in k, D(x2) in k[x1], D(x3) in k[x1, x2]")
    _check_kernel(d, f)
    d1, d2, d3 = d.images
    if f.is_constant():
        return Verdict(TAME, "triangular3", {"f in k": True})
    if d1.is_zero() and f.variables() <= {1}:
        return Verdict(TAME, "triangular3", {"case": "(i) f in k[x1]"})
    if sum(g.is_zero() for g in d.images) >= 2:
        return Verdict(TAME, "triangular3", {"case": "(ii) two images vanish"})
    if not d1.is_zero():
        return Verdict(TAME, "triangular3", {"case": "(iii) D(x1) in k^x"})
    bad = []
    for k in range(1, d3.degree(2) + 1):
        coeff = _x2_coefficient(d3, k)
        if not coeff.is_zero() and not d2.divides(coeff):
            bad.append(k)
    clauses = {"case": "main", "coefficients outside D(x2)k[x1]": bad}
    return Verdict(WILD if bad else TAME, "triangular3", clauses)


def _x2_coefficient(g: Poly, k: int) -> Poly:
    ring = g.ring
    terms = {}
    for e, c in g.terms().items():
        if e[1] == k:
            terms[(e[0], 0, e[2])] = c
    return ring.from_terms(terms) if terms else ring.zero()


@dataclass
class TghDecomposition:
    g: Poly
    h: Poly
    f0: Poly
    f1: Poly

    def T(self) -> Derivation:
        ring = self.g.ring
        return Derivation(ring, [ring.zero(), self.g, -self.h.diff(2)])

    def to_json(self) -> dict:
        return {"g": str(self.g), "h": str(self.h), "f0": str(self.f0), "f1": str(self.f1)}


def _monic_x1(p: Poly) -> Poly:
    return p.div_scalar(p.leading_coeff())


def decompose_T_gh(d: Derivation, f: Poly) -> TghDecomposition:
    """fD = f0 T_{g,h} with (g, h) coprime, g monic, h in x2 k[x1, x2]."""
    verdict = thm_triangular3_verdict(d, f)
    if verdict.outcome != WILD:
        raise PreconditionFailed("the decomposition exists only for wild inputs")
    ring = d.ring
    _, d2, d3 = d.images
    h1 = -d3.integrate(2)
    G = d2
    for k in range(1, h1.degree(2) + 1):
        c = _x2_coefficient(h1, k)
        if not c.is_zero():
            G = mgcd(G, c)
    g = _monic_x1(d2.exact_div(G))
    f1 = d2.exact_div(g)
    h = h1.exact_div(f1)
    out = TghDecomposition(g, h, f * f1, f1)
    # re-verify the Lambda conditions and the factorization
    T = out.T()
    if not all(a == b * out.f0 for a, b in zip((f * x for x in d.images), T.images)):
        raise DivisionFailure("fD != f0 T_{g,h}")
    if not coprime([g, h]):
        raise DivisionFailure("g and h share a factor")
    if g.divides(h.diff(2).diff(2)):
        raise DivisionFailure("second x2-derivative of h lies in g k[x1, x2]")
    if any(e[1] == 0 for e in h.monomials()):
        raise DivisionFailure("h is not in x2 k[x1, x2]")
    return out


# ----------------------------------------------------------------------
# affine derivations in two variables


def affine_lnd_verdict(d: Derivation, f: Poly, v_oracle: Callable[[Frac], bool] | None = None) -> Verdict:
    if d.ring.n != 2:
        raise ArityMismatch("two variables expected")
    if any(g.total_degree() > 1 for g in d.images):
        raise NotAffine("D is not affine")
    ev = lnd_verify(d)
    if not isinstance(ev, LndEvidence):
        raise NotNilpotentLinearPart("D is not locally nilpotent")
    _check_kernel(d, f)
    # D(x_j) = sum_i A[i][j] x_i + b_j
    A = [[d.images[j].coeff((1, 0) if i == 0 else (0, 1)) for j in range(2)] for i in range(2)]
    trace = A[0][0] + A[1][1]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if not trace.is_zero() or not det.is_zero():
        raise NotNilpotentLinearPart("linear part is not nilpotent")
    data = {"A": [[str(c) for c in row] for row in A]}
    if all(c.is_zero() for row in A for c in row):
        return Verdict(NOT_APPLICABLE, "affine_lnd", {"triangular": True}, data)
    # A = t [[a1 a2, -a1^2], [a2^2, -a1 a2]]
    if A[0][1].is_zero() or A[1][0].is_zero():
        return Verdict(NOT_APPLICABLE, "affine_lnd", {"alpha vanishes": True}, data)
    ratio = Frac(A[0][0], A[1][0])
    oracle = v_oracle or v_of_r_member
    in_v = oracle(ratio)
    data["alpha1/alpha2"] = str(ratio)
    if in_v:
        return Verdict(NOT_APPLICABLE, "affine_lnd", {"alpha1/alpha2 in V(R)": True}, data)
    tame = f.is_constant()
    return Verdict(TAME if tame else WILD, "affine_lnd", {"alpha1/alpha2 in V(R)": False, "f in R": tame}, data)


# ----------------------------------------------------------------------
# the theta family


def _taylor(theta: Sequence[Fraction], kappa: Fraction) -> list[Fraction]:
    """u_i with theta(z) = sum u_i (z - kappa)^i."""
    d = len(theta) - 1
    u = []
    for i in range(d + 1):
        s = sum(Fraction(factorial(j), factorial(j - i)) * theta[j] * kappa ** (j - i) for j in range(i, d + 1))
        u.append(s / factorial(i))
    return u


def _coeffs_of(theta: Poly) -> list[Fraction]:
    if theta.ring.n != 1:
        raise ArityMismatch("theta must be univariate")
    d = max(theta.degree(1), 0)
    return [theta.coeff((k,)).to_fraction() for k in range(d + 1)]


@dataclass
class ThetaFamily:
    theta: list[Fraction]
    d: int
    kappa: Fraction
    u: list[Fraction]
    e: int
    ring: Ring
    D: Derivation
    f: Poly
    sigma: Endo
    y: tuple
    checks: dict

    def theta_at(self, z: Poly) -> Poly:
        out = z.ring.zero()
        for k, c in enumerate(self.theta):
            if c:
                out = out + (z ** k).scale(c)
        return out

    @property
    def T_over_Q(self) -> list[int]:
        # roots of unity in Q are +-1 and e is odd
        return [1] if self.e % 2 else [1, -1]

    def classification(self) -> dict:
        out = {"e": self.e, "T_theta over Q": self.T_over_Q, "e odd": self.e % 2 == 1}
        if self.d >= 9 and self.d not in (10, 12):
            out["y1"] = "quasi-totally wild; totally wild over Q since T_theta = {1}"
        return out

    def to_json(self) -> dict:
        return {
            "theta": [str(c) for c in self.theta],
            "d": self.d,
            "kappa": str(self.kappa),
            "u": [str(c) for c in self.u],
            "e": self.e,
            "D": self.D.to_json(),
            "f": str(self.f),
            "y": [str(g) for g in self.y],
            "checks": self.checks,
            "classification": self.classification(),
        }


def theta_family(theta: Poly) -> ThetaFamily:
    coeffs = _coeffs_of(theta)
    d = len(coeffs) - 1
    if d < 1 or coeffs[-1] == 0:
        raise ConstantTheta("theta must have degree at least 1")
    c, c1 = coeffs[d], coeffs[d - 1]
    kappa = -c1 / (c * d)
    u = _taylor(coeffs, kappa)
    if u[d - 1] != 0 or u[d] != c:
        raise DivisionFailure("recentering failed")
    e = 0
    for i in range(1, d + 1):
        if u[i]:
            e = gcd(e, 2 * i - 1)
    ring = Ring(3, QQ)
    x1, x2, x3 = ring.gens()
    th = lambda z: sum(((z ** k).scale(a) for k, a in enumerate(coeffs) if a), ring.zero())
    dth = [a * k for k, a in enumerate(coeffs)][1:]
    dtheta = sum(((x2 ** k).scale(a) for k, a in enumerate(dth) if a), ring.zero())
    D = Derivation(ring, [-dtheta, x3, ring.zero()])
    f = x1 * x3 + th(x2)
    sigma = exp(D.scale(f))
    y = sigma.images
    # closed form y1 = x1 - sum theta^(i)(x2) f^i x3^(i-1) / i!
    closed = x1
    deriv = coeffs
    for i in range(1, d + 1):
        deriv = [a * k for k, a in enumerate(deriv)][1:]
        ti = sum(((x2 ** k).scale(a) for k, a in enumerate(deriv) if a), ring.zero())
        closed = closed - (ti * f ** i * x3 ** (i - 1)).scale(Fraction(1, factorial(i)))
    checks = {
        "y1 closed form": y[0] == closed,
        "y2=x2+f*x3": y[1] == x2 + f * x3,
        "y3=x3": y[2] == x3,
        "sigma fixes f": sigma(f) == f,
        "y1*x3+theta(y2)=f": y[0] * x3 + th(y[1]) == f,
        "e divides 2d-1": (2 * d - 1) % e == 0,
    }
    if not all(checks.values()):
        raise DivisionFailure(f"theta family identity failed: {checks}")
    return ThetaFamily(coeffs, d, kappa, u, e, ring, D, f, sigma, tuple(y), checks)


def phi_zeta(fam: ThetaFamily, ring: Ring, zeta: Poly) -> Endo:
    """phi_zeta over a ring whose coefficients contain zeta; g_zeta by exact division."""
    x1, x2, x3 = ring.gens()
    kappa = ring.const(fam.kappa)
    tk = sum((fam.kappa ** k * a for k, a in enumerate(fam.theta)), Fraction(0))
    img2 = zeta ** 2 * (x2 - kappa) + (zeta * (zeta - 1) * x3).scale(tk) + kappa
    img3 = zeta * x3
    theta_x2 = fam.theta_at(x2)
    theta_img2 = fam.theta_at(img2)
    numer = zeta * theta_x2 - theta_img2 + (1 - zeta).scale(tk)
    try:
        g = numer.exact_div(zeta * x3)
    except NotDivisible as exc:
        raise DivisionFailure("numerator of g_zeta is not divisible by zeta*x3") from exc
    return Endo(ring, [x1 + g, img2, img3])


def phi_zeta_verify(fam: ThetaFamily, e: int | None = None) -> dict:
    """The commutation identities for phi_zeta, symbolically in Q[zeta]/(zeta^e - 1)."""
    e = e or fam.e
    ring = Ring(3, cyclotomic(e))
    zeta = ring.param(0)
    phi = phi_zeta(fam, ring, zeta)
    y = [g.change_ring(ring) for g in fam.y]
    kappa = ring.const(fam.kappa)
    x1, x2, x3 = ring.gens()
    checks = {
        "phi(y1)=y1": phi(y[0]) == y[0],
        "phi(y2-kappa)=zeta^2(y2-kappa)": phi(y[1] - kappa) == zeta ** 2 * (y[1] - kappa),
        "phi(y3)=zeta*y3": phi(y[2]) == zeta * y[2],
    }
    if fam.u[0] == 0:
        sigma = Endo(ring, y)
        checks["phi(x1)=x1"] = phi.images[0] == x1
        checks["phi(x2-kappa)=zeta^2(x2-kappa)"] = phi.images[1] - kappa == zeta ** 2 * (x2 - kappa)
        checks["sigma o phi = phi o sigma"] = compose(sigma, phi).images == compose(phi, sigma).images
    # homomorphism in the double quotient
    ring2 = Ring(3, cyclotomic(e, 2))
    a, b = ring2.param(0), ring2.param(1)
    pa, pb, pab = phi_zeta(fam, ring2, a), phi_zeta(fam, ring2, b), phi_zeta(fam, ring2, a * b)
    checks["phi_a o phi_b = phi_ab"] = compose(pa, pb).images == pab.images
    # zeta = 1 gives the identity
    one = phi_zeta(fam, Ring(3, QQ), Ring(3, QQ).one())
    checks["phi_1 = id"] = one.is_identity()
    if not all(checks.values()):
        raise DivisionFailure(f"phi_zeta identity failed: {checks}")
    return checks


def nagata_check(fam: ThetaFamily) -> bool:
    """sigma_theta equals Nagata's automorphism image-wise (theta = z^2)."""
    ring = fam.ring
    x1, x2, x3 = ring.gens()
    f = x1 * x3 + x2 ** 2
    want = [x1 - (x2 * f).scale(2) - f ** 2 * x3, x2 + f * x3, x3]
    return list(fam.sigma.images) == want


__all__ = [
    "TAME", "WILD", "NOT_APPLICABLE", "Verdict", "TriangularData2", "thm_hD_verdict",
    "nagata_coordinate_wildness", "thm_triangular3_verdict", "decompose_T_gh", "TghDecomposition",
    "affine_lnd_verdict", "ThetaFamily", "theta_family", "phi_zeta", "phi_zeta_verify", "nagata_check",
]

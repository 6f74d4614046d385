"""Derivations of R[x1..xn]: application, nilpotency evidence, exp/log, kernels."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import flint

from .errors import (
    ArityMismatch,
    InvalidEvidence,
    MissingInverse,
    NotExact,
    NotTriangular,
    NotUnipotent,
    PreconditionFailed,
    RingMismatch,
    UnsupportedDomain,
    ZeroDerivation,
    ZeroInput,
)
from .endo import Endo, ExpStep
from .poly import Poly, Ring, determinant, mgcd, normalize_unit

DEFAULT_CAP = 64


class Derivation:
    """An R-derivation determined by the images of the variables."""

    __slots__ = ("ring", "images")

    def __init__(self, ring: Ring, images: Sequence[Poly]):
        if len(images) != ring.n:
            raise ArityMismatch(f"need {ring.n} images, got {len(images)}")
        images = tuple(ring.const(g) if not isinstance(g, Poly) else g for g in images)
        for g in images:
            if g.ring != ring:
                raise RingMismatch("image outside the ring")
        self.ring = ring
        self.images = images

    def __call__(self, f: Poly) -> Poly:
        return apply(self, f)

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.ring == other.ring and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __neg__(self):
        return Derivation(self.ring, [-g for g in self.images])

    def scale(self, f: Poly) -> "Derivation":
        """The derivation f*D."""
        return Derivation(self.ring, [f * g for g in self.images])

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.images)

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.images) + ")"

    def to_json(self) -> dict:
        return {"images": [str(g) for g in self.images]}


def apply(d: Derivation, f: Poly) -> Poly:
    if f.ring != d.ring:
        raise RingMismatch(f"{f.ring} vs {d.ring}")
    acc = d.ring.zero()
    for i, g in enumerate(d.images, start=1):
        if g.is_zero():
            continue
        df = f.diff(i)
        if not df.is_zero():
            acc = acc + g * df
    return acc


# ----------------------------------------------------------------------
# local nilpotency evidence


@dataclass(frozen=True)
class LndEvidence:
    kind: str  # "triangular", "iteration" or "inherited"
    perm: tuple = ()
    bounds: tuple = ()
    reason: str = ""

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.perm:
            out["order"] = list(self.perm)
        if self.bounds:
            out["bounds"] = list(self.bounds)
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class ExceededCap:
    cap: int
    stuck: tuple

    def to_json(self) -> dict:
        return {"kind": "exceeded_cap", "cap": self.cap, "variables": list(self.stuck)}


def triangular_order(d: Derivation) -> tuple | None:
    """A variable order making D triangular, found greedily, or None."""
    remaining = set(range(1, d.ring.n + 1))
    placed: list[int] = []
    while remaining:
        for i in sorted(remaining):
            if d.images[i - 1].variables() <= set(placed):
                placed.append(i)
                remaining.discard(i)
                break
        else:
            return None
    return tuple(placed)


def _nilpotency_index(d: Derivation, f: Poly, cap: int) -> int | None:
    """Least m with D^m(f)=0, or None when cap is reached."""
    g = f
    for m in range(cap + 1):
        if g.is_zero():
            return m
        g = apply(d, g)
    return None


def lnd_verify(d: Derivation, cap: int = DEFAULT_CAP) -> LndEvidence | ExceededCap:
    order = triangular_order(d)
    if order is not None:
        return LndEvidence("triangular", perm=order)
    bounds = []
    stuck = []
    for x in d.ring.gens():
        m = _nilpotency_index(d, x, cap)
        bounds.append(m)
        if m is None:
            stuck.append(len(bounds))
    if stuck:
        return ExceededCap(cap, tuple(stuck))
    return LndEvidence("iteration", bounds=tuple(bounds))


def check_evidence(d: Derivation, ev) -> bool:
    if not isinstance(ev, LndEvidence):
        return False
    if ev.kind == "triangular":
        seen: set = set()
        if sorted(ev.perm) != list(range(1, d.ring.n + 1)):
            return False
        for i in ev.perm:
            if not d.images[i - 1].variables() <= seen:
                return False
            seen.add(i)
        return True
    if ev.kind == "iteration":
        if len(ev.bounds) != d.ring.n:
            return False
        for x, m in zip(d.ring.gens(), ev.bounds):
            g = x
            for _ in range(m):
                g = apply(d, g)
            if not g.is_zero():
                return False
        return True
    return ev.kind == "inherited"


# ----------------------------------------------------------------------
# exponential and logarithm


def _exp_images(d: Derivation, cap: int) -> list[Poly]:
    images = []
    for x in d.ring.gens():
        term = x
        acc = x
        k = 0
        while True:
            k += 1
            term = apply(d, term)
            if term.is_zero():
                break
            if k > cap:
                raise InvalidEvidence("derivation is not nilpotent within the iteration cap")
            acc = acc + term.scale(Fraction(1, math.factorial(k)))
        images.append(acc)
    return images


def exp(d: Derivation, evidence: LndEvidence | None = None, cap: int = 10_000) -> Endo:
    """exp(D) with inverse witness exp(-D)."""
    if not d.ring.domain.contains_q:
        raise UnsupportedDomain("exp needs rational coefficients")
    if evidence is None:
        evidence = lnd_verify(d)
    if not check_evidence(d, evidence):
        raise InvalidEvidence("nilpotency evidence does not check out")
    images = _exp_images(d, cap)
    inverse = _exp_images(-d, cap)
    return Endo(d.ring, images, inverse, (ExpStep(d.images),))


def formal_log(phi: Endo, cap: int = DEFAULT_CAP) -> Derivation:
    """The nilpotent derivation D with exp(D) = phi, when phi - id is nilpotent."""
    ring = phi.ring
    if not ring.domain.contains_q:
        raise UnsupportedDomain("log needs rational coefficients")

    def delta(g: Poly) -> Poly:
        return phi(g) - g

    images = []
    for x in ring.gens():
        acc = ring.zero()
        g = x
        for k in range(1, cap + 2):
            g = delta(g)
            if g.is_zero():
                break
            if k > cap:
                raise NotUnipotent(f"phi - id is not nilpotent on {x} within {cap} steps")
            c = Fraction((-1) ** (k + 1), k)
            acc = acc + g.scale(c)
        images.append(acc)
    d = Derivation(ring, images)
    ev = lnd_verify(d, cap)
    if isinstance(ev, ExceededCap):
        raise NotUnipotent("the logarithm is not locally nilpotent within the cap")
    if exp(d, ev).images != phi.images:
        raise NotUnipotent("exp(log phi) does not reproduce phi")
    return d


# ----------------------------------------------------------------------
# Jacobian derivations and conjugation


def jacobian_derivation(g1: Poly, g2: Poly) -> Derivation:
    """g -> det(grad g1; grad g2; grad g), in three variables."""
    ring = g1.ring
    if ring.n != 3 or g2.ring != ring:
        raise ArityMismatch("Jacobian derivations need two polynomials in three variables")
    r1 = [g1.diff(j) for j in (1, 2, 3)]
    r2 = [g2.diff(j) for j in (1, 2, 3)]
    images = []
    for k in range(3):
        e = [ring.one() if j == k else ring.zero() for j in range(3)]
        images.append(determinant([r1, r2, e]))
    return Derivation(ring, images)


def conjugate(d: Derivation, phi: Endo) -> Derivation:
    """phi^{-1} o D o phi as a derivation."""
    if phi.inverse is None:
        raise MissingInverse("conjugation needs an inverse witness")
    inv = phi.inverse_endo()
    return Derivation(d.ring, [inv(apply(d, g)) for g in phi.images])


# ----------------------------------------------------------------------
# kernels in two variables


def triangular_kernel(d: Derivation) -> Poly:
    """Generator h of the kernel (over K) of a triangular derivation in two variables."""
    ring = d.ring
    if ring.n != 2:
        raise ArityMismatch("triangular_kernel works in two variables")
    a, b = d.images
    if not a.is_constant() or not b.variables() <= {1}:
        raise NotTriangular("need D(x1) in R and D(x2) in R[x1]")
    if a.is_zero():
        if b.is_zero():
            raise ZeroDerivation("zero derivation")
        return ring.var(1)
    if b.is_zero():
        return ring.var(2)
    dom = ring.domain
    x2 = ring.var(2)
    if dom.kind == "ZZ":
        # integrate over Q inside the same FLINT context, then clear denominators
        h = Poly(ring, (a * x2).p - b.p.integral(0))
        h = normalize_unit(h)
        if h.coeff((0, 1)).to_fraction() < 0:
            h = -h
        return h
    h = a * x2 - b.integrate(1)
    if dom.kind == "QQ":
        return h.div_scalar(a.constant_value())
    return _qqt_primitive(h)


def _qqt_primitive(h: Poly) -> Poly:
    """Divide out the Q[t]-content and make the x2 coefficient monic in t."""
    content = h.content()
    if not content.is_zero():
        h = h.div_scalar(content)
    lead = h.coeff((0, 1))
    if not lead.is_zero():
        scale = lead.leading_rational()
        h = h.scale(1 / scale)
    return h


def rentschler_kernel(d: Derivation) -> tuple[Poly, Poly]:
    """A generator g of ker D over K, and the factor c with D = c * D0, D0 irreducible."""
    ring = d.ring
    if ring.n != 2:
        raise ArityMismatch("rentschler_kernel works in two variables")
    if d.is_zero():
        raise ZeroDerivation("zero derivation")
    if not ring.domain.contains_q:
        raise UnsupportedDomain("needs a field of characteristic zero")
    p, q = d.images
    c = mgcd(p, q)
    p0, q0 = p.exact_div(c), q.exact_div(c)
    # the 1-form q0 dx1 - p0 dx2 must be closed
    if not (p0.diff(1) + q0.diff(2)).is_zero():
        raise NotExact("D0 has nonzero divergence, so D is not locally nilpotent")
    g = q0.integrate(1)
    rest = -p0 - g.diff(2)
    if rest.degree(1) > 0:
        raise NotExact("the kernel form is not exact")
    g = g + rest.integrate(2)
    if not apply(d, g).is_zero():
        raise NotExact("integrated form is not a kernel element")
    g = g - g.ring.const(g.coeff((0, 0)))
    return normalize_unit(g), c


# ----------------------------------------------------------------------
# irreducibility


def _univariate_gcd_certificate(polys: list, var: int, nvars: int, rng: random.Random, tries: int = 3):
    """True when specializations prove no common factor involves variable ``var``.

    Specializes the other variables at small integers where the leading
    coefficient in ``var`` of some input survives, so a common factor of
    positive degree in ``var`` would survive as a common univariate factor.
    """
    ctx = polys[0].context()
    gens = ctx.gens()
    for _ in range(tries):
        point = [rng.randint(-7, 7) for _ in range(nvars)]
        args = [gens[k] if k == var else ctx.constant(point[k]) for k in range(nvars)]
        images = []
        lead_ok = False
        for p in polys:
            specialized = p.compose(*args)
            images.append(specialized)
            deg = int(p.degrees()[var])
            if deg >= 0 and int(specialized.degrees()[var]) == deg:
                lead_ok = True
        if not lead_ok:
            continue
        g = None
        for s in images:
            if s.is_zero():
                continue
            g = s if g is None else g.gcd(s)
            if g.degrees()[var] <= 0:
                return True
        return g is None or g.degrees()[var] <= 0
    return False


def coprime(polys: Sequence[Poly], seed: int = 0) -> bool:
    """True iff the nonzero inputs have no common non-unit factor."""
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return False
    ring = polys[0].ring
    dom = ring.domain
    if dom.kind == "cyclo":
        raise UnsupportedDomain("no gcd in a cyclotomic quotient")
    if any(p.is_constant() and p.param_degree() == 0 for p in polys):
        if dom.kind != "ZZ":
            return True
    if dom.kind == "ZZ":
        g = 0
        for p in polys:
            for c in p.rational_terms().values():
                g = math.gcd(g, c.numerator)
        if g != 1:
            return False
    raw = [p.p for p in polys]
    nvars = ring.n + ring.nparams
    rng = random.Random(seed)
    used = set()
    for p in polys:
        used |= {k for k, dg in enumerate(p.p.degrees()) if dg > 0}
    if all(_univariate_gcd_certificate(raw, v, nvars, rng) for v in sorted(used)):
        return True
    g = polys[0]
    for p in polys[1:]:
        g = mgcd(g, p)
    return g.total_degree() == 0 and g.param_degree() == 0


def irreducible_check(d: Derivation) -> bool:
    """True iff the images of D have no common non-unit factor."""
    if d.is_zero():
        raise ZeroDerivation("zero derivation")
    return coprime(list(d.images))


# ----------------------------------------------------------------------
# valuations and plinth witnesses


def vp_valuation(f: Poly, p: Poly) -> int:
    if f.is_zero():
        raise ZeroInput("valuation of zero")
    if p.is_constant():
        raise ZeroInput("valuation needs a nonconstant p")
    m = 0
    g = f
    while True:
        q, r = g.divmod(p)
        if not r.is_zero():
            return m
        g = q
        m += 1


@dataclass
class PlinthWitness:
    s: Poly
    p: Poly
    valuation: int
    j_found: int
    i_lower: int
    search_complete: bool
    degree_bound: int
    h: Poly | None = None
    stabilized_at: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "s": str(self.s),
            "p": str(self.p),
            "v_p(D(s))": self.valuation,
            "j": self.j_found,
            "i_lower": self.i_lower,
            "search_complete": self.search_complete,
            "degree_bound": self.degree_bound,
            "h": None if self.h is None else str(self.h),
        }


@dataclass
class Rank3Evidence:
    irreducible: bool
    witnesses: list
    independent: bool

    def to_json(self) -> dict:
        return {
            "tag": "rank3",
            "irreducible": self.irreducible,
            "independent_factors": self.independent,
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def kernel_monomials(gens: Sequence[Poly], degree_bound: int) -> list[tuple[tuple, Poly]]:
    """Products of the generators with total degree at most degree_bound."""
    degs = [max(g.total_degree(), 1) for g in gens]
    out: list = []

    def rec(k, exps, value, deg):
        if k == len(gens):
            out.append((tuple(exps), value))
            return
        e = 0
        v = value
        while deg + e * degs[k] <= degree_bound:
            rec(k + 1, exps + [e], v, deg + e * degs[k])
            e += 1
            v = v * gens[k]

    rec(0, [], gens[0].ring.one(), 0)
    return out


def _in_span(target: Poly, basis: list[Poly]) -> list[Fraction] | None:
    """Coefficients c with target = sum c_i basis_i, or None."""
    keys = sorted({k for b in basis + [target] for k in b.rational_terms()})
    index = {k: i for i, k in enumerate(keys)}
    if not basis:
        return [] if target.is_zero() else None
    m = flint.fmpq_mat(len(keys), len(basis))
    for j, b in enumerate(basis):
        for k, c in b.rational_terms().items():
            m[index[k], j] = flint.fmpq(c.numerator, c.denominator)
    rhs = flint.fmpq_mat(len(keys), 1)
    for k, c in target.rational_terms().items():
        rhs[index[k], 0] = flint.fmpq(c.numerator, c.denominator)
    aug = flint.fmpq_mat(len(keys), len(basis) + 1)
    for i in range(len(keys)):
        for j in range(len(basis)):
            aug[i, j] = m[i, j]
        aug[i, len(basis)] = rhs[i, 0]
    if aug.rank() != m.rank():
        return None
    rref, rank = aug.rref()
    sol = [Fraction(0)] * len(basis)
    row = 0
    for col in range(len(basis)):
        if row < rank and rref[row, col] != 0:
            v = rref[row, len(basis)]
            sol[col] = Fraction(int(v.p), int(v.q))
            row += 1
    return sol


def _max_j(s: Poly, p: Poly, monos: list[Poly], v: int) -> tuple[int, Poly | None]:
    best_j, best_h = 0, s.ring.zero()
    for j in range(1, v + 1):
        pj = p ** j
        target = -s.divmod(pj)[1]
        basis = [m.divmod(pj)[1] for m in monos]
        sol = _in_span(target, basis)
        if sol is None:
            break
        best_j = j
        h = s.ring.zero()
        for c, m in zip(sol, monos):
            if c:
                h = h + m.scale(c)
        best_h = h
    return best_j, best_h


def plinth_witness(d: Derivation, s: Poly, p: Poly, kernel_gens: Sequence[Poly], degree_bound: int) -> PlinthWitness:
    """Bounded search for j = max v_p(s+h), h in the kernel; i_lower = v_p(D(s)) - j."""
    if d.ring.domain.kind != "QQ":
        raise UnsupportedDomain("plinth witnesses are computed over Q")
    ds = apply(d, s)
    if ds.is_zero():
        raise PreconditionFailed("D(s) must be nonzero")
    if not apply(d, ds).is_zero():
        raise PreconditionFailed("D^2(s) must vanish")
    if p.is_constant():
        raise PreconditionFailed("p must be nonconstant")
    if not apply(d, p).is_zero():
        raise PreconditionFailed("p must lie in the kernel")
    for g in kernel_gens:
        if not apply(d, g).is_zero():
            raise PreconditionFailed(f"{g} is not in the kernel")
    v = vp_valuation(ds, p)
    monos = [m for _, m in kernel_monomials(list(kernel_gens), degree_bound)]
    j, h = _max_j(s, p, monos, v)
    half = [m for _, m in kernel_monomials(list(kernel_gens), degree_bound // 2)]
    j_half, _ = _max_j(s, p, half, v)
    complete = j_half == j
    return PlinthWitness(s, p, v, j, v - j, complete, degree_bound, h, [degree_bound // 2, degree_bound])


def rank3_evidence(d: Derivation, witnesses: Sequence[PlinthWitness]) -> Rank3Evidence | None:
    """Evidence that rank D = 3 from two plinth witnesses with independent factors."""
    if len(witnesses) < 2:
        return None
    irreducible = irreducible_check(d)
    w1, w2 = witnesses[0], witnesses[1]
    from .poly import wedge2

    independent = any(not c.is_zero() for c in wedge2(w1.p, w2.p))
    ok = irreducible and independent and all(w.i_lower >= 1 and w.search_complete for w in (w1, w2))
    if not ok:
        return None
    return Rank3Evidence(irreducible, list(witnesses), independent)


def random_triangular(ring: Ring, rng: random.Random, max_deg: int = 3, height: int = 5) -> Derivation:
    """A random triangular derivation: D(x_k) in Q[x_1..x_{k-1}]."""
    images = []
    for k in range(1, ring.n + 1):
        terms = {}
        for _ in range(rng.randint(0, 3)):
            exps = [0] * ring.n
            for v in range(k - 1):
                exps[v] = rng.randint(0, max_deg)
            if sum(exps) <= max_deg:
                terms[tuple(exps)] = Fraction(rng.randint(-height, height), rng.randint(1, 3))
        images.append(ring.from_terms({e: c for e, c in terms.items() if c}))
    return Derivation(ring, images)


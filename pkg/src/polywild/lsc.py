"""Local slice construction families in three variables.

Given t0, t1 >= 1 and coefficient vectors alpha0 (length t0-1) and alpha1
(length t1-1), the recurrence f0 = x2, f1 = x1, f_{i+1} = eta_i(f_i, r) / f_{i-1}
produces polynomials f_i and locally nilpotent derivations
D_i = Delta(f_{i+1}, f_i) for every index i in the admissible set I.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coeff import QQ
from .deriv import Derivation, LndEvidence, apply, coprime, exp, jacobian_derivation, lnd_verify
from .endo import Endo
from .errors import (
    ArityMismatch,
    CommonFactor,
    DegenerateInput,
    DepthBeyondI,
    DivisionFailure,
    HypothesisNotMet,
    NotDivisible,
    PreconditionFailed,
)
from .parse import parse_poly
from .poly import Poly, Ring, mgcd
from .weights import Weight, initial_form, wdeg

R3 = Ring(3, QQ)
R2 = Ring(2, QQ)

# x1 < x2 < x3 in lex order on Z^3; degrees are reported as (x1, x2, x3) counts
DELTA_WEIGHT = Weight(((0, 0, 1), (0, 1, 0), (1, 0, 0)))


def _t(i: int, t0: int, t1: int) -> int:
    return t0 if i % 2 == 0 else t1


def _xi(i: int) -> int:
    return 1 if i % 4 in (0, 1) else -1


@dataclass(frozen=True)
class ISet:
    """{1, ..., max} or all positive integers when max is None."""

    max: int | None

    def __contains__(self, i: int) -> bool:
        return i >= 1 and (self.max is None or i <= self.max)

    def to_json(self):
        return "N" if self.max is None else list(range(1, self.max + 1))


def _i_table(t0: int, t1: int) -> ISet:
    if t0 == 1:
        return ISet(1)
    if (t0, t1) == (2, 1):
        return ISet(2)
    if (t0, t1) == (3, 1):
        return ISet(4)
    return ISet(None)


@dataclass
class Sequences:
    a: list[int]
    b: list[int]
    xi: list[int]
    I: ISet


def seq_ab(t0: int, t1: int, N: int) -> Sequences:
    """b, xi and a = t b + xi for indices 0..N, with the admissible index set."""
    if t0 < 1 or t1 < 1 or N < 1:
        raise PreconditionFailed("need t0, t1, N >= 1")
    length = max(N, 8) + 1
    b = [0, 0]
    for i in range(1, length):
        b.append(_t(i, t0, t1) * b[i] - b[i - 1] + _xi(i))
    xi = [_xi(i) for i in range(length + 1)]
    a = [_t(i, t0, t1) * b[i] + xi[i] for i in range(length + 1)]
    first_bad = next((j for j in range(1, length + 1) if a[j] <= 0), None)
    table = _i_table(t0, t1)
    found = ISet(first_bad - 1) if first_bad is not None else ISet(None)
    if found != table:
        raise DivisionFailure(f"index set {found} disagrees with the case table {table}")
    return Sequences(a[: N + 1], b[: N + 1], xi[: N + 1], table)


@dataclass(frozen=True)
class LscParams:
    t0: int
    t1: int
    alpha0: tuple = ()
    alpha1: tuple = ()
    depth: int = 4

    def __post_init__(self):
        if self.t0 < 1 or self.t1 < 1:
            raise PreconditionFailed("t0, t1 must be positive")
        if len(self.alpha0) != self.t0 - 1 or len(self.alpha1) != self.t1 - 1:
            raise ArityMismatch("alpha vectors must have lengths t0-1 and t1-1")

    @classmethod
    def zero(cls, t0: int, t1: int, depth: int = 4) -> "LscParams":
        return cls(t0, t1, (Fraction(0),) * (t0 - 1), (Fraction(0),) * (t1 - 1), depth)

    def full_alpha(self, parity: int) -> list[Fraction]:
        """alpha_1..alpha_t for the given parity, with alpha_t = 1."""
        vec = self.alpha0 if parity == 0 else self.alpha1
        return [Fraction(c) for c in vec] + [Fraction(1)]

    def is_homogeneous(self) -> bool:
        return all(Fraction(c) == 0 for c in (*self.alpha0, *self.alpha1))

    def to_json(self) -> dict:
        return {
            "t0": self.t0,
            "t1": self.t1,
            "alpha0": [str(Fraction(c)) for c in self.alpha0],
            "alpha1": [str(Fraction(c)) for c in self.alpha1],
            "depth": self.depth,
        }


def eta(i: int, params: LscParams, seqs: Sequences | None = None) -> Poly:
    """eta_i(y, z) as a polynomial in x1 = y, x2 = z."""
    if i < 0:
        raise PreconditionFailed("eta needs i >= 0")
    seqs = seqs or seq_ab(params.t0, params.t1, max(i, 1))
    t = _t(i, params.t0, params.t1)
    bi = seqs.b[i]
    alpha = params.full_alpha(i % 2)
    y, z = R2.gens()
    if i % 4 in (0, 1):
        out = z ** (t * bi + 1) + y ** t
        for j in range(1, t):
            if alpha[j - 1]:
                out = out + (y ** j * z ** ((t - j) * bi)).scale(alpha[j - 1])
    else:
        out = y ** t + z ** (t * bi - 1)
        for j in range(1, t):
            if alpha[j - 1]:
                out = out + (z ** (j * bi - 1) * y ** (t - j)).scale(alpha[j - 1])
    return out


def theta_of(params: LscParams) -> Poly:
    """theta(z) = sum alpha_i^0 z^(i-1), as a polynomial in x1."""
    z = R2.var(1)
    out = R2.zero()
    for i, c in enumerate(params.full_alpha(0), start=1):
        if c:
            out = out + (z ** (i - 1)).scale(c)
    return out


def r_poly(params: LscParams) -> Poly:
    x1, x2, x3 = R3.gens()
    out = x1 * x2 * x3
    for i, c in enumerate(params.full_alpha(0), start=1):
        if c:
            out = out - (x2 ** i).scale(c)
    for j, c in enumerate(params.full_alpha(1), start=1):
        if c:
            out = out - (x1 ** j).scale(c)
    return out


def _eval2(p: Poly, y: Poly, z: Poly) -> Poly:
    # term-wise with cached powers; much faster than a generic compose here
    ring = y.ring
    cache: dict = {}

    def power(g: Poly, k: int) -> Poly:
        key = (id(g), k)
        if key not in cache:
            cache[key] = g ** k
        return cache[key]

    out = ring.zero()
    for (a, b), c in p.rational_terms().items():
        out = out + (power(y, a) * power(z, b)).scale(c)
    return out


@dataclass
class LscFamily:
    params: LscParams
    seqs: Sequences
    r: Poly
    f: list[Poly]
    q: list[Poly]
    D: list[Derivation]
    transcript: list[dict] = field(default_factory=list)
    irreducible: dict = field(default_factory=dict)
    lnd: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, **extra):
        self.transcript.append({"name": name, "status": "verified" if ok else "failed", **extra})
        if not ok:
            raise DivisionFailure(f"identity {name} failed")

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "a": self.seqs.a,
            "b": self.seqs.b,
            "I": self.seqs.I.to_json(),
            "r": str(self.r),
            "f": [str(g) for g in self.f],
            "D": [d.to_json() for d in self.D],
            "irreducible": {str(k): v for k, v in self.irreducible.items()},
            "lnd": {str(k): v for k, v in self.lnd.items()},
            "identities": self.transcript,
        }


KERNEL_CHECK_DEGREE = 40
SPOT_CHECK_DEGREE = 10


def build_family(params: LscParams, verify: bool = True) -> LscFamily:
    """f_0..f_N and D_1..D_{N-1} for N = depth, with every identity checked exactly."""
    N = params.depth
    if N < 2:
        raise PreconditionFailed("depth must be at least 2")
    seqs = seq_ab(params.t0, params.t1, N)
    if seqs.I.max is not None and N > seqs.I.max + 1:
        raise DepthBeyondI(f"depth {N} exceeds max I + 1 = {seqs.I.max + 1}")
    r = r_poly(params)
    x1, x2, _ = R3.gens()
    f = [x2, x1]
    q = [R3.zero()]
    for i in range(1, N):
        qi = _eval2(eta(i, params, seqs), f[i], r)
        try:
            nxt = qi.exact_div(f[i - 1])
        except NotDivisible as exc:
            raise DivisionFailure(f"eta_{i}(f_{i}, r) is not divisible by f_{i - 1}") from exc
        q.append(qi)
        f.append(nxt)
    fam = LscFamily(params, seqs, r, f, q, [jacobian_derivation(f[1], f[0])])
    for i in range(1, N):
        fam.D.append(jacobian_derivation(f[i + 1], f[i]))
    if verify:
        verify_family(fam)
    return fam


def verify_family(fam: LscFamily):
    f, r = fam.f, fam.r
    top = fam.seqs.I.max
    for i in range(1, fam.params.depth):
        d = fam.D[i]
        fam.record(f"q_{i}=f_{i - 1}*f_{i + 1}", fam.q[i] == f[i - 1] * f[i + 1])
        fam.record(f"D_{i}(r)=f_{i}*f_{i + 1}", apply(d, r) == f[i] * f[i + 1])
        if f[i + 1].total_degree() <= KERNEL_CHECK_DEGREE:
            fam.record(f"D_{i}(f_{i})=0", apply(d, f[i]).is_zero())
            fam.record(f"D_{i}(f_{i + 1})=0", apply(d, f[i + 1]).is_zero())
        else:
            # a Jacobian determinant with a repeated gradient row vanishes identically
            fam.record(f"D_{i}(f_{i})=0", True, evidence="structural")
            fam.record(f"D_{i}(f_{i + 1})=0", True, evidence="structural")
        irr = coprime(list(d.images))
        fam.irreducible[i] = irr
        expected = top is None or i != top
        fam.record(f"D_{i} irreducible iff i != max I", irr == expected, irreducible=irr)
        fam.lnd[i] = _lnd_evidence(d).to_json()


def _lnd_evidence(d: Derivation) -> LndEvidence:
    if max(g.total_degree() for g in d.images) <= SPOT_CHECK_DEGREE:
        ev = lnd_verify(d, cap=64)
        if isinstance(ev, LndEvidence):
            return ev
    return LndEvidence("inherited", reason="local slice construction theorem")


# ----------------------------------------------------------------------
# checks on built families


def bt_weight(params: LscParams) -> Weight:
    t0, t1 = params.t0, params.t1
    return Weight(((t0,), (t1,), (t0 * t1 - t0 - t1,)))


def homogeneity_check(fam: LscFamily) -> bool:
    """Every f_i is bt-homogeneous with t_i deg f_i = t0 t1 a_i."""
    p = fam.params
    if not p.is_homogeneous():
        raise PreconditionFailed("homogeneity needs all alpha entries zero")
    w = bt_weight(p)
    if initial_form(fam.r, w) != fam.r:
        return False
    for i, g in enumerate(fam.f):
        if initial_form(g, w) != g:
            return False
        if i < len(fam.seqs.a) and _t(i, p.t0, p.t1) * wdeg(g, w)[0] != p.t0 * p.t1 * fam.seqs.a[i]:
            return False
    return True


def delta(g: Poly) -> tuple:
    return tuple(reversed(wdeg(g, DELTA_WEIGHT)))


def delta_recurrence_check(fam: LscFamily) -> bool:
    p = fam.params
    if p.t0 < 3:
        raise HypothesisNotMet("the degree recurrence needs t0 >= 3")
    deltas = [delta(g) for g in fam.f]
    if deltas[0] != (0, 1, 0) or deltas[1] != (1, 0, 0) or deltas[2] != (1, 0, 1):
        return False
    if delta(fam.r) != (1, 1, 1):
        return False
    for i in range(2, len(fam.f) - 1):
        if i not in fam.seqs.I:
            break
        t = _t(i, p.t0, p.t1)
        want = tuple(t * a - b for a, b in zip(deltas[i], deltas[i - 1]))
        if deltas[i + 1] != want:
            return False
    return True


def fibonacci_identity_check(fam: LscFamily, i_max: int) -> bool:
    """f_{i-1} f_{i+1} = f_i^3 + r^{a_i} for the (3,3) family with zero alpha."""
    p = fam.params
    if (p.t0, p.t1) != (3, 3) or not p.is_homogeneous():
        raise PreconditionFailed("Fibonacci identities need t0 = t1 = 3 and zero alpha")
    if i_max + 1 >= len(fam.f):
        raise DepthBeyondI("family not built deep enough")
    a = fam.seqs.a
    for i in range(1, i_max + 1):
        if fam.f[i - 1] * fam.f[i + 1] != fam.f[i] ** 3 + fam.r ** a[i]:
            return False
    for i in range(1, min(i_max, len(a) - 1)):
        if a[i + 1] != 3 * a[i] - a[i - 1]:
            return False
    return True


# ----------------------------------------------------------------------
# tilde variants


def _parse_yz(text: str) -> Poly:
    return parse_poly(text.replace("y", "x1").replace("z", "x2"), Ring(2, QQ))


def _as_yz(p) -> Poly:
    if isinstance(p, str):
        return _parse_yz(p)
    if p.ring.n == 1:
        return p.substitute([R2.var(1)], R2)
    if p.ring != R2:
        raise ArityMismatch("expected a polynomial in y, z")
    return p


@dataclass
class TildeResult:
    i: int
    r_i: Poly
    f_next: Poly
    D: Derivation
    transcript: list

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "r_i": str(self.r_i),
            "tilde_f": str(self.f_next),
            "tilde_D": self.D.to_json(),
            "identities": self.transcript,
        }


def build_tilde(params: LscParams, lam, mu, i: int) -> TildeResult:
    """tilde f_{i+1} and tilde D_i for lambda(y) and mu(y, z) in z k[y, z]."""
    lam, mu = _as_yz(lam), _as_yz(mu)
    t0, t1 = params.t0, params.t1
    if not (t0 >= 3 and (i == 2 or (i >= 3 and (t0, t1) != (3, 1)))):
        raise HypothesisNotMet("need t0 >= 3 with i = 2, or (t0, t1) != (3, 1) and i >= 3")
    if lam.degree(2) > 0 or lam.is_zero():
        raise PreconditionFailed("lambda must be a nonzero polynomial in y")
    if mu.is_zero():
        raise DegenerateInput("mu = 0 gives back a multiple of the untwisted derivation")
    if any(m[1] == 0 for m in mu.monomials()):
        raise PreconditionFailed("mu must lie in z k[y, z]")
    g = mgcd(lam, mu)
    if not g.is_constant():
        raise CommonFactor(f"lambda and mu share the factor {g}")
    fam = build_family(LscParams(t0, t1, params.alpha0, params.alpha1, i), verify=False)
    f, r = fam.f, fam.r
    ai = fam.seqs.a[i]
    lam_f = lam.substitute([f[i], R3.zero()], R3)
    base = R3.var(2) if i == 2 else r
    r_i = lam_f * base - mu.substitute([f[i], f[i - 1]], R3)
    # tilde eta homogenized in z against lambda: H(y, z, w) = w^{a_i} eta(y, z / w)
    if i == 2:
        teta = R2.var(1) + theta_of(params).substitute([R2.var(2), R2.zero()], R2)
    else:
        teta = eta(i, params, fam.seqs)
    if teta.degree(2) != ai:
        raise DivisionFailure("z-degree of tilde eta differs from a_i")
    numer = R3.zero()
    for (ey, ez), c in teta.terms().items():
        numer = numer + (f[i] ** ey * r_i ** ez * lam_f ** (ai - ez)).scale(c.to_fraction())
    try:
        f_next = numer.exact_div(f[i - 1])
    except NotDivisible as exc:
        raise DivisionFailure("tilde construction left the polynomial ring") from exc
    D = jacobian_derivation(f_next, f[i])
    transcript = []
    want = lam_f * f_next if i == 2 else lam_f * f[i] * f_next
    ok = apply(D, r_i) == want
    transcript.append({"name": f"tilde D_{i}(r_{i})", "status": "verified" if ok else "failed"})
    if not ok:
        raise DivisionFailure("tilde D(r_i) identity failed")
    irr = coprime(list(D.images))
    transcript.append({"name": f"tilde D_{i} irreducible", "status": "verified" if irr else "failed"})
    if not irr:
        raise DivisionFailure("tilde D is not irreducible")
    for g in (f[i], f_next):
        if not apply(D, g).is_zero():
            raise DivisionFailure("kernel generators not killed")
    transcript.append({"name": "kernel contains f_i and tilde f", "status": "verified"})
    return TildeResult(i, r_i, f_next, D, transcript)


# ----------------------------------------------------------------------
# the exceptional shape (3, 1)


@dataclass
class Sigma3:
    sigma: Endo
    checks: dict

    def to_json(self) -> dict:
        return {"sigma3": self.sigma.to_json(), "checks": self.checks}


def sigma3_build(fam: LscFamily) -> Sigma3:
    p = fam.params
    if (p.t0, p.t1) != (3, 1):
        raise PreconditionFailed("sigma3 exists for (t0, t1) = (3, 1)")
    if len(fam.f) < 6:
        raise DepthBeyondI("sigma3 checks need f_5")
    x1, x2, x3 = R3.gens()
    theta = theta_of(p)
    dtheta = theta.diff(1)
    # D_{-theta}: x1 -> theta'(x2), x2 -> x3, x3 -> 0
    d = Derivation(R3, [dtheta.substitute([x2, R3.zero()], R3), x3, R3.zero()])
    f2 = fam.f[2]
    if not apply(d, f2).is_zero():
        raise DivisionFailure("f_2 is not in the kernel of D_{-theta}")
    tilde_sigma = exp(d.scale(-f2))
    y1, y2, y3 = tilde_sigma.images
    a2 = Fraction(p.alpha0[1]) if len(p.alpha0) > 1 else Fraction(0)
    images = [y1, -y2 - R3.const(a2), y3]
    # sigma3 = s o tilde_sigma with s: x2 -> -x2 - a2, so its inverse is tilde_sigma^{-1} o s^{-1}
    s_inv = [x1, -x2 - R3.const(a2), x3]
    inv = [g.substitute(s_inv, R3) for g in tilde_sigma.inverse]
    sigma = Endo(R3, images, inv)
    f = fam.f
    checks = {
        "sigma3(x1)=f3": images[0] == f[3],
        "sigma3(x2)=f4": images[1] == f[4],
        "sigma3(x3)=x3": images[2] == x3,
        "sigma3(f2)=f2": sigma(f2) == f2,
        "f5=x3*f4-1": f[5] == x3 * f[4] - 1,
        "D4=f4*Delta(x3,f4)": fam.D[4] == jacobian_derivation(x3, f[4]).scale(f[4]) if len(fam.D) > 4 else None,
        "inverse": [g.substitute(list(inv), R3) for g in images] == R3.gens(),
    }
    return Sigma3(sigma, checks)


def sigma3_check(fam: LscFamily) -> bool:
    return all(v is not False for v in sigma3_build(fam).checks.values())


__all__ = [
    "ISet", "Sequences", "LscParams", "LscFamily", "TildeResult", "Sigma3",
    "seq_ab", "eta", "r_poly", "theta_of", "build_family", "verify_family",
    "homogeneity_check", "delta", "delta_recurrence_check", "fibonacci_identity_check",
    "build_tilde", "sigma3_build", "sigma3_check", "bt_weight", "DELTA_WEIGHT",
]

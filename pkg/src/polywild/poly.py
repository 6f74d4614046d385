"""Sparse exact multivariate polynomials in x1..xn over a coefficient domain.

Arithmetic is delegated to FLINT's ``fmpq_mpoly``.  Coefficients from Q[t] or a
cyclotomic quotient are carried as extra hidden generators (t, zeta), which is
sound because R[t][x] = R[x, t] and divisibility agrees.  In the cyclotomic
case, exponents of zeta are reduced modulo e after every product.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .coeff import CYCLO_KIND, QQ, QQT_KIND, ZZ_KIND, Domain, Elem, _fmpq_to_fraction, _join_terms
from .errors import (
    ArityMismatch,
    DivisionByZero,
    NonUnit,
    NotDivisible,
    RingMismatch,
    UnsupportedDomain,
)

MAX_ARITY = 8


@functools.lru_cache(maxsize=None)
def _context(n: int, params: tuple[str, ...]):
    names = tuple(f"x{i}" for i in range(1, n + 1)) + params
    if not names:
        names = ("_",)
    return flint.fmpq_mpoly_ctx.get(names, "deglex")


def _to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


@dataclass(frozen=True)
class Ring:
    n: int
    domain: Domain = QQ

    def __post_init__(self):
        if not 0 <= self.n <= MAX_ARITY:
            raise ArityMismatch(f"arity must be between 0 and {MAX_ARITY}")

    @property
    def ctx(self):
        return _context(self.n, self.domain.param_names)

    @property
    def nparams(self) -> int:
        return len(self.domain.param_names)

    @property
    def var_names(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(1, self.n + 1))

    def __str__(self):
        return f"{self.domain.name}[{','.join(self.var_names)}]"

    # constructors -------------------------------------------------------
    def _wrap(self, p) -> "Poly":
        return Poly(self, p)

    def zero(self) -> "Poly":
        return self._wrap(self.ctx.from_dict({}))

    def one(self) -> "Poly":
        return self.const(1)

    def var(self, i: int) -> "Poly":
        """The variable x_i (1-based)."""
        if not 1 <= i <= self.n:
            raise ArityMismatch(f"x{i} is not a variable of {self}")
        return self._wrap(self.ctx.gens()[i - 1])

    def gens(self) -> list["Poly"]:
        return [self.var(i) for i in range(1, self.n + 1)]

    def param(self, k: int = 0) -> "Poly":
        """The hidden generator t (Q[t]) or the k-th root of unity."""
        return self.const(self.domain.gen(k))

    def const(self, c) -> "Poly":
        if isinstance(c, Poly):
            if not c.is_constant():
                raise RingMismatch("expected a constant")
            return self.const(c.constant_value())
        e = c if isinstance(c, Elem) else self.domain(c)
        if e.domain != self.domain:
            if e.is_rational():
                e = self.domain(e.to_fraction())
            else:
                raise RingMismatch(f"{e} is not in {self.domain}")
        return self._wrap(self._elem_poly(e))

    def _elem_poly(self, e: Elem):
        ctx = self.ctx
        k = self.domain.kind
        if k in ("QQ", ZZ_KIND):
            return ctx.constant(_to_fmpq(e.payload))
        pad = (0,) * self.n
        if k == QQT_KIND:
            return ctx.from_dict({pad + (i,): c for i, c in enumerate(e.payload.coeffs()) if c != 0})
        return ctx.from_dict({pad + exps: _to_fmpq(c) for exps, c in e.payload})

    def monomial(self, exps: Sequence[int], c=1) -> "Poly":
        if len(exps) != self.n:
            raise ArityMismatch("exponent vector has the wrong length")
        mono = self._wrap(self.ctx.from_dict({tuple(exps) + (0,) * self.nparams: 1}))
        return mono * self.const(c)

    def from_terms(self, terms: dict) -> "Poly":
        """Build from a map exponent-tuple -> coefficient (int, Fraction or Elem)."""
        acc = self.zero()
        if self.domain.kind in ("QQ", ZZ_KIND) and not any(isinstance(c, Elem) for c in terms.values()):
            if self.domain.kind == ZZ_KIND:
                for c in terms.values():
                    if Fraction(c).denominator != 1:
                        raise NotDivisible(f"{c} is not an integer")
            return self._wrap(self.ctx.from_dict({tuple(k): _to_fmpq(c) for k, c in terms.items() if c != 0}))
        for exps, c in terms.items():
            acc = acc + self.monomial(exps, c)
        return acc

    def from_flint(self, p) -> "Poly":
        return self._wrap(p)._reduce()


class Poly:
    """Immutable polynomial; equality is structural in canonical form."""

    __slots__ = ("ring", "p")

    def __init__(self, ring: Ring, p):
        self.ring = ring
        self.p = p

    # canonical reduction for cyclotomic quotients
    def _reduce(self) -> "Poly":
        dom = self.ring.domain
        if dom.kind != CYCLO_KIND:
            return self
        n, e = self.ring.n, dom.e
        d = self.p.to_dict()
        if all(all(x < e for x in k[n:]) for k in d):
            return self
        acc: dict = {}
        for k, c in d.items():
            key = k[:n] + tuple(x % e for x in k[n:])
            acc[key] = acc.get(key, 0) + c
        return Poly(self.ring, self.ring.ctx.from_dict({k: c for k, c in acc.items() if c != 0}))

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                if other.ring.domain == self.ring.domain or other.ring.domain.kind in ("QQ", ZZ_KIND):
                    if other.is_constant():
                        return self.ring.const(other.constant_value())
                raise RingMismatch(f"{other.ring} vs {self.ring}")
            return other
        return self.ring.const(other)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        return Poly(self.ring, self.p + o.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return Poly(self.ring, self.p - o.p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Poly(self.ring, -self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return Poly(self.ring, self.p * o.p)._reduce()

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        # square-and-multiply: flint's own pow is far slower on large rational inputs,
        # and the cyclotomic case needs a reduction after every product anyway
        if self.nterms() <= 1:
            return Poly(self.ring, self.p ** k)._reduce()
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return self.ring.one() if result is None else result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Elem)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.p == other.p

    def __hash__(self):
        return hash((self.ring, str(self.p)))

    def __bool__(self):
        return not self.is_zero()

    # structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return self.p.is_zero()

    def exps(self) -> list[tuple]:
        """Exponent vectors (x variables, then hidden parameters) as Python ints."""
        return [tuple(int(e) for e in k) for k in self.p.monoms()]

    def is_constant(self) -> bool:
        """True when no x variable occurs (hidden parameters may occur)."""
        n = self.ring.n
        return all(not any(k[:n]) for k in self.exps())

    def constant_value(self) -> Elem:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.coeff((0,) * self.ring.n)

    def nterms(self) -> int:
        return len(self.p)

    def terms(self) -> dict[tuple, Elem]:
        """Map x-exponent tuple -> nonzero coefficient in R."""
        n = self.ring.n
        dom = self.ring.domain
        if dom.kind in ("QQ", ZZ_KIND):
            out = {}
            for k, c in zip(self.exps(), self.p.coeffs()):
                out[k[:n]] = dom(_fmpq_to_fraction(c))
            return out
        groups: dict[tuple, dict] = {}
        for k, c in zip(self.exps(), self.p.coeffs()):
            groups.setdefault(k[:n], {})[k[n:]] = c
        out = {}
        for xk, hid in groups.items():
            if dom.kind == QQT_KIND:
                deg = max(h[0] for h in hid)
                coeffs = [flint.fmpq(0)] * (deg + 1)
                for h, c in hid.items():
                    coeffs[h[0]] = c
                out[xk] = Elem(dom, flint.fmpq_poly(coeffs))
            else:
                out[xk] = Elem(dom, tuple(sorted((h, _fmpq_to_fraction(c)) for h, c in hid.items())))
        return out

    def rational_terms(self) -> dict[tuple, Fraction]:
        """Map full exponent tuple (x then hidden) -> rational coefficient."""
        return {k: _fmpq_to_fraction(c) for k, c in zip(self.exps(), self.p.coeffs())}

    def coeff(self, exps: Sequence[int]) -> Elem:
        return self.terms().get(tuple(exps), self.ring.domain.zero())

    def monomials(self) -> list[tuple]:
        n = self.ring.n
        return sorted({k[:n] for k in self.exps()}, key=grlex_key, reverse=True)

    def degree(self, i: int) -> int:
        """Degree in x_i; -1 for the zero polynomial."""
        if self.is_zero():
            return -1
        return int(self.p.degrees()[i - 1])

    def total_degree(self) -> int:
        if self.is_zero():
            return -1
        n = self.ring.n
        return max(sum(k[:n]) for k in self.exps())

    def param_degree(self) -> int:
        if self.is_zero() or not self.ring.nparams:
            return 0 if not self.is_zero() else -1
        n = self.ring.n
        return max(sum(k[n:]) for k in self.exps())

    def variables(self) -> set[int]:
        n = self.ring.n
        return {i + 1 for k in self.exps() for i in range(n) if k[i]}

    def leading_monomial(self) -> tuple:
        """Largest x-monomial under graded-lex (x1 > x2 > ...)."""
        if self.is_zero():
            raise ValueError("zero polynomial has no leading monomial")
        return self.monomials()[0]

    def leading_coeff(self) -> Elem:
        return self.coeff(self.leading_monomial())

    def content(self) -> Elem:
        """gcd of the coefficients in R (Q: the leading coefficient)."""
        from .coeff import ext_gcd

        dom = self.ring.domain
        if self.is_zero():
            return dom.zero()
        if dom.kind == "QQ":
            return self.leading_coeff()
        if dom.kind == CYCLO_KIND:
            raise UnsupportedDomain("content is undefined in a cyclotomic quotient")
        g = dom.zero()
        for c in self.terms().values():
            g = ext_gcd(g, c)[0]
        lc = self.leading_coeff()
        if (lc.exact_div(g)).canonical_unit() != dom.one():
            g = -g if dom.kind == ZZ_KIND else g * lc.canonical_unit()
        return g

    def scale(self, c) -> "Poly":
        return self * self.ring.const(c)

    def div_scalar(self, c) -> "Poly":
        """Divide every coefficient by c in R."""
        e = c if isinstance(c, Elem) else self.ring.domain(c)
        return self.exact_div(self.ring.const(e))

    # division -----------------------------------------------------------
    def exact_div(self, other) -> "Poly":
        g = self._coerce(other)
        if g.is_zero():
            raise DivisionByZero("division by the zero polynomial")
        dom = self.ring.domain
        if dom.kind == CYCLO_KIND:
            return self._cyclo_div(g)
        q, r = divmod(self.p, g.p)
        if not r.is_zero():
            raise NotDivisible(f"({g}) does not divide ({self})")
        if dom.kind == ZZ_KIND:
            if any(c.q != 1 for c in q.coeffs()):
                raise NotDivisible(f"quotient by ({g}) leaves Z[x]")
        return Poly(self.ring, q)

    def _cyclo_div(self, g: "Poly") -> "Poly":
        if g.nterms() == 0:
            raise DivisionByZero("division by zero")
        terms = g.terms()
        if len(terms) != 1:
            raise NonUnit("cyclotomic quotients only divide by unit multiples of monomials")
        (mono, c), = terms.items()
        cinv = c.unit_inverse()
        n = self.ring.n
        out = {}
        for k, v in self.p.to_dict().items():
            if any(k[i] < mono[i] for i in range(n)):
                raise NotDivisible(f"({g}) does not divide ({self})")
            out[tuple(k[i] - mono[i] for i in range(n)) + k[n:]] = v
        shifted = Poly(self.ring, self.ring.ctx.from_dict(out))
        return shifted * self.ring.const(cinv)

    def divmod(self, other) -> tuple["Poly", "Poly"]:
        """Multivariate division with remainder (the remainder is a normal form)."""
        g = self._coerce(other)
        if g.is_zero():
            raise DivisionByZero("division by zero")
        if self.ring.domain.kind == CYCLO_KIND:
            raise UnsupportedDomain("no division with remainder in a cyclotomic quotient")
        q, r = divmod(self.p, g.p)
        return Poly(self.ring, q), Poly(self.ring, r)

    def divides(self, other: "Poly") -> bool:
        try:
            other.exact_div(self)
            return True
        except NotDivisible:
            return False

    # calculus and substitution -----------------------------------------
    def diff(self, i: int) -> "Poly":
        if not 1 <= i <= self.ring.n:
            raise ArityMismatch(f"x{i} is not a variable of {self.ring}")
        return Poly(self.ring, self.p.derivative(i - 1))

    def integrate(self, i: int) -> "Poly":
        """Antiderivative in x_i with zero constant of integration (needs Q in R)."""
        if not 1 <= i <= self.ring.n:
            raise ArityMismatch(f"x{i} is not a variable of {self.ring}")
        if not self.ring.domain.contains_q:
            raise UnsupportedDomain("integration needs rational coefficients")
        return Poly(self.ring, self.p.integral(i - 1))

    def substitute(self, images: Sequence["Poly"], target: Ring | None = None) -> "Poly":
        """Replace x_i by images[i]; images live in ``target`` (default: own ring)."""
        if len(images) != self.ring.n:
            raise ArityMismatch(f"need {self.ring.n} images, got {len(images)}")
        if target is None:
            target = images[0].ring if images else self.ring
        for im in images:
            if im.ring != target:
                raise RingMismatch("images live in different rings")
        src_dom, dst_dom = self.ring.domain, target.domain
        if src_dom != dst_dom and src_dom.kind not in ("QQ", ZZ_KIND):
            raise RingMismatch(f"cannot substitute from {src_dom} into {dst_dom}")
        if self.ring.n == 0:
            return target.const(self.constant_value())
        args = [im.p for im in images]
        if src_dom == dst_dom:
            pgens = target.ctx.gens()[target.n:]
            args += list(pgens)
        return Poly(target, self.p.compose(*args, ctx=target.ctx))._reduce()

    def __call__(self, *images: "Poly") -> "Poly":
        return self.substitute(list(images))

    def evaluate_params(self, values: Sequence) -> "Poly":
        """Specialize the hidden parameters to rationals, landing in Q[x]."""
        target = Ring(self.ring.n, QQ)
        n = self.ring.n
        out: dict = {}
        for k, c in self.rational_terms().items():
            v = c
            for e, val in zip(k[n:], values):
                v *= Fraction(val) ** e
            out[k[:n]] = out.get(k[:n], 0) + v
        return target.from_terms({k: v for k, v in out.items() if v != 0})

    def change_ring(self, ring: Ring) -> "Poly":
        """Reinterpret in a ring with the same domain and at least as many variables."""
        if ring.domain != self.ring.domain and self.ring.domain.kind not in ("QQ", ZZ_KIND):
            raise RingMismatch("domain change not supported")
        if ring.n < self.ring.n and any(self.degree(i) > 0 for i in range(ring.n + 1, self.ring.n + 1)):
            raise ArityMismatch("polynomial uses variables missing from the target ring")
        images = [ring.var(i) if i <= ring.n else ring.zero() for i in range(1, self.ring.n + 1)]
        return self.substitute(images, ring)

    # printing -----------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({self})"


def grlex_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


def format_poly(f: Poly) -> str:
    ring = f.ring
    n = ring.n
    names = ring.var_names + ring.domain.param_names
    items = sorted(
        f.rational_terms().items(),
        key=lambda kc: (grlex_key(kc[0][:n]), grlex_key(kc[0][n:])),
        reverse=True,
    )
    pieces = []
    for k, c in items:
        mono = "*".join((nm if e == 1 else f"{nm}^{e}") for nm, e in zip(names[n:] + names[:n], k[n:] + k[:n]) if e)
        pieces.append((c, mono))
    return _join_terms(pieces)


# ----------------------------------------------------------------------
# module-level operations


def arith(f: Poly, g: Poly, op: str) -> Poly:
    if f.ring != g.ring:
        raise RingMismatch(f"{f.ring} vs {g.ring}")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown operation {op!r}")


def exact_div(f: Poly, g: Poly) -> Poly:
    return f.exact_div(g)


def substitute(f: Poly, images: Sequence[Poly]) -> Poly:
    return f.substitute(list(images))


def diff(f: Poly, i: int) -> Poly:
    return f.diff(i)


def determinant(m: list[list[Poly]]) -> Poly:
    size = len(m)
    if size == 0:
        raise ValueError("empty matrix")
    if size == 1:
        return m[0][0]
    if size == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = m[0][0].ring.zero()
    for j in range(size):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * determinant(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian(images: Sequence[Poly]) -> tuple[list[list[Poly]], Poly]:
    """Jacobian matrix (d images[i] / d x_j) and its determinant."""
    if not images:
        raise ArityMismatch("no images")
    ring = images[0].ring
    if len(images) != ring.n:
        raise ArityMismatch(f"need {ring.n} images")
    mat = [[im.diff(j) for j in range(1, ring.n + 1)] for im in images]
    return mat, determinant(mat)


def wedge2(f: Poly, g: Poly) -> tuple[Poly, ...]:
    """Coefficients of df ^ dg on dx_i ^ dx_j for i < j (lexicographic order)."""
    if f.ring != g.ring:
        raise RingMismatch("wedge of polynomials from different rings")
    n = f.ring.n
    if n not in (2, 3):
        raise ArityMismatch("wedge2 supports two or three variables")
    df = [f.diff(i) for i in range(1, n + 1)]
    dg = [g.diff(i) for i in range(1, n + 1)]
    return tuple(df[i] * dg[j] - df[j] * dg[i] for i in range(n) for j in range(i + 1, n))


def wedge_index_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def mgcd(f: Poly, g: Poly) -> Poly:
    """gcd up to units: positive primitive over Z, leading coefficient 1 otherwise."""
    if f.ring != g.ring:
        raise RingMismatch("gcd of polynomials from different rings")
    dom = f.ring.domain
    if dom.kind == CYCLO_KIND:
        raise UnsupportedDomain("gcd is not available in a cyclotomic quotient")
    if f.is_zero() and g.is_zero():
        return f.ring.zero()
    if f.is_zero():
        return normalize_unit(g)
    if g.is_zero():
        return normalize_unit(f)
    h = Poly(f.ring, f.p.gcd(g.p))
    if dom.kind == ZZ_KIND:
        from .coeff import ext_gcd

        cont = ext_gcd(f.content(), g.content())[0]
        h = normalize_unit(h) * f.ring.const(cont)
        return h
    return normalize_unit(h)


def normalize_unit(f: Poly) -> Poly:
    """Divide out the unit making f canonical (Z: primitive with positive lead)."""
    if f.is_zero():
        return f
    dom = f.ring.domain
    rt = f.rational_terms()
    n = f.ring.n
    lead_key = max(rt, key=lambda k: (grlex_key(k[:n]), grlex_key(k[n:])))
    lc = rt[lead_key]
    if dom.kind == ZZ_KIND:
        from math import gcd

        num = 0
        den = 1
        for c in rt.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        scale = Fraction(den, num) * (1 if lc > 0 else -1)
        return Poly(f.ring, f.p * _to_fmpq(scale))
    return Poly(f.ring, f.p * _to_fmpq(1 / lc))


def poly_power_sum(terms: Iterable[Poly], ring: Ring) -> Poly:
    acc = ring.zero()
    for t in terms:
        acc = acc + t
    return acc

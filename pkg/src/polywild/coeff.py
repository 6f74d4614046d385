"""Coefficient domains: Q, Z, Q[t] and the cyclotomic quotients Q[zeta]/(zeta^e - 1).

Elements are immutable :class:`Elem` values.  ``Frac`` holds an element of the
fraction field of a PID (or of Q itself).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import flint

from .errors import DivisionByZero, NonUnit, NotDivisible, UnsupportedDomain, ZeroInput

QQ_KIND = "QQ"
ZZ_KIND = "ZZ"
QQT_KIND = "QQ[t]"
CYCLO_KIND = "cyclo"


@dataclass(frozen=True)
class Domain:
    kind: str
    e: int = 0
    roots: int = 0

    def __post_init__(self):
        if self.kind == CYCLO_KIND:
            if self.e < 1 or self.roots not in (1, 2):
                raise UnsupportedDomain("cyclotomic quotient needs e >= 1 and one or two roots")
        elif self.kind not in (QQ_KIND, ZZ_KIND, QQT_KIND):
            raise UnsupportedDomain(f"unknown domain {self.kind!r}")

    @property
    def is_field(self) -> bool:
        return self.kind == QQ_KIND

    @property
    def is_pid(self) -> bool:
        return self.kind in (QQ_KIND, ZZ_KIND, QQT_KIND)

    @property
    def contains_q(self) -> bool:
        return self.kind != ZZ_KIND

    @property
    def param_names(self) -> tuple[str, ...]:
        """Names of the hidden variables carried by polynomial payloads."""
        if self.kind == QQT_KIND:
            return ("t",)
        if self.kind == CYCLO_KIND:
            return ("zeta",) if self.roots == 1 else ("zeta1", "zeta2")
        return ()

    @property
    def name(self) -> str:
        if self.kind == CYCLO_KIND:
            if self.roots == 1:
                return f"Q[zeta]/(zeta^{self.e}-1)"
            return f"Q[zeta1,zeta2]/(zeta1^{self.e}-1,zeta2^{self.e}-1)"
        return {QQ_KIND: "Q", ZZ_KIND: "Z", QQT_KIND: "Q[t]"}[self.kind]

    def __str__(self):
        return self.name

    # constructors -------------------------------------------------------
    def zero(self) -> "Elem":
        return self(0)

    def one(self) -> "Elem":
        return self(1)

    def __call__(self, value) -> "Elem":
        return _coerce(self, value)

    def gen(self, k: int = 0) -> "Elem":
        """The parameter t, or the k-th symbolic root of unity."""
        if self.kind == QQT_KIND:
            return Elem(self, flint.fmpq_poly([0, 1]))
        if self.kind == CYCLO_KIND:
            exps = [0] * self.roots
            exps[k] = 1 % self.e if self.e > 1 else 0
            return Elem(self, _cyclo_canon(self, {tuple(exps): Fraction(1)}))
        raise UnsupportedDomain(f"{self.name} has no generator")


QQ = Domain(QQ_KIND)
ZZ = Domain(ZZ_KIND)
QQT = Domain(QQT_KIND)


def cyclotomic(e: int, roots: int = 1) -> Domain:
    return Domain(CYCLO_KIND, e, roots)


def domain_from_name(text: str) -> Domain:
    """Parse a ring name such as ``Q``, ``Z``, ``Q[t]`` or ``cyclo:3``."""
    s = text.strip().replace(" ", "")
    if s in ("Q", "QQ"):
        return QQ
    if s in ("Z", "ZZ"):
        return ZZ
    if s in ("Q[t]", "QQ[t]"):
        return QQT
    if s.startswith("cyclo:"):
        return cyclotomic(int(s.split(":", 1)[1]))
    raise UnsupportedDomain(f"unknown ring {text!r}")


def _cyclo_canon(dom: Domain, items) -> tuple:
    acc: dict[tuple, Fraction] = {}
    for exps, c in items.items() if isinstance(items, dict) else items:
        key = tuple(x % dom.e for x in exps)
        acc[key] = acc.get(key, Fraction(0)) + c
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0))


def _coerce(dom: Domain, value) -> "Elem":
    if isinstance(value, Elem):
        if value.domain == dom:
            return value
        if value.is_rational():
            return _coerce(dom, value.to_fraction())
        raise UnsupportedDomain(f"cannot move {value} from {value.domain} to {dom}")
    if isinstance(value, (flint.fmpz, flint.fmpq)):
        value = Fraction(int(value.p), int(value.q)) if isinstance(value, flint.fmpq) else int(value)
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise TypeError(f"cannot build a coefficient from {value!r}")
    q = Fraction(value)
    if dom.kind == QQ_KIND:
        return Elem(dom, q)
    if dom.kind == ZZ_KIND:
        if q.denominator != 1:
            raise NotDivisible(f"{q} is not an integer")
        return Elem(dom, int(q))
    if dom.kind == QQT_KIND:
        return Elem(dom, flint.fmpq_poly([flint.fmpq(q.numerator, q.denominator)]))
    return Elem(dom, _cyclo_canon(dom, {(0,) * dom.roots: q}))


def _fmpq_to_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class Elem:
    """An element of one of the supported coefficient rings."""

    __slots__ = ("domain", "payload", "_key")

    def __init__(self, domain: Domain, payload):
        self.domain = domain
        self.payload = payload
        if domain.kind == QQT_KIND:
            self._key = tuple(_fmpq_to_fraction(c) for c in payload.coeffs())
        else:
            self._key = payload

    # structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        k = self.domain.kind
        if k in (QQ_KIND, ZZ_KIND):
            return self.payload == 0
        if k == QQT_KIND:
            return self.payload.is_zero()
        return len(self.payload) == 0

    def is_rational(self) -> bool:
        k = self.domain.kind
        if k in (QQ_KIND, ZZ_KIND):
            return True
        if k == QQT_KIND:
            return self.payload.degree() <= 0
        return all(all(x == 0 for x in exps) for exps, _ in self.payload)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        k = self.domain.kind
        if k in (QQ_KIND, ZZ_KIND):
            return Fraction(self.payload)
        if k == QQT_KIND:
            return _fmpq_to_fraction(self.payload[0]) if not self.payload.is_zero() else Fraction(0)
        return self.payload[0][1] if self.payload else Fraction(0)

    def degree(self) -> int:
        """Degree in t (Q[t]) and 0 for nonzero scalars; -1 for zero."""
        if self.is_zero():
            return -1
        if self.domain.kind == QQT_KIND:
            return self.payload.degree()
        return 0

    def leading_rational(self) -> Fraction:
        """Leading rational coefficient, used for canonical normalizations."""
        k = self.domain.kind
        if k in (QQ_KIND, ZZ_KIND):
            return Fraction(self.payload)
        if k == QQT_KIND:
            return self._key[-1] if self._key else Fraction(0)
        return self.payload[-1][1] if self.payload else Fraction(0)

    def coefficients(self) -> list[Fraction]:
        """Coefficient list in t, lowest degree first (Q[t] only)."""
        if self.domain.kind != QQT_KIND:
            raise UnsupportedDomain("coefficient list only defined over Q[t]")
        return list(self._key)

    def cyclo_terms(self) -> tuple:
        return self.payload

    # arithmetic ---------------------------------------------------------
    def _other(self, other) -> "Elem":
        if isinstance(other, Elem):
            if other.domain != self.domain:
                if other.is_rational():
                    return self.domain(other.to_fraction())
                raise UnsupportedDomain(f"mixing {self.domain} and {other.domain}")
            return other
        return self.domain(other)

    def __add__(self, other):
        o = self._other(other)
        if self.domain.kind == CYCLO_KIND:
            d = dict(self.payload)
            for k, v in o.payload:
                d[k] = d.get(k, Fraction(0)) + v
            return Elem(self.domain, _cyclo_canon(self.domain, d))
        return Elem(self.domain, self.payload + o.payload)

    __radd__ = __add__

    def __neg__(self):
        if self.domain.kind == CYCLO_KIND:
            return Elem(self.domain, tuple((k, -v) for k, v in self.payload))
        return Elem(self.domain, -self.payload)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        o = self._other(other)
        if self.domain.kind == CYCLO_KIND:
            d: dict = {}
            for k1, v1 in self.payload:
                for k2, v2 in o.payload:
                    k = tuple(a + b for a, b in zip(k1, k2))
                    d[k] = d.get(k, Fraction(0)) + v1 * v2
            return Elem(self.domain, _cyclo_canon(self.domain, d))
        return Elem(self.domain, self.payload * o.payload)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.unit_inverse() ** (-n)
        result = self.domain.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.domain(other)
        if not isinstance(other, Elem):
            return NotImplemented
        return self.domain == other.domain and self._key == other._key

    def __hash__(self):
        return hash((self.domain, self._key))

    # divisibility -------------------------------------------------------
    def is_unit(self) -> bool:
        k = self.domain.kind
        if k == QQ_KIND:
            return self.payload != 0
        if k == ZZ_KIND:
            return self.payload in (1, -1)
        if k == QQT_KIND:
            return self.payload.degree() == 0
        # c * zeta^k monomials are units; other units are not detected
        return len(self.payload) == 1

    def unit_inverse(self) -> "Elem":
        if not self.is_unit():
            raise NonUnit(f"{self} is not a recognised unit of {self.domain}")
        k = self.domain.kind
        if k == QQ_KIND:
            return Elem(self.domain, 1 / self.payload)
        if k == ZZ_KIND:
            return self
        if k == QQT_KIND:
            return self.domain(1 / _fmpq_to_fraction(self.payload[0]))
        (exps, c), = self.payload
        return Elem(self.domain, _cyclo_canon(self.domain, {tuple(-x for x in exps): 1 / c}))

    def divides(self, other: "Elem") -> bool:
        try:
            other.exact_div(self)
            return True
        except NotDivisible:
            return False

    def exact_div(self, other) -> "Elem":
        """Quotient in R; raises NotDivisible when it leaves R."""
        o = self._other(other)
        if o.is_zero():
            raise DivisionByZero("division by zero")
        k = self.domain.kind
        if k == QQ_KIND:
            return Elem(self.domain, self.payload / o.payload)
        if k == ZZ_KIND:
            q, r = divmod(self.payload, o.payload)
            if r:
                raise NotDivisible(f"{o} does not divide {self}")
            return Elem(self.domain, q)
        if k == QQT_KIND:
            q, r = divmod(self.payload, o.payload)
            if not r.is_zero():
                raise NotDivisible(f"{o} does not divide {self}")
            return Elem(self.domain, q)
        if not o.is_unit():
            raise NonUnit("cyclotomic quotients only divide by units")
        return self * o.unit_inverse()

    def divmod(self, other: "Elem") -> tuple["Elem", "Elem"]:
        """Euclidean division (Z: floor division; Q[t]: polynomial division)."""
        o = self._other(other)
        if o.is_zero():
            raise DivisionByZero("division by zero")
        k = self.domain.kind
        if k == QQ_KIND:
            return Elem(self.domain, self.payload / o.payload), self.domain.zero()
        if k == ZZ_KIND:
            q, r = divmod(self.payload, o.payload)
            return Elem(self.domain, q), Elem(self.domain, r)
        if k == QQT_KIND:
            q, r = divmod(self.payload, o.payload)
            return Elem(self.domain, q), Elem(self.domain, r)
        raise UnsupportedDomain("no Euclidean division in a cyclotomic quotient")

    def canonical_unit(self) -> "Elem":
        """The unit u with self/u canonical (positive integer, monic polynomial)."""
        if self.is_zero():
            return self.domain.one()
        k = self.domain.kind
        if k in (QQ_KIND, QQT_KIND):
            return self.domain(self.leading_rational())
        if k == ZZ_KIND:
            return self.domain(1 if self.payload > 0 else -1)
        raise UnsupportedDomain("no canonical unit in a cyclotomic quotient")

    def normalize(self) -> "Elem":
        return self.exact_div(self.canonical_unit())

    # printing -----------------------------------------------------------
    def __str__(self):
        k = self.domain.kind
        if k in (QQ_KIND, ZZ_KIND):
            return str(self.payload)
        if k == QQT_KIND:
            terms = [(i, c) for i, c in enumerate(self._key) if c != 0]
            return _join_terms([(c, _pow_str("t", i)) for i, c in reversed(terms)])
        names = self.domain.param_names
        items = sorted(self.payload, key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)
        body = _join_terms([(c, "*".join(_pow_str(n, x) for n, x in zip(names, exps) if x)) for exps, c in items])
        return body

    def __repr__(self):
        return f"Elem({self.domain.name}, {self})"


def _pow_str(name: str, k: int) -> str:
    if k == 0:
        return ""
    return name if k == 1 else f"{name}^{k}"


def _join_terms(terms: Iterable[tuple[Fraction, str]]) -> str:
    out = []
    for c, mono in terms:
        neg = c < 0
        a = -c if neg else c
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out) if out else "0"


# ----------------------------------------------------------------------
# fractions


class Frac:
    """An element num/den of the fraction field K of a PID R."""

    __slots__ = ("num", "den")

    def __init__(self, num: Elem, den: Elem | None = None, _reduced: bool = False):
        dom = num.domain
        if den is None:
            den = dom.one()
        if den.domain != dom:
            raise UnsupportedDomain("numerator and denominator in different domains")
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if not _reduced:
            if dom.kind == CYCLO_KIND:
                num, den = num * den.unit_inverse(), dom.one()
            elif num.is_zero():
                den = dom.one()
            else:
                g, _, _ = ext_gcd(num, den)
                num, den = num.exact_div(g), den.exact_div(g)
                u = den.canonical_unit()
                num, den = num.exact_div(u), den.exact_div(u)
        self.num = num
        self.den = den

    @property
    def domain(self) -> Domain:
        return self.num.domain

    @classmethod
    def of(cls, value, domain: Domain) -> "Frac":
        if isinstance(value, Frac):
            return value
        if isinstance(value, Fraction) and domain.kind == ZZ_KIND:
            return cls(domain(value.numerator), domain(value.denominator))
        return cls(domain(value))

    def _lift(self, o) -> "Frac":
        if isinstance(o, Frac):
            return o
        if isinstance(o, Elem):
            return Frac(o)
        return Frac.of(o if isinstance(o, Fraction) else Fraction(o), self.domain)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def in_ring(self) -> bool:
        return self.den.is_unit()

    def to_elem(self) -> Elem:
        if not self.in_ring():
            raise NotDivisible(f"{self} is not in {self.domain}")
        return self.num.exact_div(self.den)

    def __add__(self, o):
        o = self._lift(o)
        return Frac(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Frac(-self.num, self.den, _reduced=True)

    def __sub__(self, o):
        o = self._lift(o)
        return self + (-o)

    def __mul__(self, o):
        o = self._lift(o)
        return Frac(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Frac":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return Frac(self.den, self.num)

    def __truediv__(self, o):
        o = self._lift(o)
        return self * o.inverse()

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, Elem)):
            o = self._lift(o)
        if not isinstance(o, Frac):
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == self.domain.one():
            return str(self.num)
        n, d = str(self.num), str(self.den)
        if self.domain.kind == QQT_KIND:
            n = f"({n})" if self.num.degree() > 0 and len([c for c in self.num.coefficients() if c]) > 1 else n
            d = f"({d})"
        return f"{n}/{d}"

    __repr__ = __str__


# ----------------------------------------------------------------------
# PID operations


def ext_gcd(a: Elem, b: Elem) -> tuple[Elem, Elem, Elem]:
    """Return (g, u, v) with u*a + v*b = g = gcd(a, b), g canonical."""
    dom = a.domain
    if b.domain != dom:
        raise UnsupportedDomain("ext_gcd operands in different domains")
    if not dom.is_pid:
        raise UnsupportedDomain(f"ext_gcd needs a PID, got {dom}")
    if dom.is_field:
        if a.is_zero() and b.is_zero():
            return dom.zero(), dom.zero(), dom.zero()
        if not a.is_zero():
            return dom.one(), a.unit_inverse(), dom.zero()
        return dom.one(), dom.zero(), b.unit_inverse()
    r0, r1 = a, b
    s0, s1 = dom.one(), dom.zero()
    t0, t1 = dom.zero(), dom.one()
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    unit = r0.canonical_unit()
    inv = unit.unit_inverse()
    g, u, v = r0 * inv, s0 * inv, t0 * inv
    if u * a + v * b != g:
        raise AssertionError("ext_gcd postcondition failed")
    return g, u, v


def v_of_r_member(q: Frac) -> bool:
    """Membership of q in V(R); every nonzero fraction qualifies over a PID."""
    if q.domain.kind == CYCLO_KIND:
        raise UnsupportedDomain("V(R) is not available for cyclotomic quotients")
    if q.is_zero():
        raise ZeroInput("V(R) membership of zero")
    return True


def parse_elem(text: str, domain: Domain | None = None) -> Elem:
    """Parse a coefficient literal such as ``3/5``, ``3*t^2 - 1/2`` or ``zeta^2 + 1 (mod e=3)``."""
    from .parse import parse_coefficient

    return parse_coefficient(text, domain)

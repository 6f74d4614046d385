"""Weights with values in Z^m (lexicographic order), w-degrees and initial forms."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .coeff import Frac
from .errors import ArityMismatch, DegenerateInput, LPTooLarge, ZeroInput
from .poly import Poly

MAX_LP_MONOMIALS = 12


class _NegInf:
    """Smaller than every element of the weight group."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __repr__(self):
        return "-inf"

    def __str__(self):
        return "-inf"


NEG_INF = _NegInf()


def gadd(a, b):
    if a is NEG_INF or b is NEG_INF:
        return NEG_INF
    return tuple(x + y for x, y in zip(a, b))


def gsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def gscale(k: int, a):
    if a is NEG_INF:
        return NEG_INF
    return tuple(k * x for x in a)


def gzero(m: int) -> tuple:
    return (0,) * m


@dataclass(frozen=True)
class Weight:
    """w = (w_1, ..., w_n) with each w_i in Z^m."""

    entries: tuple

    def __post_init__(self):
        if not self.entries:
            raise ArityMismatch("empty weight")
        m = len(self.entries[0])
        if any(len(e) != m for e in self.entries):
            raise ArityMismatch("weight entries live in different groups")

    @classmethod
    def of(cls, data) -> "Weight":
        """Accept [1, 1] (integer weights) or [[1, 0], [0, 1]] (vector weights)."""
        if isinstance(data, Weight):
            return data
        rows = []
        for e in data:
            rows.append((int(e),) if isinstance(e, int) else tuple(int(v) for v in e))
        return cls(tuple(rows))

    @classmethod
    def standard(cls, n: int) -> "Weight":
        return cls(tuple((1,) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries[0])

    def total(self) -> tuple:
        """|w|, the sum of the entries."""
        acc = gzero(self.m)
        for e in self.entries:
            acc = gadd(acc, e)
        return acc

    def all_positive(self) -> bool:
        z = gzero(self.m)
        return all(e > z for e in self.entries)

    def some_positive(self) -> bool:
        z = gzero(self.m)
        return any(e > z for e in self.entries)

    def monomial_degree(self, exps: Sequence[int]) -> tuple:
        acc = gzero(self.m)
        for a, e in zip(exps, self.entries):
            if a:
                acc = gadd(acc, gscale(a, e))
        return acc

    def rank(self) -> int:
        """Rank of the Z-span of the entries."""
        return integer_rank([list(e) for e in self.entries])

    def to_json(self) -> list:
        return [list(e) for e in self.entries]


def integer_rank(rows: list[list[int]]) -> int:
    """Rank over Q of an integer matrix."""
    mat = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][c] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][c] != 0:
                f = mat[r][c] / mat[rank][c]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def _check(f: Poly, w: Weight):
    if f.ring.n != w.n:
        raise ArityMismatch(f"weight has {w.n} entries for {f.ring.n} variables")


def wdeg(f: Poly, w: Weight):
    """deg_w f; NEG_INF for the zero polynomial."""
    _check(f, w)
    if f.is_zero():
        return NEG_INF
    return max(w.monomial_degree(k) for k in f.monomials())


def wdeg_fraction(g: Poly, h: Poly, w: Weight):
    if h.is_zero():
        raise ZeroInput("zero denominator")
    dg = wdeg(g, w)
    if dg is NEG_INF:
        return NEG_INF
    return gsub(dg, wdeg(h, w))


def initial_form(f: Poly, w: Weight) -> Poly:
    """Sum of the terms of top w-degree."""
    _check(f, w)
    if f.is_zero():
        return f
    top = wdeg(f, w)
    n = f.ring.n
    keep = {k: c for k, c in zip(f.exps(), f.p.coeffs()) if w.monomial_degree(k[:n]) == top}
    return Poly(f.ring, f.ring.ctx.from_dict(keep))


def bidegree(f: Poly) -> tuple[int, int]:
    """w(f) = (deg_x2 f, deg_x1 f)."""
    if f.ring.n != 2:
        raise ArityMismatch("bidegree is defined in two variables")
    return (max(f.degree(2), 0), max(f.degree(1), 0))


def bidegree_weight(f: Poly) -> Weight:
    d2, d1 = bidegree(f)
    return Weight(((d2,), (d1,)))


def wdeg_form(coeffs, w: Weight):
    """deg_w of a form sum c_I dx_I given as {index tuple: coefficient} or wedge2 output."""
    if not isinstance(coeffs, dict):
        from .poly import wedge_index_pairs

        coeffs = dict(zip(wedge_index_pairs(w.n), coeffs))
    best = NEG_INF
    for idx, c in coeffs.items():
        d = wdeg(c, w)
        if d is NEG_INF:
            continue
        for i in idx:
            d = gadd(d, w.entries[i - 1])
        if d > best:
            best = d
    return best


def wdeg_map(images: Sequence[Poly], w: Weight):
    """deg_w of a map: the sum of the w-degrees of the images."""
    acc = gzero(w.m)
    for g in images:
        acc = gadd(acc, wdeg(g, w))
    return acc


# ----------------------------------------------------------------------
# slope factorization


@dataclass(frozen=True)
class SlopeData:
    i: int
    j: int
    l: int
    m: int
    a: Frac
    b: Frac

    def as_tuple(self):
        return (self.i, self.j, self.l, self.m, self.a, self.b)

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "l": self.l, "m": self.m, "a": str(self.a), "b": str(self.b)}


def slope_factor(f: Poly) -> SlopeData | None:
    """Write f^{w(f)} = a (x_i - b x_j^l)^m, or return None."""
    d2, d1 = bidegree(f)
    if d1 + d2 <= 1:
        raise DegenerateInput("slope factorization needs |w(f)| > 1")
    fw = initial_form(f, bidegree_weight(f))
    ring = f.ring
    dom = ring.domain
    degs = {1: d1, 2: d2}
    for i, j in ((2, 1), (1, 2)):
        m = degs[i]
        if m == 0 or degs[j] % m:
            continue
        l = degs[j] // m
        if l < 1:
            continue
        top = [0, 0]
        top[i - 1] = m
        a = fw.coeff(tuple(top))
        if a.is_zero():
            continue
        nxt = [0, 0]
        nxt[i - 1] = m - 1
        nxt[j - 1] = l
        c = fw.coeff(tuple(nxt))
        if c.is_zero():
            continue
        b = Frac(-c, a * dom(m))
        # gamma^m f^w == a (gamma x_i - beta x_j^l)^m with b = beta/gamma
        beta, gamma = b.num, b.den
        lhs = fw * ring.const(gamma ** m)
        rhs = (ring.var(i) * ring.const(gamma) - ring.var(j) ** l * ring.const(beta)) ** m * ring.const(a)
        if lhs == rhs:
            return SlopeData(i, j, l, m, Frac(a), b)
    return None


# ----------------------------------------------------------------------
# exact LP by Fourier-Motzkin elimination


def fm_solve(constraints: list[tuple[tuple, Fraction]], nvars: int) -> list[Fraction] | None:
    """A rational point with sum_k c_k u_k >= r for every (c, r), or None."""
    levels = [[(tuple(Fraction(x) for x in c), Fraction(r)) for c, r in constraints]]
    for k in range(nvars - 1, -1, -1):
        cur = levels[-1]
        pos = [cr for cr in cur if cr[0][k] > 0]
        neg = [cr for cr in cur if cr[0][k] < 0]
        nxt = [cr for cr in cur if cr[0][k] == 0]
        for cp, rp in pos:
            for cn, rn in neg:
                lp, ln = -cn[k], cp[k]
                c = tuple(lp * a + ln * b for a, b in zip(cp, cn))
                nxt.append((c, lp * rp + ln * rn))
        # drop duplicates to keep the system small
        levels.append(list(dict.fromkeys(nxt)))
    if any(r > 0 for _, r in levels[-1]):
        return None
    point = [Fraction(0)] * nvars
    for k in range(nvars):
        lo, hi = None, None
        for c, r in levels[nvars - 1 - k]:
            if c[k] == 0:
                continue
            rest = sum(c[q] * point[q] for q in range(k))
            bound = (r - rest) / c[k]
            if c[k] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None:
            v = Fraction(math.ceil(lo))
            point[k] = v if hi is None or v <= hi else lo
        elif hi is not None:
            v = Fraction(math.floor(hi))
            point[k] = min(v, Fraction(0)) if v >= 0 else v
        else:
            point[k] = Fraction(0)
    return point


def _face_constraints(face: Sequence[tuple], rest: Sequence[tuple], nvars: int) -> list:
    cons = []
    for k in range(nvars):
        e = [0] * nvars
        e[k] = 1
        cons.append((tuple(e), 0))
    base = face[0]
    for m in face[1:]:
        diff = tuple(a - b for a, b in zip(m, base))
        cons.append((diff, 0))
        cons.append((tuple(-d for d in diff), 0))
    for m in rest:
        cons.append((tuple(a - b for a, b in zip(base, m)), 1))
    return cons


def face_witness(face, rest, nvars: int, positive: Iterable[int] = ()) -> list[Fraction] | None:
    """u >= 0 making ``face`` the argmax over face+rest, with u_k >= 1 for k in positive."""
    cons = _face_constraints(list(face), list(rest), nvars)
    for k in positive:
        e = [0] * nvars
        e[k] = 1
        cons.append((tuple(e), 1))
    return fm_solve(cons, nvars)


@dataclass(frozen=True)
class InitialSupport:
    monomials: frozenset
    witness: tuple  # chain of functionals u^(1), u^(2), ...

    def certify(self, start: Iterable[tuple]) -> bool:
        """Replay the witness chain from the full support."""
        cur = set(start)
        total = [Fraction(0)] * len(next(iter(self.monomials)))
        for u in self.witness:
            vals = {m: sum(a * b for a, b in zip(u, m)) for m in cur}
            top = max(vals.values())
            cur = {m for m in cur if vals[m] == top}
            total = [a + b for a, b in zip(total, u)]
        return cur == set(self.monomials) and all(t > 0 for t in total) and all(
            v >= 0 for u in self.witness for v in u)

    def to_json(self) -> dict:
        return {
            "monomials": sorted(list(m) for m in self.monomials),
            "witness": [[str(v) for v in u] for u in self.witness],
        }


def enumerate_initial_supports(P: Poly) -> list[InitialSupport]:
    """Supports of P^v reachable by argmax chains of nonnegative functionals with positive sum.

    The result contains the support of every initial form P^v with all v_i > 0; it is
    a sound over-approximation, and each entry replays from its witness chain.
    """
    if P.is_zero():
        raise ZeroInput("initial supports of zero")
    n = P.ring.n
    monos = P.monomials()
    if len(monos) > MAX_LP_MONOMIALS:
        raise LPTooLarge(f"{len(monos)} monomials exceed the LP limit of {MAX_LP_MONOMIALS}")
    full = frozenset(range(n))
    found: dict[frozenset, tuple] = {}
    seen: set = set()

    def rec(support: tuple, covered: frozenset, chain: tuple):
        key = (support, covered)
        if key in seen:
            return
        seen.add(key)
        if covered == full and frozenset(support) not in found:
            found[frozenset(support)] = chain
        for r in range(len(support), 0, -1):
            for face in itertools.combinations(support, r):
                rest = [m for m in support if m not in face]
                base = face_witness(face, rest, n)
                if base is None:
                    continue
                can = []
                u = list(base)
                for k in range(n):
                    wk = face_witness(face, rest, n, positive=[k])
                    if wk is not None:
                        can.append(k)
                        u = [a + b for a, b in zip(u, wk)]
                grown = covered | frozenset(can)
                if len(face) == len(support) and grown == covered:
                    continue
                rec(face, grown, chain + (tuple(u),))

    rec(tuple(monos), frozenset(), ())
    out = [InitialSupport(s, c) for s, c in found.items()]
    out.sort(key=lambda s: (len(s.monomials), sorted(s.monomials, reverse=True)), reverse=True)
    return out


def support_form(P: Poly, support: InitialSupport) -> Poly:
    """The part of P on the given support."""
    n = P.ring.n
    keep = {k: c for k, c in zip(P.exps(), P.p.coeffs()) if k[:n] in support.monomials}
    return Poly(P.ring, P.ring.ctx.from_dict(keep))

"""Recursive-descent parser for polynomial and coefficient literals.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' nat)?
    base   := rational | 't' | 'zeta' ['1'|'2'] | 'x' nat | '(' expr ')'

A leading sign is accepted on each term.  Cyclotomic literals carry a
``(mod e=N)`` suffix.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .coeff import QQ, QQT, Domain, Elem, cyclotomic
from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>zeta[12]?|t|x\d+)|(?P<op>[-+*/^()]))")
_MOD = re.compile(r"\(\s*mod\s+e\s*=\s*(\d+)\s*\)\s*$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            # point at the first non-space character
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, ring):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        near = repr(tok[1]) if tok[1] else "end of input"
        raise ParseError(f"{msg} near {near}", tok[2], self.text)

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        val = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return val

    def expr(self):
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        neg = False
        while self.peek()[1] in ("-", "+"):
            neg ^= self.take()[1] == "-"
        acc = self.factor()
        while self.peek()[1] == "*":
            self.take()
            acc = acc * self.factor()
        return -acc if neg else acc

    def factor(self):
        base = self.base()
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be a natural number", tok)
            return base ** int(tok[1])
        return base

    def base(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            num = int(val)
            if self.peek()[1] == "/":
                self.take()
                den_tok = self.take()
                if den_tok[0] != "num":
                    self.fail("expected a denominator", den_tok)
                if int(den_tok[1]) == 0:
                    self.fail("zero denominator", den_tok)
                return self.ring.const(Fraction(num, int(den_tok[1])))
            return self.ring.const(num)
        if kind == "name":
            dom = self.ring.domain
            if val == "t":
                if dom.kind != "QQ[t]":
                    self.fail("t is only allowed over Q[t]", tok)
                return self.ring.param(0)
            if val.startswith("zeta"):
                if dom.kind != "cyclo":
                    self.fail("zeta needs a (mod e=N) suffix", tok)
                k = int(val[4:]) - 1 if len(val) > 4 else 0
                if k >= dom.roots:
                    self.fail(f"{val} is not available here", tok)
                return self.ring.param(k)
            idx = int(val[1:])
            if not 1 <= idx <= self.ring.n:
                self.fail(f"{val} is outside the ring", tok)
            return self.ring.var(idx)
        if val == "(":
            inner = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return inner
        self.fail("unexpected token", tok)


def _split_mod(text: str) -> tuple[str, int | None]:
    m = _MOD.search(text)
    if not m:
        return text, None
    return text[: m.start()], int(m.group(1))


def _max_var(text: str) -> int:
    found = [int(v) for v in re.findall(r"x(\d+)", text)]
    return max(found, default=0)


def _infer_domain(text: str, domain: Domain | None) -> tuple[str, Domain]:
    body, e = _split_mod(text)
    if e is not None:
        roots = 2 if re.search(r"zeta2", body) else 1
        want = cyclotomic(e, roots)
        if domain is not None and domain.kind == "cyclo":
            if domain.e != e:
                raise ParseError("modulus does not match the ring", _MOD.search(text).start(), text)
            want = domain
        return body, want
    if domain is not None:
        return body, domain
    if re.search(r"\bt\b", body):
        return body, QQT
    return body, QQ


def parse_poly(text: str, ring=None, n: int | None = None, domain: Domain | None = None):
    """Parse a polynomial.  The ring is inferred from the text unless given."""
    from .poly import Ring

    if ring is not None:
        body, dom = _infer_domain(text, ring.domain)
        if dom != ring.domain:
            ring = Ring(ring.n, dom)
    else:
        body, dom = _infer_domain(text, domain)
        arity = n if n is not None else max(_max_var(body), 1)
        ring = Ring(arity, dom)
    return _Parser(body, ring).parse()


def parse_coefficient(text: str, domain: Domain | None = None) -> Elem:
    from .poly import Ring

    body, dom = _infer_domain(text, domain)
    if re.search(r"x\d", body):
        pos = re.search(r"x\d", body).start()
        raise ParseError("a coefficient cannot mention x variables", pos, text)
    value = _Parser(body, Ring(0, dom)).parse()
    return value.constant_value()

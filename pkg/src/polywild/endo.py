"""Ring endomorphisms given by the images of the variables.

An ``Endo`` acts on polynomials by substitution, so ``compose(s, t)`` is the map
f -> s(t(f)): the images of the composite are t's images with s substituted in.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .coeff import Elem
from .errors import ArityMismatch, MissingProvenance, NonUnit, NotAutomorphism, RingMismatch
from .poly import Poly, Ring, jacobian


@dataclass(frozen=True)
class ElementaryStep:
    """x_i -> alpha*x_i + f with alpha a unit and f free of x_i."""

    i: int
    alpha: Elem
    f: Poly

    def endo(self) -> "Endo":
        ring = self.f.ring
        if self.f.degree(self.i) > 0:
            raise ArityMismatch(f"elementary step on x{self.i} must not involve x{self.i}")
        images = list(ring.gens())
        images[self.i - 1] = ring.var(self.i) * ring.const(self.alpha) + self.f
        return Endo(ring, images)

    def inverse(self) -> "ElementaryStep":
        if not self.alpha.is_unit():
            raise NonUnit(f"{self.alpha} is not a unit")
        inv = self.alpha.unit_inverse()
        return ElementaryStep(self.i, inv, -self.f * self.f.ring.const(inv))

    def to_json(self) -> dict:
        return {"kind": "elementary", "i": self.i, "alpha": str(self.alpha), "f": str(self.f)}


@dataclass(frozen=True)
class AffineStep:
    """x_i -> sum_j A[i][j] x_j + b_i with det A a unit."""

    ring: Ring
    matrix: tuple
    shift: tuple

    def endo(self) -> "Endo":
        ring = self.ring
        images = []
        for row, b in zip(self.matrix, self.shift):
            acc = ring.const(b)
            for a, x in zip(row, ring.gens()):
                if not a.is_zero():
                    acc = acc + x * ring.const(a)
            images.append(acc)
        return Endo(ring, images)

    def det(self) -> Elem:
        n = len(self.matrix)
        mat = [[self.ring.const(a) for a in row] for row in self.matrix]
        from .poly import determinant

        return determinant(mat).constant_value() if n else self.ring.domain.one()

    def inverse(self) -> "AffineStep":
        n = len(self.matrix)
        d = self.det()
        if not d.is_unit():
            raise NonUnit(f"determinant {d} is not a unit")
        dinv = d.unit_inverse()
        from .poly import determinant

        ring = self.ring
        cof = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[ring.const(self.matrix[r][c]) for c in range(n) if c != j] for r in range(n) if r != i]
                m = determinant(minor).constant_value() if minor else ring.domain.one()
                cof[i][j] = m if (i + j) % 2 == 0 else -m
        inv = tuple(tuple(cof[j][i] * dinv for j in range(n)) for i in range(n))
        shift = tuple(-sum((inv[i][j] * self.shift[j] for j in range(n)), ring.domain.zero()) for i in range(n))
        return AffineStep(ring, inv, shift)

    def to_json(self) -> dict:
        return {
            "kind": "affine",
            "matrix": [[str(a) for a in row] for row in self.matrix],
            "shift": [str(b) for b in self.shift],
        }


@dataclass(frozen=True)
class ExpStep:
    """exp of a locally nilpotent derivation given by its variable images."""

    images: tuple

    def endo(self) -> "Endo":
        from .deriv import Derivation, exp, lnd_verify

        d = Derivation(self.images[0].ring, self.images)
        return exp(d, lnd_verify(d))

    def inverse(self) -> "ExpStep":
        return ExpStep(tuple(-g for g in self.images))

    def to_json(self) -> dict:
        return {"kind": "exp", "images": [str(g) for g in self.images]}


Step = ElementaryStep | AffineStep | ExpStep


class Endo:
    """Images of x1..xn, with an optional inverse witness and factored provenance.

    ``steps`` lists factors s1, ..., sk with the map equal to s1 o s2 o ... o sk.
    """

    __slots__ = ("ring", "images", "inverse", "steps")

    def __init__(self, ring: Ring, images: Sequence[Poly], inverse: Sequence[Poly] | None = None,
                 steps: Sequence[Step] | None = None):
        if len(images) != ring.n:
            raise ArityMismatch(f"need {ring.n} images, got {len(images)}")
        for g in images:
            if g.ring != ring:
                raise RingMismatch("image outside the ring")
        self.ring = ring
        self.images = tuple(images)
        self.inverse = tuple(inverse) if inverse is not None else None
        self.steps = tuple(steps) if steps is not None else None

    @classmethod
    def identity(cls, ring: Ring) -> "Endo":
        gens = ring.gens()
        return cls(ring, gens, gens, ())

    @classmethod
    def from_step(cls, step: Step) -> "Endo":
        e = step.endo()
        inv = step.inverse().endo()
        return cls(e.ring, e.images, inv.images, (step,))

    @classmethod
    def from_steps(cls, ring: Ring, steps: Sequence[Step]) -> "Endo":
        acc = cls.identity(ring)
        for s in steps:
            acc = compose(acc, cls.from_step(s))
        return acc

    def __call__(self, f: Poly) -> Poly:
        if f.ring.n != self.ring.n:
            raise RingMismatch("polynomial and map have different arity")
        return f.substitute(list(self.images), self.ring)

    def __eq__(self, other):
        return isinstance(other, Endo) and self.ring == other.ring and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def is_identity(self) -> bool:
        return list(self.images) == self.ring.gens()

    def inverse_endo(self) -> "Endo":
        if self.inverse is None:
            raise NotAutomorphism("no inverse witness")
        steps = None
        if self.steps is not None:
            steps = tuple(s.inverse() for s in reversed(self.steps))
        return Endo(self.ring, self.inverse, self.images, steps)

    def with_inverse(self, inverse: "Endo | Sequence[Poly]") -> "Endo":
        inv = inverse.images if isinstance(inverse, Endo) else tuple(inverse)
        return Endo(self.ring, self.images, inv, self.steps)

    def degree_vector(self) -> list[int]:
        return [g.total_degree() for g in self.images]

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.images) + ")"

    def to_json(self) -> dict:
        out: dict = {"images": [str(g) for g in self.images]}
        if self.inverse is not None:
            out["inverse"] = [str(g) for g in self.inverse]
        if self.steps is not None:
            out["steps"] = [s.to_json() for s in self.steps]
        return out


def _compose_images(outer: Sequence[Poly], inner: Sequence[Poly], ring: Ring) -> list[Poly]:
    return [g.substitute(list(outer), ring) for g in inner]


def compose(sigma: Endo, tau: Endo) -> Endo:
    """sigma o tau: f -> sigma(tau(f))."""
    if sigma.ring != tau.ring:
        raise RingMismatch(f"{sigma.ring} vs {tau.ring}")
    ring = sigma.ring
    images = _compose_images(sigma.images, tau.images, ring)
    inverse = None
    if sigma.inverse is not None and tau.inverse is not None:
        inverse = _compose_images(tau.inverse, sigma.inverse, ring)
    steps = None
    if sigma.steps is not None and tau.steps is not None:
        steps = sigma.steps + tau.steps
    return Endo(ring, images, inverse, steps)


def compose_all(maps: Sequence[Endo]) -> Endo:
    if not maps:
        raise ValueError("nothing to compose")
    acc = maps[0]
    for m in maps[1:]:
        acc = compose(acc, m)
    return acc


def det_j(phi: Endo) -> Poly:
    if phi.ring.n == 0:
        return phi.ring.one()
    return jacobian(list(phi.images))[1]


def invert_structured(phi: Endo) -> Endo:
    """Inverse assembled from the inverses of the recorded steps, checked by composition."""
    if phi.steps is None:
        raise MissingProvenance("map carries no factorization")
    ring = phi.ring
    inv = Endo.identity(ring)
    for s in reversed(phi.steps):
        inv = compose(inv, Endo.from_step(s.inverse()))
    if not verify_automorphism(phi, inv):
        raise NotAutomorphism("recorded steps do not reproduce the map")
    return Endo(ring, inv.images, phi.images, inv.steps)


def verify_automorphism(phi: Endo, psi: Endo) -> bool:
    """True iff psi o phi and phi o psi are both the identity."""
    if phi.ring != psi.ring:
        return False
    gens = phi.ring.gens()
    if _compose_images(phi.images, psi.images, phi.ring) != gens:
        return False
    return _compose_images(psi.images, phi.images, phi.ring) == gens


def certify(phi: Endo, psi: Endo) -> Endo:
    """Return phi carrying psi as its verified inverse witness."""
    if not verify_automorphism(phi, psi):
        raise NotAutomorphism("the proposed inverse does not invert the map")
    return phi.with_inverse(psi)


def coordinate_verify(f: Poly, rest: Sequence[Poly], psi_inv: Endo | Sequence[Poly]) -> bool:
    """True iff (f, rest...) is an automorphism inverted by psi_inv."""
    ring = f.ring
    if len(rest) != ring.n - 1:
        return False
    phi = Endo(ring, [f, *rest])
    psi = psi_inv if isinstance(psi_inv, Endo) else Endo(ring, list(psi_inv))
    return verify_automorphism(phi, psi)


def swap(ring: Ring, i: int = 1, j: int = 2) -> Endo:
    gens = ring.gens()
    gens[i - 1], gens[j - 1] = gens[j - 1], gens[i - 1]
    return Endo(ring, gens, gens)

"""Exception types shared across the package."""


class PolywildError(Exception):
    """Base class for every error raised by polywild."""


class InputError(PolywildError):
    """Bad user input (malformed expression, wrong arity, bad option)."""


class ConsistencyFailure(PolywildError):
    """A construction that is supposed to succeed did not; this is a bug."""


class RingMismatch(InputError):
    pass


class ArityMismatch(InputError):
    pass


class UnsupportedDomain(InputError):
    pass


class ZeroInput(InputError):
    pass


class DivisionByZero(InputError):
    pass


class NotDivisible(PolywildError):
    """The dividend does not lie in the principal ideal of the divisor."""


class DegenerateInput(InputError):
    pass


class HypothesisNotMet(InputError):
    """A theorem's hypothesis fails for the given data."""


class PreconditionFailed(InputError):
    pass


class NotTriangular(InputError):
    pass


class NotAffine(InputError):
    pass


class NotNilpotentLinearPart(InputError):
    pass


class NotInKernel(InputError):
    pass


class NotExact(PolywildError):
    """The 1-form to integrate is not closed; the derivation is not an LND."""


class NotUnipotent(PolywildError):
    pass


class InvalidEvidence(InputError):
    pass


class MissingInverse(InputError):
    pass


class MissingProvenance(InputError):
    pass


class NonUnit(InputError):
    pass


class NotAutomorphism(InputError):
    pass


class RankDeficient(InputError):
    pass


class UncertifiedP(InputError):
    pass


class ConstantInput(InputError):
    pass


class ZeroDerivation(InputError):
    pass


class ConstantTheta(InputError):
    pass


class DivisionFailure(ConsistencyFailure):
    pass


class DepthBeyondI(InputError):
    pass


class CommonFactor(InputError):
    pass


class LPTooLarge(InputError):
    pass


class ParseError(InputError):
    """Syntax error in a polynomial or coefficient literal."""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.text = text

"""Exception hierarchy for weilzeta."""


class WeilZetaError(Exception):
    """Base class for all library errors."""


# exactmath
class ModulusMismatch(WeilZetaError, ValueError):
    pass


class ZeroPolynomial(WeilZetaError, ValueError):
    pass


# cmfield
class FieldSpecError(WeilZetaError, ValueError):
    """A field spec failed validation."""


class NotTotallyImaginary(FieldSpecError):
    pass


class ConjugationNotInvolution(FieldSpecError):
    pass


class ConjugationNotComplexConjugation(FieldSpecError):
    pass


class BasisNotUnimodularOverQ(FieldSpecError):
    pass


class RealSubfieldViolation(FieldSpecError):
    pass


class NonSquarefreeMinpoly(FieldSpecError):
    pass


class NonRealRelativeNorm(FieldSpecError):
    pass


class GTooLarge(WeilZetaError, ValueError):
    pass


# splitting / dirichlet
class BadPrime(WeilZetaError, ValueError):
    pass


class DenominatorCollision(WeilZetaError, ValueError):
    pass


class BadPrimeFactor(WeilZetaError, ValueError):
    pass


class NotFundamentalDiscriminant(WeilZetaError, ValueError):
    pass


class TruncationMismatch(WeilZetaError, ValueError):
    pass


class NonUnitLeadingCoefficient(WeilZetaError, ValueError):
    pass


# weilenum
class RamifiedSupport(WeilZetaError, ValueError):
    pass


# analysis
class NotCertifiedTrivialClassGroup(WeilZetaError, ValueError):
    pass


class CaseMismatch(WeilZetaError, ValueError):
    pass


class InsufficientRange(WeilZetaError, ValueError):
    pass

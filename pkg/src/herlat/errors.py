"""Exception hierarchy.

Every error raised on purpose by the library derives from HerlatError so
callers (and the CLI) can map failures to exit codes.
"""


class HerlatError(Exception):
    pass


class MalformedInput(HerlatError):
    """Input file or parameters could not be parsed."""


class InvalidInstance(HerlatError):
    """An instance violates one of its structural invariants."""


class InvalidParameters(HerlatError):
    pass


class NotASublattice(HerlatError):
    pass


class RankMismatch(HerlatError):
    pass


class EnumerationBudgetExceeded(HerlatError):
    pass


class ZeroDivisor(HerlatError):
    """A nonzero algebra element turned out not to be invertible."""


class SplitFailure(HerlatError):
    pass


class TypeMismatch(HerlatError):
    pass


class InternalBoundViolation(HerlatError):
    pass


class AdjointNotInAlgebra(HerlatError):
    pass


class NotPositive(HerlatError):
    pass


class GramSchmidtBreakdown(HerlatError):
    pass


class DegenerateBlock(HerlatError):
    pass


class DegenerateForm(HerlatError):
    """No perfect matching in the nonzero pattern of a psi-Gram."""


class BoundViolation(HerlatError):
    """An inequality that must hold by theory failed its exact check."""

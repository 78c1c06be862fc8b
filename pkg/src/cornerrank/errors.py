"""Exception hierarchy shared by every module in the package."""


class CornerRankError(Exception):
    """Base class for all errors raised by cornerrank."""


class InvalidInput(CornerRankError, ValueError):
    pass


class ShapeError(CornerRankError, ValueError):
    pass


class NotHermitian(CornerRankError, ValueError):
    pass


class NotPositiveDefinite(CornerRankError, ValueError):
    pass


class InvalidRank(CornerRankError, ValueError):
    pass


class NotAProjection(CornerRankError, ValueError):
    pass


class AmbiguousRank(CornerRankError):
    """A rank decision fell inside the singular-value gap band."""


class NotNormal(CornerRankError, ValueError):
    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class InvalidComparator(CornerRankError, ValueError):
    pass


class HypothesesNotMet(CornerRankError):
    pass


class OutOfScope(CornerRankError, ValueError):
    pass


class SearchExhausted(CornerRankError):
    pass


class InvalidTarget(CornerRankError, ValueError):
    pass


class PerturbationTooLarge(CornerRankError):
    pass


class AmbiguousChain(CornerRankError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NotCyclicWitness(CornerRankError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NumericalFailure(CornerRankError):
    pass


class FormatError(CornerRankError, ValueError):
    """Malformed cmtx input."""

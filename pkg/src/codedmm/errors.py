"""Exception hierarchy.

Every error raised by the package derives from :class:`CodedMMError`, which is
itself a ``ValueError`` so callers validating user input can catch either.
"""


class CodedMMError(ValueError):
    pass


class DimensionMismatch(CodedMMError):
    pass


class IndivisibleDimension(CodedMMError):
    pass


class NonFiniteEntry(CodedMMError):
    pass


class DuplicatePoints(CodedMMError):
    pass


class InsufficientEvaluations(CodedMMError):
    pass


class NonPositiveScale(CodedMMError):
    pass


class InvalidSampleSize(CodedMMError):
    pass


class DegenerateInput(CodedMMError):
    """All block products vanish, so the quantity asked for is undefined.

    ``sq_error`` carries the raw squared error when it is still meaningful
    (see :func:`codedmm.analysis.empirical_error`).
    """

    def __init__(self, msg, sq_error=None):
        super().__init__(msg)
        self.sq_error = sq_error


class InfiniteVariance(CodedMMError):
    pass


class BiasWarning(CodedMMError):
    """A custom distribution gives zero mass to a subset that carries signal."""


class NotEnoughWorkers(CodedMMError):
    pass


class InvalidThreshold(CodedMMError):
    pass


class ParseError(CodedMMError):
    pass


class ValidationError(CodedMMError):
    pass

"""Exception hierarchy.

Two families: :class:`ValidationError` for bad inputs or violated hypotheses,
and :class:`NumericalError` for factorization breakdowns. The CLI maps them to
exit codes 2 and 3 respectively.
"""


class ScreeningError(Exception):
    """Base class for every error raised by linscreen."""


class ValidationError(ScreeningError, ValueError):
    pass


class NumericalError(ScreeningError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ConstantColumn(ValidationError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} has zero variance")


class FingerprintMismatch(ValidationError):
    pass


class NonpositiveTau(ValidationError):
    pass


class BadSparsity(ValidationError):
    pass


class AsymmetricInput(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class BadSigns(ValidationError):
    pass


class BadDiagonal(ValidationError):
    pass


class IndexOverlap(ValidationError):
    pass


class HypothesisViolated(ValidationError):
    pass


class BadC0(ValidationError):
    pass


class BadParams(ValidationError):
    pass


class SingularGram(NumericalError):
    pass


class SingularSubmatrix(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass

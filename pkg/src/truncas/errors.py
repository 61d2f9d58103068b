"""Exception types shared across the package."""


class TruncasError(Exception):
    """Base class for all domain errors raised by this package."""


class RingMismatch(TruncasError):
    """Operands live in different rings or over different fields."""


class NonUnit(TruncasError):
    """Inversion of a series whose constant term is zero."""


class CompositionIllDefined(TruncasError):
    """Substitution of an image with nonzero constant term into a proper series."""


class InvalidCode(TruncasError):
    """A Hensel code that fails the simple-root conditions."""


class NotSimpleRoot(TruncasError):
    """Implicit solving at a root where the u-derivative vanishes."""


class PrecisionTooLow(TruncasError):
    """Input data is not certified to the order the operation needs."""


class TargetNotSolution(TruncasError):
    """An approximation target that does not solve the system."""


class NotRegular(TruncasError):
    """Divisor with no finite regularity order in the last variable."""


class NotTransverse(TruncasError):
    """Implicit linearization where the last-variable derivative vanishes at 0."""


class NonPolynomialImages(TruncasError):
    """An exact kernel computation was asked for with series images."""


class ProblemSyntaxError(TruncasError):
    """Problem-file parse failure, carrying a location."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where = f" ({where})"
        super().__init__(f"{message}{where}")

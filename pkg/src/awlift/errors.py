"""Exception hierarchy shared by all awlift modules."""

from __future__ import annotations


class AwliftError(Exception):
    """Base class for every error raised by awlift."""


class JetOrderError(AwliftError, ValueError):
    """Jets of different orders (or expansion points) were combined."""


class SingularPointError(AwliftError, ArithmeticError):
    """An expression or jet operation hit a singular point.

    ``point`` is filled in by whoever knows the evaluation point; jet
    operations only know the flat ``index`` of the first bad entry.
    """

    def __init__(self, message: str, point=None, index: int | None = None):
        super().__init__(message)
        self.message = message
        self.point = point
        self.index = index

    def __str__(self) -> str:
        if self.point is None:
            return self.message
        return f"{self.message} at z = {complex(self.point)!r}"


class DegeneratePointError(SingularPointError):
    """h' vanishes, so the lift chart is not locally injective."""


class ParseError(AwliftError, ValueError):
    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        super().__init__(message)
        self.message = message
        self.offset = offset
        self.expected = frozenset(expected)

    def __str__(self) -> str:
        s = f"{self.message} (byte offset {self.offset})"
        if self.expected:
            s += "; expected one of: " + ", ".join(sorted(self.expected))
        return s


class ExprSyntaxError(ParseError):
    pass


class UnknownIdentifierError(ParseError):
    pass


class ConjugationError(ParseError):
    """Complex conjugation would make the expression non-analytic."""


class SpecError(AwliftError, ValueError):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def __str__(self) -> str:
        if self.field is None:
            return self.message
        return f"field {self.field!r}: {self.message}"


class ConsistencyError(SpecError):
    """q^2 h' and g' disagree on the sample grid."""

    def __init__(self, message: str, worst_point: complex, residual: float):
        super().__init__(message, field="q")
        self.worst_point = worst_point
        self.residual = residual


class QuadratureError(AwliftError, RuntimeError):
    pass


class IllConditionedError(AwliftError, ValueError):
    pass


class InvariantViolation(AwliftError, RuntimeError):
    pass


class DomainError(AwliftError, ValueError):
    pass

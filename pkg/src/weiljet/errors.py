"""Exception hierarchy shared by every module.

Each class name doubles as the machine-readable error code printed by the CLI.
"""


class AlgebraError(Exception):
    """Base class for all engine errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class RingMismatch(AlgebraError, TypeError):
    pass


class SpecMismatch(AlgebraError, TypeError):
    pass


class UnknownVariable(AlgebraError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnboundVariable(UnknownVariable):
    pass


class NotInvertible(AlgebraError, ZeroDivisionError):
    pass


class NotAUnit(NotInvertible):
    pass


class DivisionByZero(NotInvertible):
    pass


class SingularQuotientError(AlgebraError):
    """A fraction of nilpotent elements that cannot be formed.

    ``condition`` names the violated requirement: ``"divisibility"`` when the
    numerator is not a multiple of the denominator, ``"annihilator"`` when the
    denominator is not a monomial times a unit.
    """

    condition = ""


class NotMonomialTimesUnit(SingularQuotientError):
    condition = "annihilator"


class NotDivisible(SingularQuotientError):
    condition = "divisibility"


class UnsupportedOperation(AlgebraError):
    pass


class ParseError(AlgebraError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class BasePointSingular(AlgebraError):
    pass


class SamplerExhausted(AlgebraError):
    pass

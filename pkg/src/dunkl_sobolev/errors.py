"""Exception types. The CLI maps each family onto an exit code."""


class DunklError(Exception):
    """Base class for all library errors."""


class ParameterError(DunklError, ValueError):
    """Parameters outside the supported regime (exit code 2)."""


class RegimeError(ParameterError):
    pass


class ParityError(ParameterError):
    pass


class DegeneracyError(ParameterError):
    """A sequence that must stay nonzero hit zero; ``index`` is the first bad one."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class PositivityError(DegeneracyError):
    pass


class DefinitenessError(DegeneracyError):
    pass


class SplitDegeneracyError(DegeneracyError):
    pass


class MomentMismatchError(ParameterError):
    pass


class UnsupportedTemplateError(ParameterError):
    pass


class QuadratureAccuracyError(DunklError, ArithmeticError):
    """Quadrature failed its doubling check (exit code 3)."""


class NumericalError(DunklError, ArithmeticError):
    pass


class DomainError(DunklError, ArithmeticError):
    pass


class ExprError(DunklError, ValueError):
    """Bad target-function expression (usage error, exit code 1)."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected one of: {', '.join(sorted(expected))})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class UnknownIdentifierError(ExprSyntaxError):
    pass

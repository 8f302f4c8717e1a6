"""Exception types raised by the risk-measure routines."""


class RiskError(Exception):
    """Base class; ``code`` is the short marker used in reports."""

    code = "RiskError"


class NonIntegrable(RiskError):
    code = "NonIntegrable"


class DegenerateTail(RiskError):
    code = "DegenerateTail"


class Divergent(RiskError):
    code = "Divergent"


class DomainError(RiskError, ValueError):
    code = "DomainError"


class UnsupportedKind(RiskError):
    code = "UnsupportedKind"


class EmptySample(RiskError, ValueError):
    code = "EmptySample"


class WitnessNotFound(RiskError):
    code = "WitnessNotFound"


class InfeasibleDensity(RiskError):
    code = "InfeasibleDensity"


class ClassMismatch(RiskError):
    code = "ClassMismatch"


class ParseError(RiskError, ValueError):
    code = "ParseError"

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ValidationError(RiskError, ValueError):
    code = "ValidationError"

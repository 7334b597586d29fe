"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class ApwError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ParseError(ApwError):
    exit_code = 2


class DomainError(ApwError, ValueError):
    exit_code = 3


class DimensionError(DomainError):
    pass


class BasisError(DomainError):
    pass


class UnsupportedRankError(ApwError):
    """Spectra generate a group of rank >= 2 (not commensurable)."""

    exit_code = 4


class NotInvertibleError(ApwError):
    """Symbol vanishes (numerically) somewhere on the torus."""

    exit_code = 5


class InfeasibleError(ApwError):
    exit_code = 6


class CompletionError(ApwError):
    exit_code = 7


class CoprimenessError(ApwError):
    exit_code = 7


class InconsistencyError(ApwError):
    exit_code = 7


class ConditioningError(ApwError):
    exit_code = 7

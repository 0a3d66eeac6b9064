"""Exception hierarchy shared by the library and the CLI exit-code table."""


class SievelabError(Exception):
    """Base class for every error raised by sievelab."""

    exit_code = 1


class DomainError(SievelabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 2


class PreconditionError(DomainError):
    """A documented hypothesis of an operation does not hold."""


class ResourceError(SievelabError):
    """The request exceeds an enumeration, memory or precision budget."""

    exit_code = 3


class InvariantViolation(SievelabError, AssertionError):
    """An invariant that should be impossible to break was broken (bug trap)."""

    exit_code = 4


class NumericError(SievelabError, ArithmeticError):
    """A numerical procedure failed to reach its requested accuracy."""

    exit_code = 3

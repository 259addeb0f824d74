"""Exception hierarchy shared by every layer of the toolkit."""

from __future__ import annotations


class SignatureError(Exception):
    """Base class for all errors raised by modsig."""


class InvalidSizeError(SignatureError, ValueError):
    """A component count is zero, negative, or above a storage cap."""


class InvalidParameterError(SignatureError, ValueError):
    """An argument is outside the domain of the operation."""


class InvalidSystemError(SignatureError, ValueError):
    """A modular system is inconsistent (block sizes, arities, coverage)."""


class DomainError(SignatureError, ValueError):
    """The input is well formed but outside the semicoherent domain."""


class ParseError(SignatureError):
    """Syntax error in a structure expression or input file."""

    def __init__(self, message: str, line: int = 1, column: int = 1, source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class ValidationError(SignatureError):
    """Input parsed but describes an inconsistent system, partition or distribution."""

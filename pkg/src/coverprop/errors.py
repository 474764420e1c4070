"""Shared exception types."""


class ParseError(ValueError):
    """Raised on malformed DIMACS input; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ContradictionError(RuntimeError):
    """Raised when simplification or message passing derives an inconsistency."""

"""Exception types shared across the library."""


class NevoError(Exception):
    """Base class for all library errors."""


class ParseError(NevoError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ContractError(NevoError):
    """A documented precondition was violated by the caller or the data."""

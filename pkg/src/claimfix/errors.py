class ClaimfixError(Exception):
    """Base class for data and contract errors raised by this package."""


class ParseError(ClaimfixError):
    """Malformed text input. Carries a location (line, offset or token index)."""

    def __init__(self, message, *, line=None, offset=None, token=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        if token is not None:
            where.append(f"token {token}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.offset = offset
        self.token = token


class ContractError(ClaimfixError, ValueError):
    """A caller violated an operation's precondition."""


class DataError(ClaimfixError):
    """Input data is inconsistent or incomplete."""


class ConfigError(ClaimfixError):
    """Components were configured inconsistently (bad answer key, dimension mismatch)."""


class TrainingError(ClaimfixError):
    pass


class ProtocolError(ClaimfixError):
    """An evaluation would leak training data into the test set."""

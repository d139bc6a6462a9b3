"""Exception hierarchy shared by the library and the command line."""


class SeifertFloerError(Exception):
    """Base class for every error raised on purpose by this package."""


class DomainError(SeifertFloerError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ContractError(SeifertFloerError, ValueError):
    """A documented precondition of an operation was violated by the caller."""


class ParseError(SeifertFloerError, ValueError):
    """A manifold description does not follow the input grammar."""


class UnsupportedError(SeifertFloerError):
    """Valid input that the library deliberately does not handle."""


class ConsistencyError(SeifertFloerError):
    """Two independent computations of the same quantity disagree.

    ``witnesses`` keeps both sides so that callers can print them.
    """

    def __init__(self, message, **witnesses):
        super().__init__(message)
        self.witnesses = witnesses

    def __str__(self):
        base = super().__str__()
        if not self.witnesses:
            return base
        details = "; ".join(f"{k}={v!r}" for k, v in sorted(self.witnesses.items()))
        return f"{base} ({details})"

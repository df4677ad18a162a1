"""Exception hierarchy shared across the package."""

from __future__ import annotations


class KgchainError(Exception):
    """Base class for every error raised by this package."""


class GraphLoadError(KgchainError):
    """A graph source line could not be parsed.

    Carries the 1-based line number and the offending line text.
    """

    def __init__(self, message: str, line_no: int | None = None, line: str | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
            if line is not None:
                message += f" (offending content: {line!r})"
        super().__init__(message)
        self.line_no = line_no
        self.line = line


class DslParseError(KgchainError):
    """Traversal program text violates the grammar or structural rules."""

    def __init__(self, message: str, line: int, col: int, expected: str | None = None):
        loc = f"{line}:{col}: {message}"
        if expected:
            loc += f" (expected {expected})"
        super().__init__(loc)
        self.line = line
        self.col = col
        self.expected = expected


class DslUsageError(KgchainError):
    """A program was executed without passing validation first."""


class PlanError(KgchainError):
    """A sub-problem plan violates its structural invariants."""


class UnresolvedPlaceholderError(KgchainError):
    """A sub-question references a dependency answer that is not available."""

    def __init__(self, placeholder: str):
        super().__init__(f"unresolved placeholder {{{placeholder}}}")
        self.placeholder = placeholder


class ProviderError(KgchainError):
    """Base class for completion-provider failures; carries the attempt count."""

    def __init__(self, message: str, attempts: int):
        super().__init__(f"{message} (after {attempts} attempt{'s' if attempts != 1 else ''})")
        self.attempts = attempts


class TransportError(ProviderError):
    """Network-level failure talking to a live provider."""


class RequestTimeoutError(ProviderError):
    """The provider did not answer within the configured timeout."""


class HttpStatusError(ProviderError):
    """The provider answered with a non-2xx status."""

    def __init__(self, message: str, attempts: int, status: int):
        super().__init__(message, attempts)
        self.status = status


class MissingContentError(ProviderError):
    """A 2xx response did not contain assistant message content."""


class ConfigError(KgchainError):
    """A run configuration file is invalid."""


class DatasetError(KgchainError):
    """A QA dataset violates the record format."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class EvalError(KgchainError):
    """The evaluation harness was invoked with unusable inputs."""

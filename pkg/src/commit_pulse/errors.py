"""Exception hierarchy shared by the library, the service, and the CLI.

Every error carries a stable ``code`` string; the HTTP layer and the CLI
exit-code table key off it instead of exception identity.
"""

from __future__ import annotations


class CommitPulseError(Exception):
    """Base class for all commit-pulse errors."""

    code = "error"


class ParseError(CommitPulseError):
    """A commit export could not be parsed."""

    code = "parse_error"

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line is not None else ""
        suffix = f" (field: {field})" if field else ""
        super().__init__(f"{prefix}{message}{suffix}")


class DegenerateSpanError(CommitPulseError):
    """The analysis span is too short for the requested bucketing."""

    code = "degenerate_span"


class EmptySeriesError(CommitPulseError):
    """An operation that needs at least one bucket got none."""

    code = "empty_series"


class EmptyCohortError(CommitPulseError):
    """Cohort aggregation over zero repositories."""

    code = "empty_cohort"


class ContractViolation(CommitPulseError):
    """Caller broke a documented precondition."""

    code = "contract_violation"


class InvalidMetadataError(CommitPulseError):
    """Repository metadata is internally inconsistent."""

    code = "invalid_metadata"


class RemoteError(CommitPulseError):
    """Remote commit API failed in a non-recoverable way."""

    code = "remote_error"


class UnknownRepoError(RemoteError):
    """The remote API does not know the requested repository."""

    code = "unknown_repo"


class AuthError(RemoteError):
    """The remote API rejected our credentials."""

    code = "auth_error"


class BudgetExceededError(RemoteError):
    """Rate-limit waits exceeded the configured wall-clock budget."""

    code = "budget_exceeded"

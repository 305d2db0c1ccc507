"""Exception hierarchy shared by every memgrain module.

Each error carries a stable machine-readable ``code`` so the HTTP layer
can map domain failures onto (status, code) pairs without string matching.
"""

from __future__ import annotations


class MemgrainError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}


class EmptyContent(MemgrainError):
    code = "empty_content"


class UnknownType(MemgrainError):
    code = "unknown_type"


class ClockOutOfRange(MemgrainError):
    code = "clock_out_of_range"


class DimensionMismatch(MemgrainError):
    code = "dimension_mismatch"


class NotFound(MemgrainError):
    code = "not_found"


class IllegalTransition(MemgrainError):
    code = "illegal_transition"


class AlreadyResolved(MemgrainError):
    code = "already_resolved"


class InvalidRange(MemgrainError):
    code = "invalid_range"


class FutureDate(MemgrainError):
    code = "future_date"


class StorageFailure(MemgrainError):
    code = "storage_failure"


class CorruptLog(MemgrainError):
    code = "corrupt_log"

    def __init__(self, message: str, seq: int, detail: dict | None = None):
        super().__init__(message, detail)
        self.seq = seq


class ExternalUnavailable(MemgrainError):
    code = "external_unavailable"


class LlmUnavailable(MemgrainError):
    code = "llm_unavailable"

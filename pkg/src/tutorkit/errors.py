"""Typed errors shared across the service.

Every error carries a stable ``error_code`` so the HTTP layer (and any
other adapter) can map failures to machine-readable bodies without
string matching.
"""

from __future__ import annotations

from typing import Any


class TutorError(Exception):
    """Base class for all service errors."""

    error_code = "error"

    def __init__(self, message: str, *, details: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.details: dict[str, Any] = details or {}


class ValidationError(TutorError):
    """A draft or payload violates an invariant.

    ``field_errors`` is a list of ``{"field": <path>, "message": <why>}``
    entries, one per violated invariant.
    """

    error_code = "validation_error"

    def __init__(self, field_errors: list[dict[str, str]], *, message: str | None = None) -> None:
        self.field_errors = field_errors
        summary = message or "; ".join(f"{e['field']}: {e['message']}" for e in field_errors)
        super().__init__(summary, details={"field_errors": field_errors})

    @classmethod
    def single(cls, field: str, message: str) -> "ValidationError":
        return cls([{"field": field, "message": message}])


class NotFound(TutorError):
    error_code = "not_found"

    def __init__(self, kind: str, identifier: str) -> None:
        super().__init__(f"{kind} {identifier!r} not found", details={"kind": kind, "id": identifier})


class DanglingReference(TutorError):
    """A related-question link points at a missing or deleted question."""

    error_code = "dangling_reference"

    def __init__(self, unresolved: list[str]) -> None:
        super().__init__(
            f"unresolved related question ids: {', '.join(sorted(unresolved))}",
            details={"unresolved": sorted(unresolved)},
        )


class OrderingError(TutorError):
    """Submitted-at precedes opened-at; the client clock is lying."""

    error_code = "ordering_error"


class PayloadShapeError(TutorError):
    """Answer payload does not match the question kind."""

    error_code = "payload_shape_error"


class AttemptLimitExceeded(TutorError):
    error_code = "attempt_limit_exceeded"

    def __init__(self, question_id: str, limit: int, *, explanation: str = "") -> None:
        super().__init__(
            f"attempt limit {limit} reached for question {question_id!r}",
            details={"question_id": question_id, "limit": limit, "explanation": explanation},
        )
        self.explanation = explanation


class ProviderError(TutorError):
    """The completion provider failed (timeout, auth, malformed reply)."""

    error_code = "provider_error"

    def __init__(self, message: str, *, kind: str = "unknown") -> None:
        super().__init__(message, details={"kind": kind})
        self.kind = kind


class AuthError(TutorError):
    error_code = "auth_error"


class RangeError(TutorError):
    """A Likert value falls outside the questionnaire scale."""

    error_code = "range_error"


class MissingResponse(TutorError):
    """A questionnaire submission skipped required items."""

    error_code = "missing_response"

    def __init__(self, missing_items: list[str], *, respondent: int | None = None) -> None:
        details: dict[str, Any] = {"missing_items": sorted(missing_items)}
        if respondent is not None:
            details["respondent"] = respondent
        super().__init__(f"unanswered items: {', '.join(sorted(missing_items))}", details=details)

"""Identifier stripping for everything that leaves the service.

Two mechanisms:

- structured identifier fields (student_id, display name, email) are
  replaced by opaque per-student tokens derived with a keyed hash of a
  store-local salt, so the token carries no derivable personal
  information and stays stable within a deployment;
- free text is scanned for email and phone patterns, which are replaced
  with fixed placeholders.

Both operations are idempotent: the placeholders and tokens never match
the patterns, so redacting twice is a no-op.
"""

from __future__ import annotations

import hashlib
import hmac
import re
from typing import Any, Mapping

EMAIL_PLACEHOLDER = "[REDACTED_EMAIL]"
PHONE_PLACEHOLDER = "[REDACTED_PHONE]"

_EMAIL_RE = re.compile(r"\b[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}\b")
# Phone forms: +1-555-123-4567, (555) 123-4567, 555.123.4567, 5551234567.
_PHONE_RE = re.compile(
    r"(?:\+?\d{1,2}[\s.-]?)?(?:\(\d{3}\)|\d{3})[\s.-]?\d{3}[\s.-]?\d{4}\b"
)

# Fields whose values are identifiers, not content.
IDENTIFIER_FIELDS = frozenset(
    {"student_id", "name", "display_name", "student_name", "email"}
)

_TOKEN_RE = re.compile(r"^stu-[0-9a-f]{12}$")


def redact_text(text: str) -> str:
    """Replace email and phone patterns with fixed placeholders."""
    text = _EMAIL_RE.sub(EMAIL_PLACEHOLDER, text)
    text = _PHONE_RE.sub(PHONE_PLACEHOLDER, text)
    return text


def contains_pii(text: str) -> bool:
    return bool(_EMAIL_RE.search(text) or _PHONE_RE.search(text))


class Pseudonymizer:
    """Stable opaque tokens for student identifiers.

    Tokens are HMAC-SHA256 over the store salt, truncated; they cannot be
    reversed to the identifier without the salt.
    """

    def __init__(self, salt: str) -> None:
        self._salt = salt.encode("utf-8")

    def token_for(self, student_id: str) -> str:
        digest = hmac.new(self._salt, student_id.encode("utf-8"), hashlib.sha256).hexdigest()
        return f"stu-{digest[:12]}"

    @staticmethod
    def looks_like_token(value: str) -> bool:
        return bool(_TOKEN_RE.match(value))


def redact_record(record: Mapping[str, Any], token: str) -> dict[str, Any]:
    """Replace identifier fields with the student's opaque token and scrub
    free-text fields; nested mappings are handled recursively."""
    cleaned: dict[str, Any] = {}
    for key, value in record.items():
        if key in IDENTIFIER_FIELDS:
            cleaned[key] = token
        elif isinstance(value, str):
            cleaned[key] = redact_text(value)
        elif isinstance(value, Mapping):
            cleaned[key] = redact_record(value, token)
        elif isinstance(value, list):
            cleaned[key] = [
                redact_record(v, token)
                if isinstance(v, Mapping)
                else redact_text(v)
                if isinstance(v, str)
                else v
                for v in value
            ]
        else:
            cleaned[key] = value
    return cleaned


def redact(value, token: str = ""):
    """Dispatch: strings get pattern scrubbing, mappings get field
    replacement plus pattern scrubbing."""
    if isinstance(value, str):
        return redact_text(value)
    if isinstance(value, Mapping):
        return redact_record(value, token)
    raise TypeError(f"cannot redact {type(value).__name__}")

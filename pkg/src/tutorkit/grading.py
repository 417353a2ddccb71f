"""Answer grading.

Choice kinds are graded locally as pure set equality against the answer
key: no partial credit, identical inputs always yield identical
verdicts. Short answers go to the completion provider, which must reply
with a JSON verdict ``{"correct": bool, "explanation": str,
"misconception_label": str|null}``; a malformed reply gets exactly one
retry with a JSON-only directive, after which the attempt is ungradable
and a ProviderError surfaces (never a silently fabricated score).
"""

from __future__ import annotations

import json
import re
from typing import Iterable

from .errors import PayloadShapeError, ProviderError
from .models import (
    AnswerPayload,
    CHOICE_KINDS,
    GradeVerdict,
    Question,
    QuestionKind,
)
from .providers import CompletionProvider
from .redaction import redact_text

GRADER_SYSTEM_DIRECTIVES = (
    "You are grading one student's short answer. Judge semantic correctness "
    "against the reference answer and the instructor's context; phrasing "
    "differences do not matter. Reply with a single JSON object and nothing "
    'else: {"correct": true|false, "explanation": "<one or two sentences>", '
    '"misconception_label": "<short label for the error, or null>"}. '
    "The explanation must not quote the reference answer verbatim."
)

JSON_RETRY_DIRECTIVE = (
    " Your previous reply was not valid JSON. Reply with valid JSON only, "
    "matching the schema exactly."
)

_JSON_OBJECT_RE = re.compile(r"\{[\s\S]*\}")


def canonicalize_payload(question: Question, payload) -> AnswerPayload:
    """Validate payload shape against the question kind.

    Choice kinds take a set of known option keys (exactly one for
    single_choice/true_false, any subset for multiple_choice); short
    answers take nonempty free text.
    """
    if question.kind in CHOICE_KINDS:
        if isinstance(payload, str) or not isinstance(payload, Iterable):
            raise PayloadShapeError(
                f"{question.kind.value} expects a set of option keys"
            )
        keys = frozenset(str(k) for k in payload)
        known = {opt.key for opt in question.options}
        unknown = keys - known
        if unknown:
            raise PayloadShapeError(
                f"unknown option keys: {', '.join(sorted(unknown))}"
            )
        if question.kind in (QuestionKind.SINGLE_CHOICE, QuestionKind.TRUE_FALSE):
            if len(keys) != 1:
                raise PayloadShapeError(
                    f"{question.kind.value} expects exactly one selected key"
                )
        return keys
    # short answer
    if not isinstance(payload, str):
        raise PayloadShapeError("short_answer expects free text")
    if not payload.strip():
        raise PayloadShapeError("short_answer text must be nonempty")
    return payload


def grade(
    question: Question,
    payload: AnswerPayload,
    *,
    provider: CompletionProvider | None = None,
    temperature: float = 0.0,
) -> tuple[bool, GradeVerdict | None]:
    """Grade a canonicalized payload. Returns (correct, verdict); the
    verdict is present only for provider-judged short answers."""
    if question.kind in CHOICE_KINDS:
        return payload == question.answer_key, None
    if provider is None:
        raise ProviderError("short-answer grading requires a provider", kind="unconfigured")
    verdict = _grade_short_answer(question, payload, provider, temperature)
    return verdict.correct, verdict


def _grading_prompt(question: Question, answer_text: str) -> str:
    parts = [
        f"Question: {question.body}",
    ]
    if question.context:
        parts.append(f"Instructor context: {question.context}")
    parts.append(f"Reference answer: {question.reference_answer}")
    parts.append(f"Student answer: {redact_text(answer_text)}")
    return "\n".join(parts)


def _grade_short_answer(
    question: Question,
    answer_text: str,
    provider: CompletionProvider,
    temperature: float,
) -> GradeVerdict:
    user = _grading_prompt(question, answer_text)
    reply = provider.complete(GRADER_SYSTEM_DIRECTIVES, user, temperature=temperature)
    verdict = _parse_verdict(reply)
    if verdict is None:
        reply = provider.complete(
            GRADER_SYSTEM_DIRECTIVES + JSON_RETRY_DIRECTIVE, user, temperature=temperature
        )
        verdict = _parse_verdict(reply)
    if verdict is None:
        raise ProviderError(
            "grader returned malformed JSON twice; attempt is ungradable", kind="malformed"
        )
    return verdict


def _parse_verdict(reply: str) -> GradeVerdict | None:
    match = _JSON_OBJECT_RE.search(reply)
    if match is None:
        return None
    try:
        data = json.loads(match.group(0))
    except json.JSONDecodeError:
        return None
    if not isinstance(data, dict) or not isinstance(data.get("correct"), bool):
        return None
    explanation = data.get("explanation")
    if not isinstance(explanation, str):
        return None
    if not data["correct"] and not explanation.strip():
        # an incorrect verdict with no explanation is unusable feedback
        return None
    label = data.get("misconception_label")
    if label is not None and not isinstance(label, str):
        return None
    return GradeVerdict(
        correct=data["correct"],
        explanation=explanation,
        misconception_label=label if label and label.strip() else None,
    )

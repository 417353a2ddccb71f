"""Layered prompt construction for hint generation.

A prompt bundle carries ordered labeled sections:

    SYSTEM_DIRECTIVES, CURRENT_ITEM, INSTRUCTOR_CONTEXT,
    ERROR_HISTORY, RELATED_CONTEXT

SYSTEM_DIRECTIVES is always present and always forbids disclosing the
solution. ERROR_HISTORY appears only when the learner has prior
incorrect attempts. The answer key and reference answer are never
serialized into any section; the instructor explanation is included
purely as grounding, under an explicit never-quote directive.

The rendered wire format (one system message, the remaining sections
concatenated under ``--- LABEL ---`` delimiters) is documented in
docs/api.md and pinned by a golden test.
"""

from __future__ import annotations

from .models import (
    ErrorHistory,
    PromptBundle,
    PromptSection,
    Question,
    RecurringMisconception,
    SectionLabel,
)
from .redaction import redact_text

SECTION_DELIMITER = "--- {label} ---"

MAX_SPECIFICITY_LEVEL = 3

NO_DISCLOSURE_DIRECTIVE = (
    "Never reveal, quote, spell out, or confirm the correct answer, the "
    "correct option, or the reference solution, even if asked directly."
)

STYLE_DIRECTIVE = (
    "You are a Socratic tutor. Guide the student toward the reasoning with "
    "questions and nudges; be concise and encouraging."
)

NO_QUOTE_SOLUTION_DIRECTIVE = (
    "The instructor notes below are background for you alone; never quote "
    "the solution or restate it in recognizable form."
)

NO_REPEAT_DIRECTIVE = (
    "Do not repeat prior hints; each hint must add something new."
)

STRENGTHENED_DIRECTIVE = (
    "Your previous reply disclosed answer content. Rewrite the hint so it "
    "contains no fragment of the correct answer, option text, or solution."
)

# Level 3 strictly extends level 2: persistent misconceptions earn
# step-level scaffolding on top of the targeted treatment.
_LEVEL_2_DIRECTIVE = (
    "Specificity level 2: directly address the student's recurring "
    "misconception by name and explain why that line of thinking fails, "
    "without stating the correct answer."
)
LEVEL_DIRECTIVES = {
    1: (
        "Specificity level 1: offer a single conceptual nudge that points at "
        "the relevant idea; no procedures, no elimination of options."
    ),
    2: _LEVEL_2_DIRECTIVE,
    3: _LEVEL_2_DIRECTIVE
    + (
        " Then scaffold the reasoning step by step: name each intermediate "
        "step the student should carry out and the check that validates it, "
        "still excluding the answer itself."
    ),
}


def specificity_for(
    error_history: ErrorHistory,
    recurring_tags: list[RecurringMisconception],
    *,
    cap: int = MAX_SPECIFICITY_LEVEL,
) -> int:
    """Hint specificity: 1 + prior incorrect attempts on the focal
    question, clamped to [1, cap]; any recurring tag forces at least 2."""
    prior_errors = len(error_history.on_focal_question())
    level = max(1, min(1 + prior_errors, cap))
    if recurring_tags:
        level = max(level, min(2, cap))
    return level


def build_prompt(
    question: Question,
    bundle_related: list[Question],
    instructor_context: str,
    error_history: ErrorHistory,
    recurring_tags: list[RecurringMisconception],
    specificity_level: int,
    *,
    temperature: float = 0.2,
    current_answer: str | None = None,
) -> PromptBundle:
    if not 1 <= specificity_level <= MAX_SPECIFICITY_LEVEL:
        raise ValueError(f"specificity_level must be in 1..{MAX_SPECIFICITY_LEVEL}")

    sections = [
        PromptSection(
            SectionLabel.SYSTEM_DIRECTIVES,
            _system_directives(question, error_history, specificity_level),
        ),
        PromptSection(SectionLabel.CURRENT_ITEM, _current_item(question, current_answer)),
    ]

    context_text = _instructor_context(question, instructor_context)
    if context_text:
        sections.append(PromptSection(SectionLabel.INSTRUCTOR_CONTEXT, context_text))

    if error_history.entries:
        sections.append(
            PromptSection(
                SectionLabel.ERROR_HISTORY,
                _error_history(question, error_history, recurring_tags),
            )
        )

    if bundle_related:
        sections.append(
            PromptSection(SectionLabel.RELATED_CONTEXT, _related_context(bundle_related))
        )

    return PromptBundle(
        sections=sections, specificity_level=specificity_level, temperature=temperature
    )


def render_system(bundle: PromptBundle) -> str:
    content = bundle.section(SectionLabel.SYSTEM_DIRECTIVES)
    if content is None:
        raise ValueError("bundle is missing SYSTEM_DIRECTIVES")
    return content


def render_user(bundle: PromptBundle) -> str:
    """Concatenate the non-system sections under labeled delimiters."""
    blocks = [
        f"{SECTION_DELIMITER.format(label=sec.label.value)}\n{sec.content}"
        for sec in bundle.sections
        if sec.label != SectionLabel.SYSTEM_DIRECTIVES
    ]
    return "\n\n".join(blocks)


def _system_directives(question: Question, history: ErrorHistory, level: int) -> str:
    lines = [STYLE_DIRECTIVE, NO_DISCLOSURE_DIRECTIVE, LEVEL_DIRECTIVES[level]]
    if question.explanation or question.context:
        lines.append(NO_QUOTE_SOLUTION_DIRECTIVE)
    if any(e.hint_text for e in history.entries):
        lines.append(NO_REPEAT_DIRECTIVE)
    return "\n".join(lines)


def _current_item(question: Question, current_answer: str | None) -> str:
    lines = [
        f"Kind: {question.kind.value}",
        f"Topic: {question.topic} / {question.sub_topic}",
        f"Question: {question.body}",
    ]
    if question.options:
        lines.append("Options:")
        lines.extend(f"  {opt.key}. {opt.text}" for opt in question.options)
    if current_answer is not None:
        lines.append(f"Student's current (incorrect) answer: {redact_text(current_answer)}")
    return "\n".join(lines)


def _instructor_context(question: Question, instructor_context: str) -> str:
    lines = []
    if instructor_context.strip():
        lines.append(f"Context: {redact_text(instructor_context)}")
    if question.explanation.strip():
        lines.append(
            "Instructor solution notes (grounding only, never quote): "
            + redact_text(question.explanation)
        )
    return "\n".join(lines)


def _error_history(
    question: Question,
    history: ErrorHistory,
    recurring_tags: list[RecurringMisconception],
) -> str:
    lines = []
    for entry in history.entries:
        where = "this question" if entry.question_id == question.id else f"related question {entry.question_id}"
        line = f"Attempt {entry.attempt_ordinal} on {where}: answered {redact_text(entry.wrong_answer)!r}"
        if entry.hint_text:
            lines.append(line + f"; hint given: {redact_text(entry.hint_text)}")
        else:
            lines.append(line)
    for rec in recurring_tags:
        where = (
            "this question"
            if rec.tag.question_id == question.id
            else f"related question {rec.tag.question_id}"
        )
        lines.append(
            f"Recurring misconception on {where}: the wrong answer "
            f"{redact_text(rec.tag.signature)!r} has been given {rec.count} times."
        )
    return "\n".join(lines)


def _related_context(related: list[Question]) -> str:
    lines = []
    for q in related:
        lines.append(f"Related question ({q.topic} / {q.sub_topic}): {q.body}")
    return "\n".join(lines)

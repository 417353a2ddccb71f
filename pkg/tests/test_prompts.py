from __future__ import annotations

import random
from pathlib import Path

import pytest

from tutorkit.models import (
    ErrorHistory,
    ErrorHistoryEntry,
    MisconceptionTag,
    QuestionKind,
    RecurringMisconception,
    SectionLabel,
)
from tutorkit.prompts import (
    LEVEL_DIRECTIVES,
    NO_DISCLOSURE_DIRECTIVE,
    build_prompt,
    render_system,
    render_user,
    specificity_for,
)

from conftest import at, draft

GOLDEN = Path(__file__).parent / "golden" / "prompt_bundle.txt"


def _history(question_id: str, entries):
    return ErrorHistory(question_id=question_id, entries=list(entries))


def _entry(question_id: str, ordinal: int, wrong: str, hint: str | None = None):
    return ErrorHistoryEntry(
        attempt_id=f"a{ordinal}",
        question_id=question_id,
        attempt_ordinal=ordinal,
        wrong_answer=wrong,
        hint_text=hint,
        submitted_at=at(ordinal * 10),
    )


def _recurring(question_id: str, signature: str, count: int = 2):
    return RecurringMisconception(
        tag=MisconceptionTag(question_id, signature), count=count, first_seen=at(0)
    )


@pytest.fixture
def question(content, course):
    return content.upsert_question(
        course.id,
        draft(
            answer_key={"B"},
            explanation="The tandem axle halves the per-axle stress.",
            context="Students confuse axle count with total load.",
        ),
    )


def test_fresh_student_gets_three_sections_level_one(question):
    bundle = build_prompt(question, [], question.context, _history(question.id, []), [], 1)
    assert bundle.labels == [
        SectionLabel.SYSTEM_DIRECTIVES,
        SectionLabel.CURRENT_ITEM,
        SectionLabel.INSTRUCTOR_CONTEXT,
    ]
    assert bundle.specificity_level == 1
    assert NO_DISCLOSURE_DIRECTIVE in bundle.section(SectionLabel.SYSTEM_DIRECTIVES)


def test_error_history_present_iff_prior_errors(question):
    with_history = build_prompt(
        question, [], "", _history(question.id, [_entry(question.id, 1, "C")]), [], 2
    )
    assert SectionLabel.ERROR_HISTORY in with_history.labels
    without = build_prompt(question, [], "", _history(question.id, []), [], 1)
    assert SectionLabel.ERROR_HISTORY not in without.labels


def test_sections_keep_fixed_order(question, content, course):
    related = content.upsert_question(course.id, draft(body="related body"))
    bundle = build_prompt(
        question,
        [related],
        question.context,
        _history(question.id, [_entry(question.id, 1, "C", "prior hint")]),
        [_recurring(question.id, "C")],
        2,
    )
    assert bundle.labels == [
        SectionLabel.SYSTEM_DIRECTIVES,
        SectionLabel.CURRENT_ITEM,
        SectionLabel.INSTRUCTOR_CONTEXT,
        SectionLabel.ERROR_HISTORY,
        SectionLabel.RELATED_CONTEXT,
    ]


def test_recurring_misconception_named_in_history_section(question):
    bundle = build_prompt(
        question,
        [],
        "",
        _history(question.id, [_entry(question.id, 1, "C"), _entry(question.id, 2, "C")]),
        [_recurring(question.id, "C", 2)],
        2,
    )
    section = bundle.section(SectionLabel.ERROR_HISTORY)
    assert "'C'" in section and "2 times" in section
    assert "Recurring misconception" in section


def test_prior_hints_included_with_no_repeat_directive(question):
    bundle = build_prompt(
        question,
        [],
        "",
        _history(question.id, [_entry(question.id, 1, "C", "think about axles")]),
        [],
        2,
    )
    assert "think about axles" in bundle.section(SectionLabel.ERROR_HISTORY)
    assert "Do not repeat prior hints" in bundle.section(SectionLabel.SYSTEM_DIRECTIVES)


def test_level_directives_escalate_and_level3_extends_level2():
    assert LEVEL_DIRECTIVES[3].startswith(LEVEL_DIRECTIVES[2])
    assert len(LEVEL_DIRECTIVES[3]) > len(LEVEL_DIRECTIVES[2])
    assert LEVEL_DIRECTIVES[1] != LEVEL_DIRECTIVES[2]


def test_explanation_included_as_grounding_with_never_quote(question):
    bundle = build_prompt(question, [], question.context, _history(question.id, []), [], 1)
    context = bundle.section(SectionLabel.INSTRUCTOR_CONTEXT)
    assert "tandem axle halves" in context.lower()
    assert "never quote" in bundle.section(SectionLabel.SYSTEM_DIRECTIVES).lower()


def test_specificity_formula():
    h = _history("q", [])
    assert specificity_for(h, []) == 1
    assert specificity_for(_history("q", [_entry("q", 1, "C")]), []) == 2
    assert specificity_for(_history("q", [_entry("q", i, "C") for i in range(1, 6)]), []) == 3


def test_specificity_counts_only_focal_question():
    h = _history("q", [_entry("other", 1, "C"), _entry("other", 2, "D")])
    assert specificity_for(h, []) == 1


def test_recurring_tag_forces_at_least_two():
    assert specificity_for(_history("q", []), [_recurring("related-q", "C")]) == 2


def test_specificity_monotone_and_clamped():
    for tags in ([], [_recurring("q", "C")]):
        levels = [
            specificity_for(_history("q", [_entry("q", i + 1, "C") for i in range(n)]), tags)
            for n in range(11)
        ]
        assert levels == sorted(levels)
        assert all(1 <= lvl <= 3 for lvl in levels)
        assert levels[-1] == 3


def test_bundle_never_serializes_answer_key_or_reference(content, course):
    """String-absence scan across 1,000 randomized bundles: the rendered
    prompt must never contain the answer-key declaration or the
    reference-answer text."""
    rng = random.Random(99)
    sentinel_ref = "SENTINEL-REFERENCE-ANSWER-73"
    questions = []
    for i in range(20):
        kind = rng.choice(
            [QuestionKind.SINGLE_CHOICE, QuestionKind.MULTIPLE_CHOICE, QuestionKind.TRUE_FALSE, QuestionKind.SHORT_ANSWER]
        )
        if kind == QuestionKind.SHORT_ANSWER:
            d = draft(kind, body=f"describe concept {i}", reference_answer=sentinel_ref, explanation="notes")
        elif kind == QuestionKind.TRUE_FALSE:
            d = draft(kind, body=f"statement {i}", answer_key={rng.choice("TF")}, explanation="notes")
        else:
            keys = "ABCD"
            key = {rng.choice(keys)} if kind == QuestionKind.SINGLE_CHOICE else {k for k in keys if rng.random() < 0.5} or {"A"}
            d = draft(kind, body=f"choose for {i}", answer_key=key, explanation="notes")
        questions.append(content.upsert_question(course.id, d))

    for n in range(1000):
        q = rng.choice(questions)
        wrong = [
            _entry(q.id, j + 1, rng.choice(["C", "A+B", "a free text answer"]))
            for j in range(rng.randrange(0, 4))
        ]
        tags = [_recurring(q.id, "C")] if rng.random() < 0.3 else []
        level = specificity_for(_history(q.id, wrong), tags)
        bundle = build_prompt(
            q, [], q.context, _history(q.id, wrong), tags, level, current_answer="C"
        )
        rendered = render_system(bundle) + "\n" + render_user(bundle)
        assert sentinel_ref not in rendered
        assert "answer_key" not in rendered
        assert "Correct answer:" not in rendered
        key_decl = "answer is " + "+".join(sorted(q.answer_key))
        assert key_decl.lower() not in rendered.lower()


def test_rendered_format_matches_golden(content, course):
    related = content.upsert_question(course.id, draft(body="How does load spread through layers?"))
    q = content.upsert_question(
        course.id,
        draft(
            question_id="q-golden",
            answer_key={"B"},
            body="Which configuration lowers per-axle pavement stress?",
            explanation="The tandem axle halves the per-axle stress.",
            context="Students confuse axle count with total load.",
            related={related.id},
        ),
    )
    # re-fetch so related ordering is the stored one
    bundle = build_prompt(
        q,
        [related],
        q.context,
        _history(
            q.id,
            [_entry(q.id, 1, "C", "Start from how the load divides."),
             _entry(q.id, 2, "C")],
        ),
        [_recurring(q.id, "C", 2)],
        2,
        temperature=0.2,
        current_answer="C",
    )
    rendered = render_system(bundle) + "\n\n" + render_user(bundle)
    rendered = rendered.replace(related.id, "<RELATED_ID>")
    expected = GOLDEN.read_text("utf-8")
    assert rendered == expected


def test_invalid_level_rejected(question):
    with pytest.raises(ValueError):
        build_prompt(question, [], "", _history(question.id, []), [], 0)
    with pytest.raises(ValueError):
        build_prompt(question, [], "", _history(question.id, []), [], 4)

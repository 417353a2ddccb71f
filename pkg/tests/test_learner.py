from __future__ import annotations

import random

import pytest

from tutorkit.errors import NotFound, OrderingError
from tutorkit.learner import misconception_signature
from tutorkit.models import MisconceptionTag, QuestionKind

from conftest import at, draft


@pytest.fixture
def question(content, course):
    return content.upsert_question(course.id, draft(answer_key={"B"}))


@pytest.fixture
def related(content, course, question):
    r = content.upsert_question(course.id, draft(body="related item"))
    content.upsert_question(course.id, draft(question_id=question.id, answer_key={"B"}, related={r.id}))
    return r


def test_first_wrong_attempt_creates_tag(learner, question):
    attempt = learner.record_attempt("s1", question.id, at(0), frozenset({"C"}), False, submitted_at=at(10))
    assert attempt.attempt_ordinal == 1
    assert attempt.correct is False
    profile = learner.get_profile("s1")
    assert profile.misconception_counts == {MisconceptionTag(question.id, "C"): 1}
    assert profile.topic_error_counts == {(question.topic, question.sub_topic): 1}


def test_repeated_wrong_answer_marks_recurrence(learner, question):
    for i in range(2):
        learner.record_attempt("s1", question.id, at(i * 60), frozenset({"C"}), False, submitted_at=at(i * 60 + 5))
    profile = learner.get_profile("s1")
    assert profile.misconception_counts[MisconceptionTag(question.id, "C")] == 2
    recurring = learner.recurring_misconceptions("s1", question.id)
    assert [(r.tag.signature, r.count) for r in recurring] == [("C", 2)]


def test_correct_attempt_leaves_profile_unchanged(learner, question):
    learner.record_attempt("s1", question.id, at(0), frozenset({"B"}), True, points=question.point_value, submitted_at=at(5))
    profile = learner.get_profile("s1")
    assert profile.misconception_counts == {}
    assert profile.topic_error_counts == {}
    assert learner.student_score("s1") == question.point_value


def test_ordering_error_on_time_travel(learner, question):
    with pytest.raises(OrderingError):
        learner.record_attempt("s1", question.id, at(100), frozenset({"C"}), False, submitted_at=at(50))


def test_unknown_question_rejected(learner):
    with pytest.raises(NotFound):
        learner.record_attempt("s1", "ghost", at(0), frozenset({"A"}), False)


def test_points_require_correctness(learner, question):
    with pytest.raises(ValueError):
        learner.record_attempt("s1", question.id, at(0), frozenset({"C"}), False, points=3)


def test_ordinals_are_dense_per_pair(learner, question, related):
    for i in range(4):
        learner.record_attempt("s1", question.id, at(i * 10), frozenset({"C"}), False, submitted_at=at(i * 10 + 1))
    learner.record_attempt("s1", related.id, at(100), frozenset({"C"}), False, submitted_at=at(101))
    learner.record_attempt("s2", question.id, at(200), frozenset({"C"}), False, submitted_at=at(201))
    history = learner.get_error_history("s1", question.id, [])
    assert [e.attempt_ordinal for e in history.entries] == [1, 2, 3, 4]
    assert learner.get_error_history("s2", question.id, []).entries[0].attempt_ordinal == 1


def test_empty_history(learner, question):
    assert learner.get_error_history("nobody", question.id, []).entries == []


def test_history_spans_related_questions_chronologically(learner, question, related):
    learner.record_attempt("s1", question.id, at(0), frozenset({"C"}), False, hint_text="hint 1", submitted_at=at(10))
    learner.record_attempt("s1", related.id, at(20), frozenset({"D"}), False, submitted_at=at(30))
    learner.record_attempt("s1", question.id, at(40), frozenset({"D"}), False, hint_text="hint 2", submitted_at=at(50))
    learner.record_attempt("s1", question.id, at(60), frozenset({"B"}), True, submitted_at=at(70))

    history = learner.get_error_history("s1", question.id, [related.id])
    assert [(e.question_id, e.wrong_answer) for e in history.entries] == [
        (question.id, "C"),
        (related.id, "D"),
        (question.id, "D"),
    ]
    assert [e.hint_text for e in history.entries] == ["hint 1", None, "hint 2"]


def test_history_equals_brute_force_rescan(learner, store, content, course):
    """Oracle: re-derive the history straight from the attempts table."""
    rng = random.Random(7)
    questions = [content.upsert_question(course.id, draft(body=f"q{i}")) for i in range(3)]
    students = ["s1", "s2"]
    clock = 0
    for _ in range(60):
        student = rng.choice(students)
        q = rng.choice(questions)
        correct = rng.random() < 0.4
        keys = frozenset({rng.choice("ABCD")})
        learner.record_attempt(
            student, q.id, at(clock), keys, correct,
            hint_text=None if correct or rng.random() < 0.5 else f"hint {clock}",
            submitted_at=at(clock + 1),
        )
        clock += 2

    focal, related_ids = questions[0], [questions[1].id]
    got = learner.get_error_history("s1", focal.id, related_ids)

    with store.read() as conn:
        rows = conn.execute("SELECT * FROM attempts ORDER BY seq").fetchall()
    expected = [
        (r["id"], r["question_id"], r["attempt_ordinal"], r["hint_text"])
        for r in rows
        if r["student_id"] == "s1"
        and not r["correct"]
        and r["question_id"] in {focal.id, *related_ids}
    ]
    assert [(e.attempt_id, e.question_id, e.attempt_ordinal, e.hint_text) for e in got.entries] == expected


def test_recurring_threshold_filters_and_orders(learner, content, course):
    q = content.upsert_question(course.id, draft())
    # D twice (earlier), C three times, B once
    learner.record_attempt("s1", q.id, at(0), frozenset({"D"}), False, submitted_at=at(1))
    learner.record_attempt("s1", q.id, at(2), frozenset({"D"}), False, submitted_at=at(3))
    for i in range(3):
        learner.record_attempt("s1", q.id, at(10 + i), frozenset({"C"}), False, submitted_at=at(11 + i))
    learner.record_attempt("s1", q.id, at(20), frozenset({"B"}), False, submitted_at=at(21))

    recurring = learner.recurring_misconceptions("s1", q.id, 2)
    assert [(r.tag.signature, r.count) for r in recurring] == [("C", 3), ("D", 2)]
    assert learner.recurring_misconceptions("s1", q.id, 3) == recurring[:1]


def test_recurring_tie_broken_by_first_occurrence(learner, content, course):
    q = content.upsert_question(course.id, draft())
    learner.record_attempt("s1", q.id, at(0), frozenset({"D"}), False, submitted_at=at(1))
    learner.record_attempt("s1", q.id, at(2), frozenset({"C"}), False, submitted_at=at(3))
    learner.record_attempt("s1", q.id, at(4), frozenset({"C"}), False, submitted_at=at(5))
    learner.record_attempt("s1", q.id, at(6), frozenset({"D"}), False, submitted_at=at(7))
    recurring = learner.recurring_misconceptions("s1", q.id, 2)
    assert [r.tag.signature for r in recurring] == ["D", "C"]


def test_recurring_threshold_must_be_at_least_two(learner, question):
    with pytest.raises(ValueError):
        learner.recurring_misconceptions("s1", question.id, 1)


def test_signature_canonical_for_choice_sets(content, course):
    q = content.upsert_question(course.id, draft(QuestionKind.MULTIPLE_CHOICE, answer_key={"A", "B"}))
    assert misconception_signature(q, frozenset({"C", "A"})) == "A+C"
    assert misconception_signature(q, frozenset({"A", "C"})) == "A+C"


def test_signature_for_short_answer_prefers_grader_label(content, course):
    q = content.upsert_question(course.id, draft(QuestionKind.SHORT_ANSWER))
    assert misconception_signature(q, "Tandem  Axle", "confused axle types") == "confused axle types"
    assert misconception_signature(q, "Tandem  Axle", None) == "tandem axle"
    assert misconception_signature(q, "Tandem  Axle", "  ") == "tandem axle"


def test_profile_recomputable_from_log_random_interleavings(learner, content, course):
    rng = random.Random(13)
    questions = [content.upsert_question(course.id, draft(body=f"q{i}", topic=f"t{i % 2}", sub_topic=f"s{i % 3}")) for i in range(5)]
    students = [f"stu{i}" for i in range(4)]
    clock = 0
    for _ in range(300):
        student = rng.choice(students)
        q = rng.choice(questions)
        correct = rng.random() < 0.3
        learner.record_attempt(
            student, q.id, at(clock), frozenset({rng.choice("ABCD")}), correct, submitted_at=at(clock + 1)
        )
        clock += 2
    for student in students:
        assert learner.rebuild_profile(student) == learner.get_profile(student)


def test_rebuild_survives_question_edit_and_delete(learner, content, course, question):
    learner.record_attempt("s1", question.id, at(0), frozenset({"C"}), False, submitted_at=at(1))
    content.upsert_question(course.id, draft(question_id=question.id, topic="renamed", sub_topic="other", answer_key={"B"}))
    learner.record_attempt("s1", question.id, at(2), frozenset({"C"}), False, submitted_at=at(3))
    content.delete_question(question.id)
    profile = learner.get_profile("s1")
    assert learner.rebuild_profile("s1") == profile
    # one error under the old coordinates, one under the new
    assert profile.topic_error_counts == {
        (question.topic, question.sub_topic): 1,
        ("renamed", "other"): 1,
    }


def test_counts_never_decrease_without_reset(learner, question):
    rng = random.Random(3)
    previous: dict = {}
    for i in range(30):
        learner.record_attempt(
            "s1", question.id, at(i * 10), frozenset({rng.choice("ABCD")}) - question.answer_key or frozenset({"C"}),
            False, submitted_at=at(i * 10 + 1),
        )
        counts = learner.get_profile("s1").misconception_counts
        for tag, count in previous.items():
            assert counts.get(tag, 0) >= count
        previous = counts
    learner.reset_profile("s1")
    profile = learner.get_profile("s1")
    assert profile.misconception_counts == {} and profile.topic_error_counts == {}


def test_attach_hint_updates_attempt(learner, question):
    attempt = learner.record_attempt("s1", question.id, at(0), frozenset({"C"}), False, submitted_at=at(1))
    learner.attach_hint(attempt.id, "look again")
    history = learner.get_error_history("s1", question.id, [])
    assert history.entries[0].hint_text == "look again"
    with pytest.raises(NotFound):
        learner.attach_hint("ghost", "x")

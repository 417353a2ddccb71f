from __future__ import annotations

import csv
import io
import random
from collections import defaultdict

import pytest

from tutorkit.analytics import AnalyticsEngine, CSV_HEADER, HINT_DELIMITER, export_csv
from tutorkit.errors import NotFound
from tutorkit.redaction import Pseudonymizer

from conftest import at, draft


@pytest.fixture
def engine(store, content, learner):
    return AnalyticsEngine(content, learner, Pseudonymizer(store.token_salt))


@pytest.fixture
def question(content, course):
    return content.upsert_question(course.id, draft(answer_key={"B"}, point_value=2))


def test_missing_course_rejected(engine):
    with pytest.raises(NotFound):
        engine.engagement_report("ghost")


def test_single_student_wrong_wrong_correct(engine, learner, course, question):
    learner.record_attempt("s1", question.id, at(0), frozenset({"C"}), False, hint_text="h1", submitted_at=at(10))
    learner.record_attempt("s1", question.id, at(20), frozenset({"D"}), False, hint_text="h2", submitted_at=at(35))
    learner.record_attempt("s1", question.id, at(40), frozenset({"B"}), True, points=2, submitted_at=at(45))

    report = engine.engagement_report(course.id)
    assert report.cohort == "hints_on"
    row = report.rows[0]
    assert row.total_attempts == 3
    assert row.correct is True
    assert row.correctness_ratio == 1.0
    assert row.first_opened_at == at(0)
    assert row.last_submitted_at == at(45)
    assert row.time_spent_seconds == 10 + 15 + 5
    assert row.hints == ["h1", "h2"]
    assert row.points_awarded == 2

    agg = report.per_question[0]
    assert agg.students == 1
    assert agg.mean_attempts == 3
    assert agg.success_rate_by_attempt == {1: 0.0, 2: 0.0, 3: 1.0}


def test_two_students_cumulative_success(engine, learner, course, question):
    learner.record_attempt("s1", question.id, at(0), frozenset({"B"}), True, points=2, submitted_at=at(5))
    learner.record_attempt("s2", question.id, at(0), frozenset({"C"}), False, submitted_at=at(8))
    learner.record_attempt("s2", question.id, at(10), frozenset({"B"}), True, points=2, submitted_at=at(14))

    agg = engine.engagement_report(course.id).per_question[0]
    assert agg.success_rate_by_attempt[1] == 0.5
    assert agg.success_rate_by_attempt[2] == 1.0


def test_correctness_ratio_is_per_student_across_questions(engine, learner, content, course):
    q1 = content.upsert_question(course.id, draft(body="q1", answer_key={"B"}))
    q2 = content.upsert_question(course.id, draft(body="q2", answer_key={"B"}))
    learner.record_attempt("s1", q1.id, at(0), frozenset({"B"}), True, points=2, submitted_at=at(5))
    learner.record_attempt("s1", q2.id, at(10), frozenset({"C"}), False, submitted_at=at(15))
    report = engine.engagement_report(course.id)
    assert all(row.correctness_ratio == 0.5 for row in report.rows)


def _brute_force(attempts):
    """Independent recomputation of the report from a plain attempt list."""
    rows = {}
    by_pair = defaultdict(list)
    for a in attempts:
        by_pair[(a.student_id, a.question_id)].append(a)
    attempted, solved = defaultdict(set), defaultdict(set)
    for (s, q), items in by_pair.items():
        attempted[s].add(q)
        if any(a.correct for a in items):
            solved[s].add(q)
    for (s, q), items in by_pair.items():
        rows[(s, q)] = {
            "total": len(items),
            "correct": any(a.correct for a in items),
            "ratio": len(solved[s]) / len(attempted[s]),
            "first_opened": min(a.opened_at for a in items),
            "last_submitted": max(a.submitted_at for a in items),
            "time": sum((a.submitted_at - a.opened_at).total_seconds() for a in items),
            "hints": [a.hint_text for a in items if a.hint_text is not None],
            "points": sum(a.points_awarded for a in items),
        }
    per_question = {}
    by_q = defaultdict(lambda: defaultdict(list))
    for a in attempts:
        by_q[a.question_id][a.student_id].append(a)
    for q, students in by_q.items():
        n = len(students)
        firsts = []
        max_ord = 0
        for items in students.values():
            max_ord = max(max_ord, max(a.attempt_ordinal for a in items))
            ords = [a.attempt_ordinal for a in items if a.correct]
            if ords:
                firsts.append(min(ords))
        per_question[q] = {
            "students": n,
            "mean_attempts": sum(len(v) for v in students.values()) / n,
            "mean_time": sum(
                (a.submitted_at - a.opened_at).total_seconds() for v in students.values() for a in v
            )
            / n,
            "success": {k: sum(1 for o in firsts if o <= k) / n for k in range(1, max_ord + 1)},
        }
    return rows, per_question


def test_report_equals_brute_force_on_randomized_history(engine, learner, content, course):
    rng = random.Random(21)
    questions = [content.upsert_question(course.id, draft(body=f"q{i}")) for i in range(4)]
    students = [f"s{i}" for i in range(5)]
    clock = 0
    for _ in range(150):
        s, q = rng.choice(students), rng.choice(questions)
        correct = rng.random() < 0.35
        learner.record_attempt(
            s,
            q.id,
            at(clock),
            frozenset({"A"}) if correct else frozenset({rng.choice("BCD")}),
            correct,
            hint_text=None if correct or rng.random() < 0.5 else f"hint-{clock}",
            points=2 if correct and not learner.has_correct_attempt(s, q.id) else 0,
            submitted_at=at(clock + rng.randrange(1, 30)),
        )
        clock += 40

    report = engine.engagement_report(course.id)
    rows, per_question = _brute_force(learner.attempts_for_course(course.id))

    pseudo = Pseudonymizer(engine._pseudo._salt.decode())
    assert len(report.rows) == len(rows)
    for row in report.rows:
        student_id = next(
            s for s in students if pseudo.token_for(s) == row.student_token
        )
        expected = rows[(student_id, row.question_id)]
        assert row.total_attempts == expected["total"]
        assert row.correct == expected["correct"]
        assert row.correctness_ratio == pytest.approx(expected["ratio"])
        assert row.first_opened_at == expected["first_opened"]
        assert row.last_submitted_at == expected["last_submitted"]
        assert row.time_spent_seconds == pytest.approx(expected["time"])
        assert row.hints == expected["hints"]
        assert row.points_awarded == expected["points"]
    for agg in report.per_question:
        expected = per_question[agg.question_id]
        assert agg.students == expected["students"]
        assert agg.mean_attempts == pytest.approx(expected["mean_attempts"])
        assert agg.mean_time_seconds == pytest.approx(expected["mean_time"])
        assert agg.success_rate_by_attempt == expected["success"]


def test_empty_course_exports_header_only(engine, course):
    data = export_csv(engine.engagement_report(course.id))
    lines = data.decode("utf-8").splitlines()
    assert lines == [",".join(CSV_HEADER)]


def test_csv_quoting_round_trips_messy_hints(engine, learner, course, question):
    messy = 'compare "per-axle" loads, then re-check'
    learner.record_attempt("s1", question.id, at(0), frozenset({"C"}), False, hint_text=messy, submitted_at=at(9))
    data = export_csv(engine.engagement_report(course.id))
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header, row = list(reader)
    assert header == CSV_HEADER
    assert row[header.index("hints")] == messy


def test_csv_parse_back_reproduces_report(engine, learner, content, course):
    rng = random.Random(4)
    questions = [content.upsert_question(course.id, draft(body=f"q{i}")) for i in range(3)]
    clock = 0
    for _ in range(60):
        s, q = rng.choice(["s1", "s2", "s3"]), rng.choice(questions)
        correct = rng.random() < 0.4
        learner.record_attempt(
            s, q.id, at(clock), frozenset({"A" if correct else "B"}), correct,
            hint_text=None if correct else 'hint, with "quotes" ||| and delimiter-ish text',
            submitted_at=at(clock + 3),
        )
        clock += 10

    report = engine.engagement_report(course.id)
    data = export_csv(report)
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    parsed = list(reader)
    assert len(parsed) == len(report.rows)
    for row, rec in zip(report.rows, parsed):
        assert rec["student_token"] == row.student_token
        assert rec["question_id"] == row.question_id
        assert int(rec["total_attempts"]) == row.total_attempts
        assert (rec["correct"] == "true") == row.correct
        assert float(rec["correctness_ratio"]) == row.correctness_ratio
        assert rec["first_opened_at"] == row.first_opened_at.isoformat()
        assert rec["last_submitted_at"] == row.last_submitted_at.isoformat()
        assert float(rec["time_spent_seconds"]) == row.time_spent_seconds
        assert int(rec["points_awarded"]) == row.points_awarded
        # hints is a joined display field; bit-exact as a string
        assert rec["hints"] == HINT_DELIMITER.join(row.hints)


def test_export_contains_tokens_never_identifiers(engine, learner, course, question):
    learner.record_attempt("student-secret-id", question.id, at(0), frozenset({"C"}), False, submitted_at=at(2))
    text = export_csv(engine.engagement_report(course.id)).decode("utf-8")
    assert "student-secret-id" not in text
    token = text.splitlines()[1].split(",")[0]
    assert Pseudonymizer.looks_like_token(token)


def test_baseline_course_reports_hints_off(engine, content, learner):
    baseline = content.create_course("baseline", "", False)
    report = engine.engagement_report(baseline.id)
    assert report.cohort == "hints_off"
    assert report.rows == []

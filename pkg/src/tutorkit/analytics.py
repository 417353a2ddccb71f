"""Engagement aggregation and spreadsheet export.

Everything is computed from the raw attempt log: per-(student, question)
rows plus pooled per-question aggregates (mean attempts, mean time,
cumulative nth-attempt success rates). Students appear only as opaque
tokens. The export is RFC-4180 CSV with a fixed header, documented in
docs/api.md; per-question time is the sum of (submitted - opened) over
attempts, idle time between attempts excluded.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict

from .content import ContentManager
from .learner import LearnerState
from .models import (
    Attempt,
    EngagementReport,
    EngagementRow,
    QuestionAggregate,
)
from .redaction import Pseudonymizer

CSV_HEADER = [
    "student_token",
    "question_id",
    "total_attempts",
    "correct",
    "correctness_ratio",
    "first_opened_at",
    "last_submitted_at",
    "time_spent_seconds",
    "points_awarded",
    "hints",
]

HINT_DELIMITER = " ||| "


class AnalyticsEngine:
    def __init__(
        self,
        content: ContentManager,
        learner: LearnerState,
        pseudonymizer: Pseudonymizer,
    ) -> None:
        self._content = content
        self._learner = learner
        self._pseudo = pseudonymizer

    def engagement_report(self, course_id: str) -> EngagementReport:
        course = self._content.get_course(course_id)
        attempts = self._learner.attempts_for_course(course_id)

        by_pair: dict[tuple[str, str], list[Attempt]] = defaultdict(list)
        for attempt in attempts:
            by_pair[(attempt.student_id, attempt.question_id)].append(attempt)

        # Per-student correctness ratio: questions answered correctly at
        # least once / questions attempted.
        attempted: dict[str, set[str]] = defaultdict(set)
        solved: dict[str, set[str]] = defaultdict(set)
        for (student_id, question_id), rows in by_pair.items():
            attempted[student_id].add(question_id)
            if any(a.correct for a in rows):
                solved[student_id].add(question_id)

        report_rows: list[EngagementRow] = []
        for (student_id, question_id), rows in by_pair.items():
            ratio = len(solved[student_id]) / len(attempted[student_id])
            report_rows.append(
                EngagementRow(
                    student_token=self._pseudo.token_for(student_id),
                    question_id=question_id,
                    total_attempts=len(rows),
                    correct=any(a.correct for a in rows),
                    correctness_ratio=ratio,
                    first_opened_at=min(a.opened_at for a in rows),
                    last_submitted_at=max(a.submitted_at for a in rows),
                    time_spent_seconds=sum(
                        (a.submitted_at - a.opened_at).total_seconds() for a in rows
                    ),
                    hints=[a.hint_text for a in rows if a.hint_text is not None],
                    points_awarded=sum(a.points_awarded for a in rows),
                )
            )
        report_rows.sort(key=lambda r: (r.student_token, r.question_id))

        per_question = self._per_question_aggregates(attempts)
        return EngagementReport(
            course_id=course_id,
            cohort=course.cohort,
            rows=report_rows,
            per_question=per_question,
        )

    def _per_question_aggregates(self, attempts: list[Attempt]) -> list[QuestionAggregate]:
        by_question: dict[str, dict[str, list[Attempt]]] = defaultdict(lambda: defaultdict(list))
        for attempt in attempts:
            by_question[attempt.question_id][attempt.student_id].append(attempt)

        aggregates: list[QuestionAggregate] = []
        for question_id in sorted(by_question):
            students = by_question[question_id]
            n = len(students)
            mean_attempts = sum(len(rows) for rows in students.values()) / n
            mean_time = (
                sum(
                    (a.submitted_at - a.opened_at).total_seconds()
                    for rows in students.values()
                    for a in rows
                )
                / n
            )
            # First-correct ordinal per student; cumulative success by n.
            first_correct: list[int] = []
            max_ordinal = 0
            for rows in students.values():
                max_ordinal = max(max_ordinal, max(a.attempt_ordinal for a in rows))
                corrects = [a.attempt_ordinal for a in rows if a.correct]
                if corrects:
                    first_correct.append(min(corrects))
            success_by_attempt = {
                k: sum(1 for o in first_correct if o <= k) / n
                for k in range(1, max_ordinal + 1)
            }
            sample = next(iter(students.values()))[0]
            topic, sub_topic = self._topic_of(sample)
            aggregates.append(
                QuestionAggregate(
                    question_id=question_id,
                    topic=topic,
                    sub_topic=sub_topic,
                    students=n,
                    mean_attempts=mean_attempts,
                    mean_time_seconds=mean_time,
                    success_rate_by_attempt=success_by_attempt,
                )
            )
        return aggregates

    def _topic_of(self, attempt: Attempt) -> tuple[str, str]:
        question = self._content.get_question(attempt.question_id, include_deleted=True)
        return question.topic, question.sub_topic


def export_csv(report: EngagementReport) -> bytes:
    """UTF-8 CSV with RFC-4180 quoting and the fixed documented header.

    Timestamps are ISO-8601 UTC; hints are joined with ``" ||| "``; only
    opaque student tokens ever appear.
    """
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        writer.writerow(
            [
                row.student_token,
                row.question_id,
                row.total_attempts,
                "true" if row.correct else "false",
                repr(row.correctness_ratio),
                row.first_opened_at.isoformat(),
                row.last_submitted_at.isoformat(),
                repr(row.time_spent_seconds),
                row.points_awarded,
                HINT_DELIMITER.join(row.hints),
            ]
        )
    return buffer.getvalue().encode("utf-8")

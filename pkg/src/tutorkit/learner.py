"""Append-only attempt log and the evolving learner profile.

Every attempt is persisted with timestamps, correctness, the hint that
was delivered, and awarded points. Incorrect attempts update the profile
in the same transaction: a misconception tag (canonical wrong-answer
signature, or the grader's label for short answers) and a per-topic
error counter. The profile is a pure aggregate of the log and can be
rebuilt from scratch at any time.
"""

from __future__ import annotations

import json
from datetime import datetime

from .content import ContentManager
from .errors import NotFound, OrderingError
from .models import (
    Attempt,
    AnswerPayload,
    CHOICE_KINDS,
    ErrorHistory,
    ErrorHistoryEntry,
    LearnerProfile,
    MisconceptionTag,
    Question,
    RecurringMisconception,
    canonical_key_signature,
    new_id,
    normalize_text,
    parse_ts,
    utcnow,
)
from .store import Store

DEFAULT_RECURRENCE_THRESHOLD = 2


def misconception_signature(
    question: Question, payload: AnswerPayload, misconception_label: str | None = None
) -> str:
    """Deterministic tag signature for a wrong answer.

    Choice kinds use the canonical wrong answer set (e.g. ``"B"`` or
    ``"A+C"``); short answers use the grader-extracted label, falling
    back to the normalized wrong text when extraction failed.
    """
    if question.kind in CHOICE_KINDS:
        return canonical_key_signature(payload)
    if misconception_label and misconception_label.strip():
        return normalize_text(misconception_label)
    return normalize_text(str(payload))


def _payload_to_json(payload: AnswerPayload) -> str:
    if isinstance(payload, frozenset):
        return json.dumps({"kind": "options", "keys": sorted(payload)})
    return json.dumps({"kind": "text", "text": payload})


def _payload_from_json(raw: str) -> AnswerPayload:
    data = json.loads(raw)
    if data["kind"] == "options":
        return frozenset(data["keys"])
    return data["text"]


def _payload_display(payload: AnswerPayload) -> str:
    if isinstance(payload, frozenset):
        return canonical_key_signature(payload)
    return payload


class LearnerState:
    def __init__(self, store: Store, content: ContentManager) -> None:
        self._store = store
        self._content = content

    # -- recording -------------------------------------------------------

    def record_attempt(
        self,
        student_id: str,
        question_id: str,
        opened_at: datetime,
        answer_payload: AnswerPayload,
        correct: bool,
        hint_text: str | None = None,
        points: int = 0,
        *,
        submitted_at: datetime | None = None,
        misconception_label: str | None = None,
    ) -> Attempt:
        question = self._content.get_question(question_id)
        submitted_at = submitted_at or utcnow()
        if submitted_at < opened_at:
            raise OrderingError(
                f"submitted_at {submitted_at.isoformat()} precedes opened_at {opened_at.isoformat()}"
            )
        if points > 0 and not correct:
            raise ValueError("points_awarded > 0 requires a correct attempt")
        if points < 0:
            raise ValueError("points_awarded must be non-negative")

        signature = None
        if not correct:
            signature = misconception_signature(question, answer_payload, misconception_label)

        attempt_id = new_id()
        # Appends for the same (student, question) pair are serialized;
        # the profile update rides in the same transaction as the append.
        with self._store.keyed_lock("attempt", student_id, question_id):
            with self._store.transaction() as conn:
                row = conn.execute(
                    "SELECT COALESCE(MAX(attempt_ordinal), 0) AS n FROM attempts"
                    " WHERE student_id = ? AND question_id = ?",
                    (student_id, question_id),
                ).fetchone()
                ordinal = row["n"] + 1
                cur = conn.execute(
                    "INSERT INTO attempts (id, student_id, question_id, course_id, topic,"
                    " sub_topic, opened_at, submitted_at, answer_payload, correct, hint_text,"
                    " points_awarded, attempt_ordinal, misconception_signature)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        attempt_id,
                        student_id,
                        question_id,
                        question.course_id,
                        question.topic,
                        question.sub_topic,
                        opened_at.isoformat(),
                        submitted_at.isoformat(),
                        _payload_to_json(answer_payload),
                        int(correct),
                        hint_text,
                        points,
                        ordinal,
                        signature,
                    ),
                )
                if not correct:
                    self._apply_profile_update(
                        conn,
                        student_id,
                        question,
                        signature,
                        submitted_at,
                        cur.lastrowid,
                    )
        return Attempt(
            id=attempt_id,
            student_id=student_id,
            question_id=question_id,
            course_id=question.course_id,
            opened_at=opened_at,
            submitted_at=submitted_at,
            answer_payload=answer_payload,
            correct=correct,
            hint_text=hint_text,
            points_awarded=points,
            attempt_ordinal=ordinal,
            misconception_signature=signature,
        )

    @staticmethod
    def _apply_profile_update(conn, student_id, question, signature, submitted_at, seq) -> None:
        conn.execute(
            "INSERT INTO profile_tags (student_id, question_id, signature, count, first_seen, first_seq)"
            " VALUES (?, ?, ?, 1, ?, ?)"
            " ON CONFLICT(student_id, question_id, signature)"
            " DO UPDATE SET count = count + 1",
            (student_id, question.id, signature, submitted_at.isoformat(), seq),
        )
        conn.execute(
            "INSERT INTO profile_topics (student_id, topic, sub_topic, count)"
            " VALUES (?, ?, ?, 1)"
            " ON CONFLICT(student_id, topic, sub_topic) DO UPDATE SET count = count + 1",
            (student_id, question.topic, question.sub_topic),
        )
        conn.execute(
            "INSERT INTO profiles (student_id, last_updated) VALUES (?, ?)"
            " ON CONFLICT(student_id) DO UPDATE SET last_updated = excluded.last_updated",
            (student_id, submitted_at.isoformat()),
        )

    def attach_hint(self, attempt_id: str, hint_text: str) -> None:
        with self._store.transaction() as conn:
            cur = conn.execute(
                "UPDATE attempts SET hint_text = ? WHERE id = ?", (hint_text, attempt_id)
            )
            if cur.rowcount == 0:
                raise NotFound("attempt", attempt_id)

    # -- history -----------------------------------------------------------

    def get_error_history(
        self, student_id: str, question_id: str, related_ids=()
    ) -> ErrorHistory:
        """Chronological incorrect attempts on the question and its related
        questions, with the hint each one received, verbatim."""
        ids = [question_id, *related_ids]
        placeholders = ",".join("?" for _ in ids)
        with self._store.read() as conn:
            rows = conn.execute(
                f"SELECT * FROM attempts WHERE student_id = ? AND correct = 0"
                f" AND question_id IN ({placeholders})"
                " ORDER BY submitted_at, seq",
                (student_id, *ids),
            ).fetchall()
        entries = [
            ErrorHistoryEntry(
                attempt_id=r["id"],
                question_id=r["question_id"],
                attempt_ordinal=r["attempt_ordinal"],
                wrong_answer=_payload_display(_payload_from_json(r["answer_payload"])),
                hint_text=r["hint_text"],
                submitted_at=parse_ts(r["submitted_at"]),
            )
            for r in rows
        ]
        return ErrorHistory(question_id=question_id, entries=entries)

    def recurring_misconceptions(
        self,
        student_id: str,
        question_id: str,
        threshold: int = DEFAULT_RECURRENCE_THRESHOLD,
    ) -> list[RecurringMisconception]:
        """Tags seen at least ``threshold`` times on this question, sorted by
        descending count, ties broken by earliest first occurrence."""
        if threshold < 2:
            raise ValueError("threshold must be >= 2; recurring minimally means twice")
        with self._store.read() as conn:
            rows = conn.execute(
                "SELECT signature, count, first_seen, first_seq FROM profile_tags"
                " WHERE student_id = ? AND question_id = ? AND count >= ?"
                " ORDER BY count DESC, first_seq ASC",
                (student_id, question_id, threshold),
            ).fetchall()
        return [
            RecurringMisconception(
                tag=MisconceptionTag(question_id=question_id, signature=r["signature"]),
                count=r["count"],
                first_seen=parse_ts(r["first_seen"]),
            )
            for r in rows
        ]

    # -- attempt queries ----------------------------------------------------

    def attempt_count(self, student_id: str, question_id: str) -> int:
        with self._store.read() as conn:
            row = conn.execute(
                "SELECT COUNT(*) AS n FROM attempts WHERE student_id = ? AND question_id = ?",
                (student_id, question_id),
            ).fetchone()
        return row["n"]

    def has_correct_attempt(self, student_id: str, question_id: str) -> bool:
        with self._store.read() as conn:
            row = conn.execute(
                "SELECT 1 FROM attempts WHERE student_id = ? AND question_id = ? AND correct = 1"
                " LIMIT 1",
                (student_id, question_id),
            ).fetchone()
        return row is not None

    def student_score(self, student_id: str) -> int:
        with self._store.read() as conn:
            row = conn.execute(
                "SELECT COALESCE(SUM(points_awarded), 0) AS total FROM attempts"
                " WHERE student_id = ?",
                (student_id,),
            ).fetchone()
        return row["total"]

    def attempts_for_course(self, course_id: str) -> list[Attempt]:
        with self._store.read() as conn:
            rows = conn.execute(
                "SELECT * FROM attempts WHERE course_id = ? ORDER BY seq", (course_id,)
            ).fetchall()
        return [_row_to_attempt(r) for r in rows]

    # -- profile --------------------------------------------------------------

    def get_profile(self, student_id: str) -> LearnerProfile:
        with self._store.read() as conn:
            tags = conn.execute(
                "SELECT question_id, signature, count FROM profile_tags WHERE student_id = ?",
                (student_id,),
            ).fetchall()
            topics = conn.execute(
                "SELECT topic, sub_topic, count FROM profile_topics WHERE student_id = ?",
                (student_id,),
            ).fetchall()
            meta = conn.execute(
                "SELECT last_updated FROM profiles WHERE student_id = ?", (student_id,)
            ).fetchone()
        return LearnerProfile(
            student_id=student_id,
            misconception_counts={
                MisconceptionTag(r["question_id"], r["signature"]): r["count"] for r in tags
            },
            topic_error_counts={(r["topic"], r["sub_topic"]): r["count"] for r in topics},
            last_updated=parse_ts(meta["last_updated"]) if meta else None,
        )

    def rebuild_profile(self, student_id: str) -> LearnerProfile:
        """From-scratch rebuild over the attempt log; must equal the
        incrementally maintained profile field-for-field."""
        with self._store.read() as conn:
            rows = conn.execute(
                "SELECT question_id, misconception_signature, topic, sub_topic, submitted_at"
                " FROM attempts WHERE student_id = ? AND correct = 0 ORDER BY seq",
                (student_id,),
            ).fetchall()
        counts: dict[MisconceptionTag, int] = {}
        topics: dict[tuple[str, str], int] = {}
        last_updated: datetime | None = None
        for r in rows:
            tag = MisconceptionTag(r["question_id"], r["misconception_signature"])
            counts[tag] = counts.get(tag, 0) + 1
            key = (r["topic"], r["sub_topic"])
            topics[key] = topics.get(key, 0) + 1
            last_updated = parse_ts(r["submitted_at"])
        return LearnerProfile(
            student_id=student_id,
            misconception_counts=counts,
            topic_error_counts=topics,
            last_updated=last_updated,
        )

    def reset_profile(self, student_id: str) -> None:
        """Administrative reset; the only sanctioned way counts decrease."""
        with self._store.transaction() as conn:
            conn.execute("DELETE FROM profile_tags WHERE student_id = ?", (student_id,))
            conn.execute("DELETE FROM profile_topics WHERE student_id = ?", (student_id,))
            conn.execute("DELETE FROM profiles WHERE student_id = ?", (student_id,))


def _row_to_attempt(r) -> Attempt:
    return Attempt(
        id=r["id"],
        student_id=r["student_id"],
        question_id=r["question_id"],
        course_id=r["course_id"],
        opened_at=parse_ts(r["opened_at"]),
        submitted_at=parse_ts(r["submitted_at"]),
        answer_payload=_payload_from_json(r["answer_payload"]),
        correct=bool(r["correct"]),
        hint_text=r["hint_text"],
        points_awarded=r["points_awarded"],
        attempt_ordinal=r["attempt_ordinal"],
        misconception_signature=r["misconception_signature"],
    )

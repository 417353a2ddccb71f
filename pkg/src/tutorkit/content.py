"""Course and question authoring: validation, indexed retrieval, media,
and the JSON course-file import/export used to seed fixtures.

Option keys are assigned by position (A..Z); true/false questions always
carry the fixed T/F pair. Question deletes are soft so attempt history
stays reportable. Writes to one course are serialized by a per-course
mutex; reads run concurrently.
"""

from __future__ import annotations

import base64
import hashlib
import json
import string
from typing import Any

from .errors import DanglingReference, NotFound, ValidationError
from .models import (
    Course,
    MediaDraft,
    MediaRef,
    Option,
    Question,
    QuestionDraft,
    QuestionKind,
    QuestionSummary,
    TRUE_FALSE_OPTIONS,
    new_id,
    parse_ts,
    utcnow,
)
from .store import Store

COURSE_FILE_SCHEMA_VERSION = "1"

_MAX_OPTIONS = len(string.ascii_uppercase)


class ContentManager:
    def __init__(self, store: Store) -> None:
        self._store = store

    # -- courses -------------------------------------------------------

    def create_course(self, title: str, description: str, feedback_enabled: bool) -> Course:
        if not title.strip():
            raise ValidationError.single("title", "must be nonempty")
        course = Course(
            id=new_id(),
            title=title,
            description=description,
            feedback_enabled=bool(feedback_enabled),
            created_at=utcnow(),
        )
        with self._store.transaction() as conn:
            conn.execute(
                "INSERT INTO courses (id, title, description, feedback_enabled, created_at)"
                " VALUES (?, ?, ?, ?, ?)",
                (
                    course.id,
                    course.title,
                    course.description,
                    int(course.feedback_enabled),
                    course.created_at.isoformat(),
                ),
            )
        return course

    def get_course(self, course_id: str) -> Course:
        with self._store.read() as conn:
            row = conn.execute(
                "SELECT * FROM courses WHERE id = ? AND deleted = 0", (course_id,)
            ).fetchone()
            if row is None:
                raise NotFound("course", course_id)
            topics = conn.execute(
                "SELECT DISTINCT topic, sub_topic FROM questions"
                " WHERE course_id = ? AND deleted = 0 ORDER BY topic, sub_topic",
                (course_id,),
            ).fetchall()
        index: dict[str, list[str]] = {}
        for t in topics:
            index.setdefault(t["topic"], []).append(t["sub_topic"])
        return Course(
            id=row["id"],
            title=row["title"],
            description=row["description"],
            feedback_enabled=bool(row["feedback_enabled"]),
            created_at=parse_ts(row["created_at"]),
            topic_index={topic: tuple(subs) for topic, subs in index.items()},
        )

    def list_courses(self) -> list[Course]:
        with self._store.read() as conn:
            rows = conn.execute(
                "SELECT id FROM courses WHERE deleted = 0 ORDER BY created_at, id"
            ).fetchall()
        return [self.get_course(r["id"]) for r in rows]

    def update_course(
        self,
        course_id: str,
        *,
        title: str | None = None,
        description: str | None = None,
        feedback_enabled: bool | None = None,
    ) -> Course:
        self.get_course(course_id)
        if title is not None and not title.strip():
            raise ValidationError.single("title", "must be nonempty")
        with self._store.keyed_lock("course", course_id):
            with self._store.transaction() as conn:
                if title is not None:
                    conn.execute("UPDATE courses SET title = ? WHERE id = ?", (title, course_id))
                if description is not None:
                    conn.execute(
                        "UPDATE courses SET description = ? WHERE id = ?",
                        (description, course_id),
                    )
                if feedback_enabled is not None:
                    conn.execute(
                        "UPDATE courses SET feedback_enabled = ? WHERE id = ?",
                        (int(feedback_enabled), course_id),
                    )
        return self.get_course(course_id)

    def delete_course(self, course_id: str) -> None:
        self.get_course(course_id)
        with self._store.keyed_lock("course", course_id):
            with self._store.transaction() as conn:
                conn.execute("UPDATE courses SET deleted = 1 WHERE id = ?", (course_id,))
                conn.execute("UPDATE questions SET deleted = 1 WHERE course_id = ?", (course_id,))

    # -- questions -----------------------------------------------------

    def upsert_question(self, course_id: str, draft: QuestionDraft) -> Question:
        self.get_course(course_id)
        options, answer_key, errors = _validate_draft(draft)
        if errors:
            raise ValidationError(errors)
        question_id = draft.id or new_id()
        related = sorted(set(draft.related_question_ids))
        if question_id in related:
            raise ValidationError.single("related_question_ids", "must not reference the question itself")

        with self._store.keyed_lock("course", course_id):
            with self._store.transaction() as conn:
                existing = conn.execute(
                    "SELECT course_id FROM questions WHERE id = ?", (question_id,)
                ).fetchone()
                if existing is not None and existing["course_id"] != course_id:
                    raise ValidationError.single("course_id", "question belongs to a different course")

                unresolved = [
                    rid
                    for rid in related
                    if conn.execute(
                        "SELECT 1 FROM questions WHERE id = ? AND course_id = ? AND deleted = 0",
                        (rid, course_id),
                    ).fetchone()
                    is None
                ]
                if unresolved:
                    raise DanglingReference(unresolved)

                media_refs = [self._store_media(conn, item) for item in draft.media]
                now = utcnow()
                created_at = now
                if existing is not None:
                    row = conn.execute(
                        "SELECT created_at FROM questions WHERE id = ?", (question_id,)
                    ).fetchone()
                    created_at = parse_ts(row["created_at"])
                conn.execute(
                    "INSERT INTO questions (id, course_id, topic, sub_topic, kind, body,"
                    " options, answer_key, reference_answer, explanation, context, media,"
                    " point_value, attempt_limit, related_ids, deleted, created_at, updated_at)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, 0, ?, ?)"
                    " ON CONFLICT(id) DO UPDATE SET"
                    " topic=excluded.topic, sub_topic=excluded.sub_topic, kind=excluded.kind,"
                    " body=excluded.body, options=excluded.options, answer_key=excluded.answer_key,"
                    " reference_answer=excluded.reference_answer, explanation=excluded.explanation,"
                    " context=excluded.context, media=excluded.media,"
                    " point_value=excluded.point_value, attempt_limit=excluded.attempt_limit,"
                    " related_ids=excluded.related_ids, deleted=0, updated_at=excluded.updated_at",
                    (
                        question_id,
                        course_id,
                        draft.topic,
                        draft.sub_topic,
                        draft.kind.value,
                        draft.body,
                        json.dumps([[o.key, o.text] for o in options]),
                        json.dumps(sorted(answer_key)),
                        draft.reference_answer,
                        draft.explanation,
                        draft.context,
                        json.dumps([[m.digest, m.media_type] for m in media_refs]),
                        draft.point_value,
                        draft.attempt_limit,
                        json.dumps(related),
                        created_at.isoformat(),
                        now.isoformat(),
                    ),
                )
        return self.get_question(question_id)

    def _store_media(self, conn, item) -> MediaRef:
        if isinstance(item, MediaRef):
            row = conn.execute(
                "SELECT media_type FROM media_blobs WHERE digest = ?", (item.digest,)
            ).fetchone()
            if row is None:
                raise ValidationError.single("media", f"unknown media digest {item.digest!r}")
            return MediaRef(digest=item.digest, media_type=row["media_type"])
        if not isinstance(item, MediaDraft):
            raise ValidationError.single("media", "entries must be MediaDraft or MediaRef")
        digest = hashlib.sha256(item.content).hexdigest()
        conn.execute(
            "INSERT OR IGNORE INTO media_blobs (digest, media_type, content) VALUES (?, ?, ?)",
            (digest, item.media_type, item.content),
        )
        return MediaRef(digest=digest, media_type=item.media_type)

    def get_question(self, question_id: str, *, include_deleted: bool = False) -> Question:
        with self._store.read() as conn:
            row = conn.execute("SELECT * FROM questions WHERE id = ?", (question_id,)).fetchone()
        if row is None or (row["deleted"] and not include_deleted):
            raise NotFound("question", question_id)
        return _row_to_question(row)

    def get_question_bundle(self, question_id: str) -> tuple[Question, list[Question]]:
        """The question plus its fully resolved related questions, in
        stored order. A link to a deleted question surfaces as
        DanglingReference at read time."""
        question = self.get_question(question_id)
        related: list[Question] = []
        unresolved: list[str] = []
        for rid in question.related_question_ids:
            try:
                related.append(self.get_question(rid))
            except NotFound:
                unresolved.append(rid)
        if unresolved:
            raise DanglingReference(unresolved)
        return question, related

    def list_catalog(
        self,
        course_id: str,
        *,
        topic: str | None = None,
        sub_topic: str | None = None,
    ) -> list[QuestionSummary]:
        """Student-facing listing; never includes answer keys, reference
        answers, explanations, or instructor context."""
        self.get_course(course_id)
        query = "SELECT * FROM questions WHERE course_id = ? AND deleted = 0"
        params: list[Any] = [course_id]
        if topic is not None:
            query += " AND topic = ?"
            params.append(topic)
        if sub_topic is not None:
            query += " AND sub_topic = ?"
            params.append(sub_topic)
        query += " ORDER BY topic, sub_topic, created_at, id"
        with self._store.read() as conn:
            rows = conn.execute(query, params).fetchall()
        return [_row_to_summary(row) for row in rows]

    def list_by_index(self, course_id: str, topic: str, sub_topic: str) -> list[str]:
        with self._store.read() as conn:
            rows = conn.execute(
                "SELECT id FROM questions WHERE course_id = ? AND topic = ? AND sub_topic = ?"
                " AND deleted = 0 ORDER BY created_at, id",
                (course_id, topic, sub_topic),
            ).fetchall()
        return [r["id"] for r in rows]

    def delete_question(self, question_id: str) -> None:
        """Soft delete: the row stays so attempt history remains valid."""
        question = self.get_question(question_id)
        with self._store.keyed_lock("course", question.course_id):
            with self._store.transaction() as conn:
                conn.execute("UPDATE questions SET deleted = 1 WHERE id = ?", (question_id,))

    def get_media(self, digest: str) -> tuple[bytes, str]:
        with self._store.read() as conn:
            row = conn.execute(
                "SELECT content, media_type FROM media_blobs WHERE digest = ?", (digest,)
            ).fetchone()
        if row is None:
            raise NotFound("media", digest)
        return bytes(row["content"]), row["media_type"]

    # -- course files ---------------------------------------------------

    def export_course(self, course_id: str) -> dict[str, Any]:
        """Portable JSON-shaped course file (schema documented in docs/api.md)."""
        course = self.get_course(course_id)
        questions = [
            self.get_question(summary.id) for summary in self.list_catalog(course_id)
        ]
        media: dict[str, dict[str, str]] = {}
        for q in questions:
            for ref in q.media:
                if ref.digest not in media:
                    content, media_type = self.get_media(ref.digest)
                    media[ref.digest] = {
                        "media_type": media_type,
                        "content_b64": base64.b64encode(content).decode("ascii"),
                    }
        return {
            "schema_version": COURSE_FILE_SCHEMA_VERSION,
            "course": {
                "id": course.id,
                "title": course.title,
                "description": course.description,
                "feedback_enabled": course.feedback_enabled,
            },
            "questions": [_question_to_file(q) for q in questions],
            "media": media,
        }

    def import_course(self, data: dict[str, Any]) -> Course:
        """Load a course file. File-local question ids are remapped to fresh
        ids (preserving the related-link topology) so a file can be imported
        into any store, repeatedly. Questions load in dependency order."""
        if data.get("schema_version") != COURSE_FILE_SCHEMA_VERSION:
            raise ValidationError.single(
                "schema_version", f"expected {COURSE_FILE_SCHEMA_VERSION!r}"
            )
        spec = data["course"]
        course = self.create_course(
            spec["title"], spec.get("description", ""), bool(spec.get("feedback_enabled", True))
        )
        media = data.get("media", {})
        pending = list(data.get("questions", []))
        id_map: dict[str, str] = {}
        while pending:
            progressed = False
            remaining = []
            for q in pending:
                related = set(q.get("related_question_ids", []))
                if related - set(id_map):
                    remaining.append(q)
                    continue
                draft = _file_to_draft(q, media)
                draft.id = None
                draft.related_question_ids = {id_map[rid] for rid in related}
                stored = self.upsert_question(course.id, draft)
                id_map[q["id"]] = stored.id
                progressed = True
            if not progressed:
                raise DanglingReference(
                    sorted(
                        {rid for q in remaining for rid in q.get("related_question_ids", [])}
                        - set(id_map)
                    )
                )
            pending = remaining
        return self.get_course(course.id)


# -- validation --------------------------------------------------------


def _validate_draft(draft: QuestionDraft):
    errors: list[dict[str, str]] = []
    if not draft.topic.strip():
        errors.append({"field": "topic", "message": "must be nonempty"})
    if not draft.sub_topic.strip():
        errors.append({"field": "sub_topic", "message": "must be nonempty"})
    if not draft.body.strip():
        errors.append({"field": "body", "message": "must be nonempty"})
    if draft.point_value < 1:
        errors.append({"field": "point_value", "message": "must be >= 1"})
    if draft.attempt_limit is not None and draft.attempt_limit < 1:
        errors.append({"field": "attempt_limit", "message": "must be >= 1 or unlimited"})

    options: list[Option] = []
    answer_key = {str(k) for k in draft.answer_key}
    kind = draft.kind

    if kind == QuestionKind.TRUE_FALSE:
        if draft.option_texts and [t for t in draft.option_texts] != [t for _, t in TRUE_FALSE_OPTIONS]:
            errors.append({"field": "options", "message": "true_false uses the fixed T/F pair"})
        options = [Option(key, text) for key, text in TRUE_FALSE_OPTIONS]
        if len(answer_key) != 1 or not answer_key <= {"T", "F"}:
            errors.append({"field": "answer_key", "message": "must be exactly one of {T, F}"})
    elif kind in (QuestionKind.SINGLE_CHOICE, QuestionKind.MULTIPLE_CHOICE):
        if len(draft.option_texts) < 2:
            errors.append({"field": "options", "message": "needs at least 2 options"})
        if len(draft.option_texts) > _MAX_OPTIONS:
            errors.append({"field": "options", "message": f"at most {_MAX_OPTIONS} options"})
        for i, text in enumerate(draft.option_texts):
            if not str(text).strip():
                errors.append({"field": f"options[{i}]", "message": "option text must be nonempty"})
        options = [
            Option(string.ascii_uppercase[i], str(text))
            for i, text in enumerate(draft.option_texts[:_MAX_OPTIONS])
        ]
        keys = {o.key for o in options}
        if kind == QuestionKind.SINGLE_CHOICE and len(answer_key) != 1:
            errors.append({"field": "answer_key", "message": "must contain exactly one key"})
        if kind == QuestionKind.MULTIPLE_CHOICE and not answer_key:
            errors.append({"field": "answer_key", "message": "must be nonempty"})
        if not answer_key <= keys:
            errors.append({"field": "answer_key", "message": "keys must reference listed options"})
    elif kind == QuestionKind.SHORT_ANSWER:
        if draft.option_texts:
            errors.append({"field": "options", "message": "short_answer takes no options"})
        if answer_key:
            errors.append({"field": "answer_key", "message": "short_answer has no answer key"})
        if not draft.reference_answer.strip():
            errors.append({"field": "reference_answer", "message": "required for short_answer"})
    else:  # pragma: no cover - enum is closed
        errors.append({"field": "kind", "message": f"unknown kind {kind!r}"})

    return options, answer_key, errors


# -- row mapping -------------------------------------------------------


def _row_to_question(row) -> Question:
    return Question(
        id=row["id"],
        course_id=row["course_id"],
        topic=row["topic"],
        sub_topic=row["sub_topic"],
        kind=QuestionKind(row["kind"]),
        body=row["body"],
        options=tuple(Option(k, t) for k, t in json.loads(row["options"])),
        answer_key=frozenset(json.loads(row["answer_key"])),
        reference_answer=row["reference_answer"],
        explanation=row["explanation"],
        context=row["context"],
        media=tuple(MediaRef(d, m) for d, m in json.loads(row["media"])),
        point_value=row["point_value"],
        attempt_limit=row["attempt_limit"],
        related_question_ids=tuple(json.loads(row["related_ids"])),
        created_at=parse_ts(row["created_at"]),
        updated_at=parse_ts(row["updated_at"]),
        deleted=bool(row["deleted"]),
    )


def _row_to_summary(row) -> QuestionSummary:
    return QuestionSummary(
        id=row["id"],
        course_id=row["course_id"],
        topic=row["topic"],
        sub_topic=row["sub_topic"],
        kind=QuestionKind(row["kind"]),
        body=row["body"],
        options=tuple(Option(k, t) for k, t in json.loads(row["options"])),
        media=tuple(MediaRef(d, m) for d, m in json.loads(row["media"])),
        point_value=row["point_value"],
        attempt_limit=row["attempt_limit"],
    )


def _question_to_file(q: Question) -> dict[str, Any]:
    return {
        "id": q.id,
        "topic": q.topic,
        "sub_topic": q.sub_topic,
        "kind": q.kind.value,
        "body": q.body,
        "options": [o.text for o in q.options] if q.kind != QuestionKind.TRUE_FALSE else [],
        "answer_key": sorted(q.answer_key),
        "reference_answer": q.reference_answer,
        "explanation": q.explanation,
        "context": q.context,
        "media_digests": [[m.digest, m.media_type] for m in q.media],
        "point_value": q.point_value,
        "attempt_limit": q.attempt_limit,
        "related_question_ids": list(q.related_question_ids),
    }


def _file_to_draft(q: dict[str, Any], media: dict[str, dict[str, str]]) -> QuestionDraft:
    drafts = []
    for digest, _media_type in q.get("media_digests", []):
        blob = media.get(digest)
        if blob is None:
            raise ValidationError.single("media", f"course file missing blob {digest!r}")
        drafts.append(
            MediaDraft(
                content=base64.b64decode(blob["content_b64"]),
                media_type=blob["media_type"],
            )
        )
    return QuestionDraft(
        id=q["id"],
        topic=q["topic"],
        sub_topic=q["sub_topic"],
        kind=QuestionKind(q["kind"]),
        body=q["body"],
        option_texts=list(q.get("options", [])),
        answer_key=set(q.get("answer_key", [])),
        reference_answer=q.get("reference_answer", ""),
        explanation=q.get("explanation", ""),
        context=q.get("context", ""),
        media=drafts,
        point_value=int(q.get("point_value", 1)),
        attempt_limit=q.get("attempt_limit"),
        related_question_ids=set(q.get("related_question_ids", [])),
    )

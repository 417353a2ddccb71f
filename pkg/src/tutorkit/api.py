"""HTTP boundary: bearer-token sessions, instructor and student routes,
CORS, and machine-readable error bodies.

Student-facing payloads pass the redaction projection: no answer keys,
reference answers, explanations, or instructor context before
completion. Error bodies are ``{"error_code", "message", "details"}``.
Routes are documented in docs/api.md.
"""

from __future__ import annotations

import base64
from datetime import datetime, timezone
from typing import Any

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import (
    AttemptLimitExceeded,
    AuthError,
    DanglingReference,
    NotFound,
    OrderingError,
    PayloadShapeError,
    ProviderError,
    MissingResponse,
    RangeError,
    TutorError,
    ValidationError,
)
from .models import (
    Course,
    MediaDraft,
    MediaRef,
    Question,
    QuestionDraft,
    QuestionKind,
    QuestionSummary,
    Role,
    Session,
)
from .service import TutoringService

_STATUS_BY_ERROR: dict[type[TutorError], int] = {
    ValidationError: 422,
    PayloadShapeError: 422,
    OrderingError: 422,
    RangeError: 422,
    MissingResponse: 422,
    NotFound: 404,
    DanglingReference: 409,
    AttemptLimitExceeded: 409,
    AuthError: 403,
    ProviderError: 502,
}


# -- request/response bodies -------------------------------------------------


class CourseIn(BaseModel):
    title: str
    description: str = ""
    feedback_enabled: bool = True


class CoursePatch(BaseModel):
    title: str | None = None
    description: str | None = None
    feedback_enabled: bool | None = None


class MediaIn(BaseModel):
    content_b64: str
    media_type: str


class QuestionIn(BaseModel):
    topic: str
    sub_topic: str
    kind: QuestionKind
    body: str
    options: list[str] = Field(default_factory=list)
    answer_key: list[str] = Field(default_factory=list)
    reference_answer: str = ""
    explanation: str = ""
    context: str = ""
    media: list[MediaIn] = Field(default_factory=list)
    media_digests: list[str] = Field(default_factory=list)
    point_value: int = 1
    attempt_limit: int | None = None
    related_question_ids: list[str] = Field(default_factory=list)
    id: str | None = None


class StudentIn(BaseModel):
    display_name: str = ""
    email: str = ""


class AttemptIn(BaseModel):
    answer: list[str] | str
    opened_at: datetime


class QuestionnaireIn(BaseModel):
    answers: dict[str, int | str]


# -- serialization helpers ----------------------------------------------------


def _course_payload(course: Course) -> dict[str, Any]:
    return {
        "id": course.id,
        "title": course.title,
        "description": course.description,
        "feedback_enabled": course.feedback_enabled,
        "cohort": course.cohort,
        "topic_index": {k: list(v) for k, v in course.topic_index.items()},
        "created_at": course.created_at.isoformat(),
    }


def _media_payload(media: tuple[MediaRef, ...]) -> list[dict[str, str]]:
    return [{"digest": m.digest, "media_type": m.media_type} for m in media]


def _summary_payload(summary: QuestionSummary) -> dict[str, Any]:
    return {
        "id": summary.id,
        "course_id": summary.course_id,
        "topic": summary.topic,
        "sub_topic": summary.sub_topic,
        "kind": summary.kind.value,
        "body": summary.body,
        "options": [{"key": o.key, "text": o.text} for o in summary.options],
        "media": _media_payload(summary.media),
        "point_value": summary.point_value,
        "attempt_limit": summary.attempt_limit,
    }


def _student_question_payload(question: Question) -> dict[str, Any]:
    return {
        "id": question.id,
        "course_id": question.course_id,
        "topic": question.topic,
        "sub_topic": question.sub_topic,
        "kind": question.kind.value,
        "body": question.body,
        "options": [{"key": o.key, "text": o.text} for o in question.options],
        "media": _media_payload(question.media),
        "point_value": question.point_value,
        "attempt_limit": question.attempt_limit,
        "related_question_ids": list(question.related_question_ids),
    }


def _instructor_question_payload(question: Question) -> dict[str, Any]:
    payload = _student_question_payload(question)
    payload.update(
        {
            "answer_key": sorted(question.answer_key),
            "reference_answer": question.reference_answer,
            "explanation": question.explanation,
            "context": question.context,
            "created_at": question.created_at.isoformat(),
            "updated_at": question.updated_at.isoformat(),
        }
    )
    return payload


def _draft_from_body(body: QuestionIn) -> QuestionDraft:
    media: list[Any] = [
        MediaDraft(content=base64.b64decode(m.content_b64), media_type=m.media_type)
        for m in body.media
    ]
    media.extend(MediaRef(digest=d, media_type="") for d in body.media_digests)
    return QuestionDraft(
        id=body.id,
        topic=body.topic,
        sub_topic=body.sub_topic,
        kind=body.kind,
        body=body.body,
        option_texts=list(body.options),
        answer_key=set(body.answer_key),
        reference_answer=body.reference_answer,
        explanation=body.explanation,
        context=body.context,
        media=media,
        point_value=body.point_value,
        attempt_limit=body.attempt_limit,
        related_question_ids=set(body.related_question_ids),
    )


def _ensure_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts


# -- app factory ---------------------------------------------------------------


def create_app(service: TutoringService, *, cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="tutorkit", version="0.1.0")
    origins = cors_origins if cors_origins is not None else service.config.cors_origins
    if origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=origins,
            allow_methods=["*"],
            allow_headers=["*"],
            allow_credentials=True,
        )

    @app.exception_handler(TutorError)
    async def _tutor_error(_: Request, exc: TutorError) -> JSONResponse:
        status = 500
        for klass, code in _STATUS_BY_ERROR.items():
            if isinstance(exc, klass):
                status = code
                break
        return JSONResponse(
            status_code=status,
            content={"error_code": exc.error_code, "message": exc.message, "details": exc.details},
        )

    def current_session(authorization: str | None = Header(default=None)) -> Session:
        if not authorization or not authorization.lower().startswith("bearer "):
            raise AuthError("missing bearer token")
        return service.resolve_session(authorization.split(" ", 1)[1].strip())

    def instructor(session: Session = Depends(current_session)) -> Session:
        service.require_role(session, Role.INSTRUCTOR)
        return session

    def student(session: Session = Depends(current_session)) -> Session:
        service.require_role(session, Role.STUDENT)
        return session

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    # -- sessions ------------------------------------------------------------

    @app.post("/sessions/students", status_code=201)
    def create_student_session(body: StudentIn, _: Session = Depends(instructor)):
        session = service.register_student(body.display_name, body.email)
        return {"session_token": session.token, "student_token": session.student_token}

    @app.get("/sessions/me")
    def whoami(session: Session = Depends(current_session)):
        return {
            "role": session.role.value,
            "student_token": session.student_token,
        }

    # -- courses ---------------------------------------------------------------

    @app.get("/courses")
    def list_courses(_: Session = Depends(current_session)):
        return [_course_payload(c) for c in service.content.list_courses()]

    @app.post("/courses", status_code=201)
    def create_course(body: CourseIn, _: Session = Depends(instructor)):
        course = service.content.create_course(body.title, body.description, body.feedback_enabled)
        return _course_payload(course)

    @app.get("/courses/{course_id}")
    def get_course(course_id: str, _: Session = Depends(current_session)):
        return _course_payload(service.content.get_course(course_id))

    @app.patch("/courses/{course_id}")
    def update_course(course_id: str, body: CoursePatch, _: Session = Depends(instructor)):
        course = service.content.update_course(
            course_id,
            title=body.title,
            description=body.description,
            feedback_enabled=body.feedback_enabled,
        )
        return _course_payload(course)

    @app.delete("/courses/{course_id}", status_code=204)
    def delete_course(course_id: str, _: Session = Depends(instructor)):
        service.content.delete_course(course_id)
        return Response(status_code=204)

    # -- questions ---------------------------------------------------------------

    @app.get("/courses/{course_id}/questions")
    def list_questions(
        course_id: str,
        topic: str | None = None,
        sub_topic: str | None = None,
        _: Session = Depends(current_session),
    ):
        summaries = service.content.list_catalog(course_id, topic=topic, sub_topic=sub_topic)
        return [_summary_payload(s) for s in summaries]

    @app.post("/courses/{course_id}/questions", status_code=201)
    def upsert_question(course_id: str, body: QuestionIn, _: Session = Depends(instructor)):
        question = service.content.upsert_question(course_id, _draft_from_body(body))
        return _instructor_question_payload(question)

    @app.get("/questions/{question_id}")
    def get_question(question_id: str, session: Session = Depends(current_session)):
        question = service.content.get_question(question_id)
        if session.role == Role.INSTRUCTOR:
            return _instructor_question_payload(question)
        return _student_question_payload(question)

    @app.delete("/questions/{question_id}", status_code=204)
    def delete_question(question_id: str, _: Session = Depends(instructor)):
        service.content.delete_question(question_id)
        return Response(status_code=204)

    @app.get("/media/{digest}")
    def get_media(digest: str, _: Session = Depends(current_session)):
        content, media_type = service.content.get_media(digest)
        return Response(content=content, media_type=media_type)

    # -- attempts ----------------------------------------------------------------

    @app.post("/questions/{question_id}/attempts")
    def submit_attempt(
        question_id: str, body: AttemptIn, session: Session = Depends(student)
    ):
        payload = body.answer if isinstance(body.answer, str) else set(body.answer)
        outcome = service.submit_answer(
            session, question_id, payload, _ensure_utc(body.opened_at)
        )
        return {
            "correct": outcome.correct,
            "hint": outcome.hint,
            "attempts_remaining": outcome.attempts_remaining,
            "points_awarded": outcome.points_awarded,
            "explanation": outcome.explanation,
            "hint_unavailable": outcome.hint_unavailable,
        }

    @app.get("/me/score")
    def my_score(session: Session = Depends(student)):
        return {"score": service.student_score(session)}

    # -- analytics -----------------------------------------------------------------

    @app.get("/courses/{course_id}/report.csv")
    def download_report(course_id: str, _: Session = Depends(instructor)):
        data = service.engagement_csv(course_id)
        return Response(
            content=data,
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": f'attachment; filename="report-{course_id}.csv"'},
        )

    @app.get("/courses/{course_id}/report")
    def report_json(course_id: str, _: Session = Depends(instructor)):
        report = service.analytics.engagement_report(course_id)
        return {
            "course_id": report.course_id,
            "cohort": report.cohort,
            "rows": [
                {
                    "student_token": r.student_token,
                    "question_id": r.question_id,
                    "total_attempts": r.total_attempts,
                    "correct": r.correct,
                    "correctness_ratio": r.correctness_ratio,
                    "first_opened_at": r.first_opened_at.isoformat(),
                    "last_submitted_at": r.last_submitted_at.isoformat(),
                    "time_spent_seconds": r.time_spent_seconds,
                    "points_awarded": r.points_awarded,
                    "hints": r.hints,
                }
                for r in report.rows
            ],
            "per_question": [
                {
                    "question_id": q.question_id,
                    "topic": q.topic,
                    "sub_topic": q.sub_topic,
                    "students": q.students,
                    "mean_attempts": q.mean_attempts,
                    "mean_time_seconds": q.mean_time_seconds,
                    "success_rate_by_attempt": q.success_rate_by_attempt,
                }
                for q in report.per_question
            ],
        }

    @app.get("/courses/{course_id}/export")
    def export_course(course_id: str, _: Session = Depends(instructor)):
        return service.content.export_course(course_id)

    @app.post("/courses/import", status_code=201)
    def import_course(body: dict[str, Any], _: Session = Depends(instructor)):
        return _course_payload(service.content.import_course(body))

    # -- questionnaire ----------------------------------------------------------------

    @app.get("/questionnaire")
    def questionnaire_spec(_: Session = Depends(current_session)):
        return service.questionnaire_spec.to_dict()

    @app.post("/questionnaire/responses", status_code=201)
    def submit_questionnaire(body: QuestionnaireIn, session: Session = Depends(student)):
        service.submit_questionnaire(session, body.answers)
        return {"status": "recorded"}

    @app.get("/questionnaire/results")
    def questionnaire_results(_: Session = Depends(instructor)):
        result = service.questionnaire_results()
        return {
            "per_dimension_scores": result.per_dimension_scores,
            "consistency_pass": result.consistency_pass,
            "flagged_pairs": [
                {
                    "respondent": f.respondent,
                    "item": f.item,
                    "duplicate_of": f.duplicate_of,
                    "difference": f.difference,
                }
                for f in result.flagged_pairs
            ],
            "open_responses": result.open_responses,
            "respondents": result.respondents,
        }

    return app

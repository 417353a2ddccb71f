"""Orchestration layer tying content, learner state, the tutor engine,
and analytics together behind session-scoped operations.

The answer-submission pipeline: grade -> append attempt -> (when wrong
and the course has feedback enabled) error history -> prompt -> hint ->
attach hint to the attempt. A provider failure during hint generation
never fails the submission; the attempt is already logged and the
caller is told the hint is unavailable. A provider failure during
short-answer grading surfaces as an error and records nothing: an
ungradable attempt is never silently scored.
"""

from __future__ import annotations

import json
import secrets
from datetime import datetime

from .analytics import AnalyticsEngine, export_csv
from .config import ServiceConfig
from .content import ContentManager
from .errors import AttemptLimitExceeded, AuthError, NotFound, ProviderError
from .grading import canonicalize_payload, grade
from .learner import LearnerState
from .models import (
    Role,
    Session,
    SubmitOutcome,
    new_id,
    payload_display,
    utcnow,
)
from .prompts import build_prompt, specificity_for
from .hints import generate_hint
from .providers import ChatCompletionClient, CompletionProvider, MockProvider
from .questionnaire import QuestionnaireResult, default_spec, score_dimensions
from .redaction import Pseudonymizer
from .store import Store


def provider_from_config(config: ServiceConfig) -> CompletionProvider:
    if config.provider.use_mock or not config.provider.base_url:
        return MockProvider()
    return ChatCompletionClient(
        config.provider.base_url,
        config.provider.model,
        config.provider.api_key,
        timeout_seconds=config.provider.timeout_seconds,
        max_in_flight=config.provider.max_in_flight,
    )


class TutoringService:
    def __init__(
        self,
        store: Store,
        provider: CompletionProvider,
        config: ServiceConfig | None = None,
    ) -> None:
        self.store = store
        self.provider = provider
        self.config = config or ServiceConfig()
        self.content = ContentManager(store)
        self.learner = LearnerState(store, self.content)
        self.pseudonymizer = Pseudonymizer(store.token_salt)
        self.analytics = AnalyticsEngine(self.content, self.learner, self.pseudonymizer)
        self.questionnaire_spec = default_spec()
        if self.config.instructor_token:
            self.register_instructor_session(self.config.instructor_token)

    # -- sessions ---------------------------------------------------------

    def register_instructor_session(self, token: str | None = None) -> Session:
        token = token or secrets.token_urlsafe(24)
        with self.store.transaction() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO sessions (token, role, student_id, created_at)"
                " VALUES (?, ?, NULL, ?)",
                (token, Role.INSTRUCTOR.value, utcnow().isoformat()),
            )
        return Session(token=token, role=Role.INSTRUCTOR)

    def register_student(self, display_name: str = "", email: str = "") -> Session:
        """Create a student record plus a session. The display name and
        email stay inside the store; only the pseudonymous student token
        ever leaves the service."""
        student_id = new_id()
        token = secrets.token_urlsafe(24)
        with self.store.transaction() as conn:
            conn.execute(
                "INSERT INTO students (id, display_name, email, created_at) VALUES (?, ?, ?, ?)",
                (student_id, display_name, email, utcnow().isoformat()),
            )
            conn.execute(
                "INSERT INTO sessions (token, role, student_id, created_at) VALUES (?, ?, ?, ?)",
                (token, Role.STUDENT.value, student_id, utcnow().isoformat()),
            )
        return Session(
            token=token,
            role=Role.STUDENT,
            student_id=student_id,
            student_token=self.pseudonymizer.token_for(student_id),
        )

    def resolve_session(self, token: str) -> Session:
        with self.store.read() as conn:
            row = conn.execute("SELECT * FROM sessions WHERE token = ?", (token,)).fetchone()
        if row is None:
            raise AuthError("unknown session token")
        student_id = row["student_id"]
        return Session(
            token=token,
            role=Role(row["role"]),
            student_id=student_id,
            student_token=self.pseudonymizer.token_for(student_id) if student_id else None,
        )

    @staticmethod
    def require_role(session: Session, role: Role) -> None:
        if session.role != role:
            raise AuthError(f"requires {role.value} role")

    # -- student flow -------------------------------------------------------

    def submit_answer(
        self,
        session: Session,
        question_id: str,
        answer_payload,
        opened_at: datetime,
        *,
        submitted_at: datetime | None = None,
    ) -> SubmitOutcome:
        self.require_role(session, Role.STUDENT)
        student_id = session.student_id
        assert student_id is not None

        question, related = self.content.get_question_bundle(question_id)
        course = self.content.get_course(question.course_id)

        prior_attempts = self.learner.attempt_count(student_id, question_id)
        if question.attempt_limit is not None and prior_attempts >= question.attempt_limit:
            raise AttemptLimitExceeded(
                question_id, question.attempt_limit, explanation=question.explanation
            )

        payload = canonicalize_payload(question, answer_payload)
        correct, verdict = grade(
            question,
            payload,
            provider=self.provider,
            temperature=self.config.provider.temperature,
        )

        first_correct = correct and not self.learner.has_correct_attempt(student_id, question_id)
        points = question.point_value if first_correct else 0

        attempt = self.learner.record_attempt(
            student_id,
            question_id,
            opened_at,
            payload,
            correct,
            points=points,
            submitted_at=submitted_at,
            misconception_label=verdict.misconception_label if verdict else None,
        )

        hint_text: str | None = None
        hint_unavailable = False
        if not correct and course.feedback_enabled:
            hint_text, hint_unavailable = self._make_hint(
                student_id, question, related, attempt, payload
            )

        remaining = (
            None
            if question.attempt_limit is None
            else question.attempt_limit - attempt.attempt_ordinal
        )
        reveal = correct or remaining == 0
        return SubmitOutcome(
            correct=correct,
            hint=hint_text,
            attempts_remaining=remaining,
            points_awarded=points,
            explanation=question.explanation if reveal else None,
            hint_unavailable=hint_unavailable,
        )

    def _make_hint(self, student_id, question, related, attempt, payload):
        related_ids = [q.id for q in related]
        history = self.learner.get_error_history(student_id, question.id, related_ids)
        # The triggering attempt is already in the log; specificity and the
        # ERROR_HISTORY section consider only attempts before it.
        prior = history.excluding(attempt.id)
        tags = []
        for qid in [question.id, *related_ids]:
            tags.extend(
                self.learner.recurring_misconceptions(
                    student_id, qid, self.config.recurrence_threshold
                )
            )
        level = specificity_for(prior, tags, cap=self.config.specificity_cap)
        bundle = build_prompt(
            question,
            related,
            question.context,
            prior,
            tags,
            level,
            temperature=self.config.provider.temperature,
            current_answer=payload_display(payload),
        )
        try:
            result = generate_hint(self.provider, bundle, question)
        except ProviderError:
            return None, True
        self.learner.attach_hint(attempt.id, result.hint_text)
        return result.hint_text, False

    def student_score(self, session: Session) -> int:
        self.require_role(session, Role.STUDENT)
        assert session.student_id is not None
        return self.learner.student_score(session.student_id)

    # -- questionnaire -------------------------------------------------------

    def submit_questionnaire(self, session: Session, answers: dict) -> None:
        self.require_role(session, Role.STUDENT)
        assert session.student_id is not None
        with self.store.transaction() as conn:
            conn.execute(
                "INSERT INTO questionnaire_responses (id, student_id, submitted_at, answers)"
                " VALUES (?, ?, ?, ?)",
                (new_id(), session.student_id, utcnow().isoformat(), json.dumps(answers)),
            )

    def questionnaire_results(self) -> QuestionnaireResult:
        with self.store.read() as conn:
            rows = conn.execute(
                "SELECT answers FROM questionnaire_responses ORDER BY submitted_at, id"
            ).fetchall()
        if not rows:
            raise NotFound("questionnaire_responses", "any")
        responses = [json.loads(r["answers"]) for r in rows]
        return score_dimensions(self.questionnaire_spec, responses)

    # -- instructor flow -------------------------------------------------------

    def engagement_csv(self, course_id: str) -> bytes:
        return export_csv(self.analytics.engagement_report(course_id))

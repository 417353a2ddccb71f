from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from tutorkit import MockProvider, ServiceConfig, Store, TutoringService
from tutorkit.content import ContentManager
from tutorkit.learner import LearnerState
from tutorkit.models import QuestionDraft, QuestionKind

T0 = datetime(2026, 3, 2, 9, 0, 0, tzinfo=timezone.utc)


def at(seconds: float) -> datetime:
    """Deterministic timestamp ``seconds`` after the fixture epoch."""
    return T0 + timedelta(seconds=seconds)


@pytest.fixture
def store() -> Store:
    return Store(":memory:")


@pytest.fixture
def content(store: Store) -> ContentManager:
    return ContentManager(store)


@pytest.fixture
def learner(store: Store, content: ContentManager) -> LearnerState:
    return LearnerState(store, content)


@pytest.fixture
def course(content: ContentManager):
    return content.create_course("Pavement Eng 101", "intro course", True)


def draft(
    kind: QuestionKind = QuestionKind.SINGLE_CHOICE,
    *,
    topic: str = "traffic loading",
    sub_topic: str = "axle loads",
    body: str = "Which axle configuration does the standard design load represent?",
    options: list[str] | None = None,
    answer_key: set | None = None,
    reference_answer: str = "",
    explanation: str = "",
    context: str = "",
    point_value: int = 2,
    attempt_limit: int | None = 3,
    related: set | None = None,
    question_id: str | None = None,
) -> QuestionDraft:
    if kind == QuestionKind.TRUE_FALSE:
        options = []
        answer_key = answer_key if answer_key is not None else {"T"}
    elif kind == QuestionKind.SHORT_ANSWER:
        options = []
        answer_key = set()
        reference_answer = reference_answer or "a single standard axle"
    else:
        options = options if options is not None else ["Single axle", "Tandem axle", "Tridem axle", "Steering axle"]
        answer_key = answer_key if answer_key is not None else {"A"}
    return QuestionDraft(
        id=question_id,
        topic=topic,
        sub_topic=sub_topic,
        kind=kind,
        body=body,
        option_texts=options,
        answer_key=answer_key,
        reference_answer=reference_answer,
        explanation=explanation,
        context=context,
        point_value=point_value,
        attempt_limit=attempt_limit,
        related_question_ids=related or set(),
    )


def make_service(
    provider: MockProvider | None = None,
    *,
    config: ServiceConfig | None = None,
) -> TutoringService:
    return TutoringService(Store(":memory:"), provider or MockProvider(), config or ServiceConfig())


@pytest.fixture
def service() -> TutoringService:
    return make_service()

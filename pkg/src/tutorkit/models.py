"""Domain types: courses, questions, attempts, profiles, prompts, outcomes."""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Union


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def new_id() -> str:
    return uuid.uuid4().hex


def parse_ts(value: str) -> datetime:
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


_WS_RE = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Lowercase and collapse whitespace; the comparison form used for
    leak scanning and short-answer signatures."""
    return _WS_RE.sub(" ", text.strip().lower())


class Role(str, Enum):
    STUDENT = "student"
    INSTRUCTOR = "instructor"


class QuestionKind(str, Enum):
    MULTIPLE_CHOICE = "multiple_choice"
    SINGLE_CHOICE = "single_choice"
    TRUE_FALSE = "true_false"
    SHORT_ANSWER = "short_answer"


CHOICE_KINDS = frozenset(
    {QuestionKind.MULTIPLE_CHOICE, QuestionKind.SINGLE_CHOICE, QuestionKind.TRUE_FALSE}
)

TRUE_FALSE_OPTIONS = (("T", "True"), ("F", "False"))

# An answer is either a set of option keys (choice kinds) or free text.
AnswerPayload = Union[frozenset, str]


def canonical_key_signature(keys) -> str:
    """Deterministic rendering of an option-key set, e.g. ``"A+C"``."""
    return "+".join(sorted(keys))


def payload_display(payload: AnswerPayload) -> str:
    if isinstance(payload, frozenset):
        return canonical_key_signature(payload)
    return payload


@dataclass(frozen=True)
class MediaRef:
    """Content-addressed pointer to an uploaded image; blobs live in the store."""

    digest: str
    media_type: str


@dataclass(frozen=True)
class Option:
    key: str
    text: str


@dataclass
class Course:
    id: str
    title: str
    description: str
    feedback_enabled: bool
    created_at: datetime
    # topic -> ordered sub-topics, derived from the course's questions.
    topic_index: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def cohort(self) -> str:
        return "hints_on" if self.feedback_enabled else "hints_off"


@dataclass
class Question:
    id: str
    course_id: str
    topic: str
    sub_topic: str
    kind: QuestionKind
    body: str
    options: tuple[Option, ...]
    answer_key: frozenset
    reference_answer: str
    explanation: str
    context: str
    media: tuple[MediaRef, ...]
    point_value: int
    attempt_limit: int | None  # None = unlimited
    related_question_ids: tuple[str, ...]
    created_at: datetime
    updated_at: datetime
    deleted: bool = False

    def option_text(self, key: str) -> str:
        for opt in self.options:
            if opt.key == key:
                return opt.text
        raise KeyError(key)

    @property
    def correct_option_texts(self) -> tuple[str, ...]:
        return tuple(opt.text for opt in self.options if opt.key in self.answer_key)


@dataclass
class MediaDraft:
    content: bytes
    media_type: str


@dataclass
class QuestionDraft:
    """Instructor-submitted question content; keys are assigned on upsert."""

    topic: str
    sub_topic: str
    kind: QuestionKind
    body: str
    option_texts: list[str] = field(default_factory=list)
    answer_key: set = field(default_factory=set)
    reference_answer: str = ""
    explanation: str = ""
    context: str = ""
    media: list = field(default_factory=list)  # MediaDraft or MediaRef
    point_value: int = 1
    attempt_limit: int | None = None
    related_question_ids: set = field(default_factory=set)
    id: str | None = None  # present when editing


@dataclass
class QuestionSummary:
    """Student-facing projection: no answer key, reference answer,
    explanation, or instructor context."""

    id: str
    course_id: str
    topic: str
    sub_topic: str
    kind: QuestionKind
    body: str
    options: tuple[Option, ...]
    media: tuple[MediaRef, ...]
    point_value: int
    attempt_limit: int | None


@dataclass
class Attempt:
    id: str
    student_id: str
    question_id: str
    course_id: str
    opened_at: datetime
    submitted_at: datetime
    answer_payload: AnswerPayload
    correct: bool
    hint_text: str | None
    points_awarded: int
    attempt_ordinal: int
    misconception_signature: str | None = None


@dataclass(frozen=True)
class MisconceptionTag:
    question_id: str
    signature: str


@dataclass
class RecurringMisconception:
    tag: MisconceptionTag
    count: int
    first_seen: datetime


@dataclass
class LearnerProfile:
    student_id: str
    misconception_counts: dict[MisconceptionTag, int]
    topic_error_counts: dict[tuple[str, str], int]
    last_updated: datetime | None


@dataclass
class ErrorHistoryEntry:
    attempt_id: str
    question_id: str
    attempt_ordinal: int
    wrong_answer: str  # canonical display form
    hint_text: str | None
    submitted_at: datetime


@dataclass
class ErrorHistory:
    """Chronological incorrect attempts on a focal question and its
    related questions."""

    question_id: str
    entries: list[ErrorHistoryEntry]

    def excluding(self, attempt_id: str) -> "ErrorHistory":
        return ErrorHistory(
            question_id=self.question_id,
            entries=[e for e in self.entries if e.attempt_id != attempt_id],
        )

    def on_focal_question(self) -> list[ErrorHistoryEntry]:
        return [e for e in self.entries if e.question_id == self.question_id]


class SectionLabel(str, Enum):
    SYSTEM_DIRECTIVES = "SYSTEM_DIRECTIVES"
    CURRENT_ITEM = "CURRENT_ITEM"
    INSTRUCTOR_CONTEXT = "INSTRUCTOR_CONTEXT"
    ERROR_HISTORY = "ERROR_HISTORY"
    RELATED_CONTEXT = "RELATED_CONTEXT"


@dataclass
class PromptSection:
    label: SectionLabel
    content: str


@dataclass
class PromptBundle:
    sections: list[PromptSection]
    specificity_level: int
    temperature: float

    def section(self, label: SectionLabel) -> str | None:
        for sec in self.sections:
            if sec.label == label:
                return sec.content
        return None

    @property
    def labels(self) -> list[SectionLabel]:
        return [sec.label for sec in self.sections]


@dataclass
class GradeVerdict:
    correct: bool
    explanation: str
    misconception_label: str | None = None


@dataclass
class HintResult:
    hint_text: str
    specificity_level: int
    leak_filtered: bool
    provider: str
    latency_seconds: float


@dataclass
class Session:
    token: str
    role: Role
    student_id: str | None = None
    student_token: str | None = None


@dataclass
class SubmitOutcome:
    correct: bool
    hint: str | None
    attempts_remaining: int | None  # None = unlimited
    points_awarded: int
    explanation: str | None  # revealed on correct answer or limit exhaustion
    hint_unavailable: bool = False


@dataclass
class EngagementRow:
    student_token: str
    question_id: str
    total_attempts: int
    correct: bool
    correctness_ratio: float  # per student across attempted questions
    first_opened_at: datetime
    last_submitted_at: datetime
    time_spent_seconds: float
    hints: list[str]
    points_awarded: int


@dataclass
class QuestionAggregate:
    question_id: str
    topic: str
    sub_topic: str
    students: int
    mean_attempts: float
    mean_time_seconds: float
    # n -> fraction of students whose first correct attempt has ordinal <= n
    success_rate_by_attempt: dict[int, float]


@dataclass
class EngagementReport:
    course_id: str
    cohort: str
    rows: list[EngagementRow]
    per_question: list[QuestionAggregate]

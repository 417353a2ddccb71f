"""tutorkit: a self-hostable tutoring service with adaptive AI hints,
misconception tracking, auto-grading, and learning analytics."""

from .analytics import AnalyticsEngine, CSV_HEADER, export_csv
from .api import create_app
from .config import ServiceConfig, load_config
from .content import ContentManager
from .errors import (
    AttemptLimitExceeded,
    AuthError,
    DanglingReference,
    MissingResponse,
    NotFound,
    OrderingError,
    PayloadShapeError,
    ProviderError,
    RangeError,
    TutorError,
    ValidationError,
)
from .grading import canonicalize_payload, grade
from .hints import generate_hint
from .learner import LearnerState
from .prompts import build_prompt, specificity_for
from .providers import ChatCompletionClient, MockProvider
from .questionnaire import (
    QuestionnaireSpec,
    consistency_check,
    default_spec,
    reverse_code,
    score_dimensions,
)
from .redaction import Pseudonymizer, redact, redact_text
from .service import TutoringService, provider_from_config
from .store import Store

__version__ = "0.1.0"

__all__ = [
    "AnalyticsEngine",
    "AttemptLimitExceeded",
    "AuthError",
    "CSV_HEADER",
    "ChatCompletionClient",
    "ContentManager",
    "DanglingReference",
    "LearnerState",
    "MissingResponse",
    "MockProvider",
    "NotFound",
    "OrderingError",
    "PayloadShapeError",
    "ProviderError",
    "Pseudonymizer",
    "QuestionnaireSpec",
    "RangeError",
    "ServiceConfig",
    "Store",
    "TutorError",
    "TutoringService",
    "ValidationError",
    "build_prompt",
    "canonicalize_payload",
    "consistency_check",
    "create_app",
    "default_spec",
    "export_csv",
    "generate_hint",
    "grade",
    "load_config",
    "provider_from_config",
    "redact",
    "redact_text",
    "reverse_code",
    "score_dimensions",
    "specificity_for",
]

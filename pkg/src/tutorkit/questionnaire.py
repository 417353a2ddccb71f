"""Likert questionnaire definition and scoring.

Items sit on a 1..5 agreement scale across five scored dimensions plus
open-ended items. Negatively worded items are reverse-coded (v -> 6-v)
so higher always means better; per-respondent dimension means are
rescaled to a 10-point scale via v -> 2v (an affine map onto [0,10]
would be equally defensible; the choice is isolated in ``rescale``) and
averaged across respondents. Duplicate items provide a response
consistency screen on the raw values: a pair differing by more than one
point flags the respondent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

from .errors import MissingResponse, RangeError, ValidationError

SCALE_MIN = 1
SCALE_MAX = 5

OPEN_ENDED = "OpenEnded"
SCORED_DIMENSIONS = (
    "Effectiveness",
    "Engagement",
    "Adaptivity",
    "Satisfaction",
    "Accuracy",
)

CONSISTENCY_MAX_DIFFERENCE = 1


@dataclass(frozen=True)
class QuestionnaireItem:
    item_id: str
    dimension: str
    text: str
    negatively_worded: bool = False
    duplicate_of: str | None = None


@dataclass
class QuestionnaireSpec:
    items: tuple[QuestionnaireItem, ...]
    scale_min: int = SCALE_MIN
    scale_max: int = SCALE_MAX

    def __post_init__(self) -> None:
        seen: dict[str, QuestionnaireItem] = {}
        for item in self.items:
            if item.item_id in seen:
                raise ValidationError.single("items", f"duplicate item id {item.item_id!r}")
            if item.dimension != OPEN_ENDED and item.dimension not in SCORED_DIMENSIONS:
                raise ValidationError.single(
                    f"items[{item.item_id}].dimension", f"unknown dimension {item.dimension!r}"
                )
            if item.duplicate_of is not None:
                original = seen.get(item.duplicate_of)
                if original is None:
                    raise ValidationError.single(
                        f"items[{item.item_id}].duplicate_of",
                        "must reference an earlier item",
                    )
                if original.dimension != item.dimension:
                    raise ValidationError.single(
                        f"items[{item.item_id}].duplicate_of",
                        "duplicate pairs must share a dimension",
                    )
            seen[item.item_id] = item

    @property
    def scored_items(self) -> list[QuestionnaireItem]:
        return [i for i in self.items if i.dimension != OPEN_ENDED]

    @property
    def open_items(self) -> list[QuestionnaireItem]:
        return [i for i in self.items if i.dimension == OPEN_ENDED]

    @property
    def duplicate_pairs(self) -> list[tuple[str, str]]:
        return [(i.item_id, i.duplicate_of) for i in self.items if i.duplicate_of]

    def to_dict(self) -> dict[str, Any]:
        return {
            "scale_min": self.scale_min,
            "scale_max": self.scale_max,
            "items": [
                {
                    "item_id": i.item_id,
                    "dimension": i.dimension,
                    "text": i.text,
                    "negatively_worded": i.negatively_worded,
                    "duplicate_of": i.duplicate_of,
                }
                for i in self.items
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "QuestionnaireSpec":
        items = tuple(
            QuestionnaireItem(
                item_id=entry["item_id"],
                dimension=entry["dimension"],
                text=entry.get("text", ""),
                negatively_worded=bool(entry.get("negatively_worded", False)),
                duplicate_of=entry.get("duplicate_of"),
            )
            for entry in data["items"]
        )
        return cls(
            items=items,
            scale_min=int(data.get("scale_min", SCALE_MIN)),
            scale_max=int(data.get("scale_max", SCALE_MAX)),
        )


def load_spec(path: str | Path) -> QuestionnaireSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return QuestionnaireSpec.from_dict(json.load(fh))


def default_spec() -> QuestionnaireSpec:
    """The instrument shipped with the package: 22 items, five scored
    dimensions of four items each, two open-ended items, negatively
    worded items Q7/Q10/Q16/Q19/Q20, duplicate pairs (Q4,Q3) and (Q8,Q6)."""
    raw = resources.files("tutorkit.fixtures").joinpath("questionnaire.json").read_text("utf-8")
    return QuestionnaireSpec.from_dict(json.loads(raw))


@dataclass
class FlaggedPair:
    respondent: int
    item: str
    duplicate_of: str
    difference: int


@dataclass
class QuestionnaireResult:
    per_dimension_scores: dict[str, float]
    consistency_pass: bool
    flagged_pairs: list[FlaggedPair]
    open_responses: dict[str, list[str]] = field(default_factory=dict)
    respondents: int = 0


def reverse_code(value: int, negatively_worded: bool) -> int:
    """Map a negatively worded response so higher is better: v -> 6-v on
    the 1..5 scale; positively worded values pass through."""
    if not SCALE_MIN <= value <= SCALE_MAX:
        raise RangeError(f"response {value} outside scale {SCALE_MIN}..{SCALE_MAX}")
    if negatively_worded:
        return SCALE_MIN + SCALE_MAX - value
    return value


def rescale(mean_value: float) -> float:
    """5-point dimension mean onto the 10-point reporting scale (v -> 2v)."""
    return 2.0 * mean_value


def consistency_check(
    spec: QuestionnaireSpec,
    respondent_responses: Mapping[str, int],
    *,
    respondent: int = 0,
) -> tuple[bool, list[FlaggedPair]]:
    """Duplicate pairs are compared on raw (pre-reverse-coded) values;
    a pair differing by more than one point fails."""
    flagged: list[FlaggedPair] = []
    for item_id, original_id in spec.duplicate_pairs:
        if item_id not in respondent_responses or original_id not in respondent_responses:
            continue
        difference = abs(int(respondent_responses[item_id]) - int(respondent_responses[original_id]))
        if difference > CONSISTENCY_MAX_DIFFERENCE:
            flagged.append(
                FlaggedPair(
                    respondent=respondent,
                    item=item_id,
                    duplicate_of=original_id,
                    difference=difference,
                )
            )
    return not flagged, flagged


def score_dimensions(
    spec: QuestionnaireSpec,
    responses: Sequence[Mapping[str, Any]],
) -> QuestionnaireResult:
    """Score a cohort of complete responses.

    Per respondent: reverse-code, average the items of each dimension,
    rescale to 10 points; then average across respondents. Open-ended
    items are excluded from scoring and returned verbatim.
    """
    if not responses:
        raise MissingResponse([i.item_id for i in spec.scored_items])

    open_ids = {i.item_id for i in spec.open_items}
    per_respondent: list[dict[str, float]] = []
    flagged: list[FlaggedPair] = []
    open_responses: dict[str, list[str]] = {i.item_id: [] for i in spec.open_items}

    for idx, answers in enumerate(responses):
        missing = [i.item_id for i in spec.scored_items if i.item_id not in answers]
        if missing:
            raise MissingResponse(missing, respondent=idx)

        by_dimension: dict[str, list[int]] = {d: [] for d in SCORED_DIMENSIONS}
        for item in spec.scored_items:
            value = answers[item.item_id]
            if not isinstance(value, int) or isinstance(value, bool):
                raise RangeError(f"response to {item.item_id} must be an integer Likert value")
            by_dimension[item.dimension].append(reverse_code(value, item.negatively_worded))
        per_respondent.append(
            {
                dim: rescale(sum(values) / len(values))
                for dim, values in by_dimension.items()
                if values
            }
        )

        raw_scored = {k: v for k, v in answers.items() if k not in open_ids}
        _, pairs = consistency_check(spec, raw_scored, respondent=idx)
        flagged.extend(pairs)

        for item_id in open_ids:
            text = answers.get(item_id)
            if isinstance(text, str) and text.strip():
                open_responses[item_id].append(text)

    dimensions = per_respondent[0].keys()
    scores = {
        dim: sum(r[dim] for r in per_respondent) / len(per_respondent) for dim in dimensions
    }
    return QuestionnaireResult(
        per_dimension_scores=scores,
        consistency_pass=not flagged,
        flagged_pairs=flagged,
        open_responses=open_responses,
        respondents=len(responses),
    )

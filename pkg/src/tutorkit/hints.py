"""Hint generation with answer-leak filtering.

The provider reply is scanned (case-insensitive, whitespace-normalized)
for the reference answer, any correct option's text, and
answer-revealing key phrases such as "the answer is B". On a leak the
hint is regenerated once under a strengthened directive; if the reply
still leaks, the offending fragments are mechanically redacted. The
filter is substring/pattern based, not semantic — a paraphrase of the
answer can pass (documented limitation).
"""

from __future__ import annotations

import re
import time

from .models import HintResult, PromptBundle, Question, normalize_text
from .prompts import STRENGTHENED_DIRECTIVE, render_system, render_user
from .providers import CompletionProvider

WITHHELD_PLACEHOLDER = "[withheld]"

FALLBACK_HINT = (
    "Revisit the core concept this question tests and check each step of "
    "your reasoning against it."
)


def _needle_pattern(needle: str) -> re.Pattern[str]:
    """Case-insensitive, whitespace-flexible pattern for a text fragment."""
    tokens = [re.escape(tok) for tok in needle.split()]
    return re.compile(r"\s+".join(tokens), re.IGNORECASE)


def _key_reveal_patterns(key: str) -> list[re.Pattern[str]]:
    k = re.escape(key)
    return [
        re.compile(rf"\b(?:the\s+)?(?:correct\s+)?answer\s*(?:is|:)\s*[\"'(\[]?{k}\b", re.IGNORECASE),
        re.compile(rf"\b(?:option|choice)\s+[\"'(\[]?{k}[\"')\]]?\s+is\s+(?:the\s+)?correct\b", re.IGNORECASE),
        re.compile(rf"\b(?:select|choose|pick)\s+(?:option\s+|choice\s+)?[\"'(\[]?{k}[\"')\]]?\b", re.IGNORECASE),
    ]


def leak_patterns(question: Question) -> list[re.Pattern[str]]:
    patterns: list[re.Pattern[str]] = []
    if question.reference_answer.strip():
        patterns.append(_needle_pattern(normalize_text(question.reference_answer)))
    for text in question.correct_option_texts:
        if text.strip():
            patterns.append(_needle_pattern(normalize_text(text)))
    for key in question.answer_key:
        patterns.extend(_key_reveal_patterns(key))
    return patterns


def find_leaks(question: Question, text: str) -> list[str]:
    """Fragments of ``text`` that disclose answer content."""
    return [m.group(0) for p in leak_patterns(question) for m in p.finditer(text)]


def scrub_leaks(question: Question, text: str) -> str:
    """Mechanical last-resort redaction; guaranteed leak-free output."""
    for _ in range(3):
        for pattern in leak_patterns(question):
            text = pattern.sub(WITHHELD_PLACEHOLDER, text)
        if not find_leaks(question, text):
            return text
    return FALLBACK_HINT


def generate_hint(
    provider: CompletionProvider,
    bundle: PromptBundle,
    question: Question,
) -> HintResult:
    """Call the provider at the bundle's temperature and pass the reply
    through the leak filter. ProviderError propagates to the caller; no
    fabricated hint is ever substituted."""
    system = render_system(bundle)
    user = render_user(bundle)
    started = time.perf_counter()

    reply = provider.complete(system, user, temperature=bundle.temperature)
    leak_filtered = False
    if find_leaks(question, reply):
        leak_filtered = True
        reply = provider.complete(
            system + "\n" + STRENGTHENED_DIRECTIVE, user, temperature=bundle.temperature
        )
        if find_leaks(question, reply):
            reply = scrub_leaks(question, reply)

    return HintResult(
        hint_text=reply,
        specificity_level=bundle.specificity_level,
        leak_filtered=leak_filtered,
        provider=provider.name,
        latency_seconds=time.perf_counter() - started,
    )

"""Completion providers: a real chat-completion HTTP client and a
scriptable deterministic mock.

Both expose ``complete(system, user, temperature)``. The wire format for
the real client is a chat-completion request with exactly one system
message and one user message (see docs/api.md). The mock records every
call so tests can assert on outbound payloads, and the whole hint and
grading pipeline runs against it with zero network access.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import requests

from .errors import ProviderError

DEFAULT_TEMPERATURE = 0.2
DEFAULT_TIMEOUT_SECONDS = 30.0
DEFAULT_MAX_IN_FLIGHT = 4


class CompletionProvider(Protocol):
    name: str

    def complete(self, system: str, user: str, *, temperature: float) -> str: ...


class ChatCompletionClient:
    """OpenAI-style ``/chat/completions`` client.

    Outbound calls are bounded by an in-flight semaphore and a per-call
    timeout. Failures map to ProviderError kinds: ``timeout``, ``auth``,
    ``http``, ``network``, ``malformed``.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        *,
        timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
        session: requests.Session | None = None,
    ) -> None:
        self.name = f"chat:{model}"
        self._url = base_url.rstrip("/") + "/chat/completions"
        self._model = model
        self._api_key = api_key
        self._timeout = timeout_seconds
        self._semaphore = threading.Semaphore(max_in_flight)
        self._session = session or requests.Session()

    def complete(self, system: str, user: str, *, temperature: float) -> str:
        payload = {
            "model": self._model,
            "temperature": temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        with self._semaphore:
            try:
                response = self._session.post(
                    self._url, json=payload, headers=headers, timeout=self._timeout
                )
            except requests.Timeout as exc:
                raise ProviderError(f"provider timed out after {self._timeout}s", kind="timeout") from exc
            except requests.RequestException as exc:
                raise ProviderError(f"provider unreachable: {exc}", kind="network") from exc
        if response.status_code in (401, 403):
            raise ProviderError(f"provider rejected credentials ({response.status_code})", kind="auth")
        if response.status_code >= 400:
            raise ProviderError(
                f"provider HTTP {response.status_code}: {response.text[:200]}", kind="http"
            )
        try:
            data = response.json()
            content = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected provider reply shape: {exc}", kind="malformed") from exc
        if not isinstance(content, str):
            raise ProviderError("provider reply content is not text", kind="malformed")
        return content


@dataclass
class MockCall:
    system: str
    user: str
    temperature: float


class MockProvider:
    """Deterministic provider for tests and offline deployments.

    Replies come from, in order of precedence: the ``replies`` queue, the
    ``script`` callable, then a fixed template. Set ``fail_with`` to make
    the next calls raise. Every call is recorded in ``calls``.
    """

    name = "mock"

    def __init__(
        self,
        replies: Sequence[str] | None = None,
        *,
        script: Callable[[str, str], str] | None = None,
        default_reply: str = "Consider which concept the question is really probing, and re-read the stem.",
        latency_seconds: float = 0.0,
    ) -> None:
        self._replies = list(replies or [])
        self._script = script
        self._default = default_reply
        self._latency = latency_seconds
        self.calls: list[MockCall] = []
        self.fail_with: ProviderError | None = None

    def complete(self, system: str, user: str, *, temperature: float) -> str:
        self.calls.append(MockCall(system=system, user=user, temperature=temperature))
        if self.fail_with is not None:
            raise self.fail_with
        if self._latency:
            time.sleep(self._latency)
        if self._replies:
            return self._replies.pop(0)
        if self._script is not None:
            return self._script(system, user)
        return self._default

"""Service configuration, loadable from environment variables.

All knobs use the ``TUTORKIT_`` prefix; see README for the full list.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .providers import (
    DEFAULT_MAX_IN_FLIGHT,
    DEFAULT_TEMPERATURE,
    DEFAULT_TIMEOUT_SECONDS,
)

ENV_PREFIX = "TUTORKIT_"


@dataclass
class ProviderConfig:
    base_url: str = ""
    model: str = "gpt-4o"
    api_key: str | None = None
    temperature: float = DEFAULT_TEMPERATURE
    timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT
    use_mock: bool = False


@dataclass
class ServiceConfig:
    store_path: str = "tutorkit.db"
    bind_host: str = "127.0.0.1"
    bind_port: int = 8000
    cors_origins: list[str] = field(default_factory=list)
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    recurrence_threshold: int = 2
    specificity_cap: int = 3
    instructor_token: str | None = None


def _env(name: str, default: str = "") -> str:
    return os.getenv(ENV_PREFIX + name, default)


def load_config() -> ServiceConfig:
    temperature = float(_env("PROVIDER_TEMPERATURE", str(DEFAULT_TEMPERATURE)))
    if not 0.0 <= temperature <= 2.0:
        raise ValueError("TUTORKIT_PROVIDER_TEMPERATURE must be in [0, 2]")
    provider = ProviderConfig(
        base_url=_env("PROVIDER_BASE_URL"),
        model=_env("PROVIDER_MODEL", "gpt-4o"),
        api_key=_env("PROVIDER_API_KEY") or None,
        temperature=temperature,
        timeout_seconds=float(_env("PROVIDER_TIMEOUT_SECONDS", str(DEFAULT_TIMEOUT_SECONDS))),
        max_in_flight=int(_env("PROVIDER_MAX_IN_FLIGHT", str(DEFAULT_MAX_IN_FLIGHT))),
        use_mock=_env("PROVIDER_USE_MOCK", "").lower() in ("1", "true", "yes"),
    )
    origins = [o.strip() for o in _env("CORS_ORIGINS").split(",") if o.strip()]
    return ServiceConfig(
        store_path=_env("STORE_PATH", "tutorkit.db"),
        bind_host=_env("BIND_HOST", "127.0.0.1"),
        bind_port=int(_env("BIND_PORT", "8000")),
        cors_origins=origins,
        provider=provider,
        recurrence_threshold=int(_env("RECURRENCE_THRESHOLD", "2")),
        specificity_cap=int(_env("SPECIFICITY_CAP", "3")),
        instructor_token=_env("INSTRUCTOR_TOKEN") or None,
    )

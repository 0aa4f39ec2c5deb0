"""Completion backends: a deterministic scripted mock and a generic HTTP client.

Every backend answers a CompletionRequest with exactly `runs` completions,
each truncated at the stop token.  Remote providers are reached through one
configurable HTTP client (endpoint, auth header, field names, response
path), so new providers are config presets rather than code.
"""

from __future__ import annotations

import json
import os
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import requests

from .prompts import DEFAULT_STOP_TOKEN, interactive_tail

DEFAULT_TEMPERATURE = 0.2
DEFAULT_RUNS = 3
DEFAULT_MAX_TOKENS = 512


class BackendError(Exception):
    """Completion failed after any configured retries."""


class AuthError(BackendError):
    """Credentials are missing or rejected; retrying cannot help."""


class RateLimitError(BackendError):
    """Provider rate limit exhausted the retry budget."""

    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float = DEFAULT_TEMPERATURE
    stop_token: str = DEFAULT_STOP_TOKEN
    max_tokens: int = DEFAULT_MAX_TOKENS
    runs: int = DEFAULT_RUNS

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be nonempty")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if not self.stop_token:
            raise ValueError("stop token must be nonempty")


@dataclass(frozen=True)
class CompletionBatch:
    completions: tuple[str, ...]
    backend_id: str


@dataclass(frozen=True)
class BackendDescriptor:
    id: str
    name: str
    kind: str
    credential_env: str | None = None


def truncate_at_stop(text: str, stop_token: str) -> str:
    cut = text.find(stop_token)
    return text if cut < 0 else text[:cut]


class CompletionBackend(ABC):
    id: str
    name: str

    @abstractmethod
    def complete(self, request: CompletionRequest) -> CompletionBatch:
        """Produce exactly request.runs completions or raise BackendError."""

    @abstractmethod
    def descriptor(self) -> BackendDescriptor:
        """Identity and credential requirements for listings."""


@dataclass(frozen=True)
class MockRule:
    matcher: str
    completions: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.matcher:
            raise ValueError("mock rule matcher must be nonempty")
        if not self.completions:
            raise ValueError("mock rule must provide at least one completion")


class MockBackend(CompletionBackend):
    """Scripted completions matched against the prompt's live tail.

    The first rule whose matcher occurs in the tail (the final natural
    language line plus its given-translations line) wins; its completions
    are cycled to fill the requested number of runs.  Fully deterministic.
    """

    def __init__(self, rules, backend_id: str = "mock", name: str = "Scripted mock"):
        self.id = backend_id
        self.name = name
        self.rules = tuple(rules)

    def complete(self, request: CompletionRequest) -> CompletionBatch:
        target = interactive_tail(request.prompt)
        for rule in self.rules:
            if rule.matcher in target:
                texts = tuple(
                    truncate_at_stop(
                        rule.completions[i % len(rule.completions)], request.stop_token
                    )
                    for i in range(request.runs)
                )
                return CompletionBatch(completions=texts, backend_id=self.id)
        raise BackendError(
            f"no mock rule matches the prompt tail: {target[:200]!r}"
        )

    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(id=self.id, name=self.name, kind="mock")


def mock_rules_from_json(document: str) -> tuple[MockRule, ...]:
    """Load rules from a JSON array of {"match": ..., "completions": [...]}."""
    try:
        payload = json.loads(document)
    except json.JSONDecodeError as error:
        raise ValueError(f"mock rules document is not valid JSON: {error}") from error
    if not isinstance(payload, list):
        raise ValueError("mock rules document must be a JSON array")
    rules = []
    for index, entry in enumerate(payload):
        if not isinstance(entry, dict) or "match" not in entry or "completions" not in entry:
            raise ValueError(f"mock rule {index} must be an object with match and completions")
        rules.append(
            MockRule(
                matcher=str(entry["match"]),
                completions=tuple(str(text) for text in entry["completions"]),
            )
        )
    return tuple(rules)


@dataclass(frozen=True)
class HttpBackendConfig:
    id: str
    name: str
    endpoint: str
    auth_header: str = "Authorization"
    auth_scheme: str = "Bearer"
    credential_env: str = ""
    prompt_field: str = "prompt"
    temperature_field: str = "temperature"
    max_tokens_field: str = "max_tokens"
    stop_field: str = "stop"
    response_path: tuple = ("choices", 0, "text")
    extra_body: tuple[tuple[str, object], ...] = ()
    max_retries: int = 3
    backoff_seconds: float = 0.5
    timeout_seconds: float = 60.0

    def resolved_credential_env(self) -> str:
        if self.credential_env:
            return self.credential_env
        return self.id.upper().replace("-", "_") + "_API_KEY"


def _dig(payload, path):
    value = payload
    for key in path:
        try:
            value = value[key]
        except (KeyError, IndexError, TypeError) as error:
            raise BackendError(
                f"completion response lacks field path {list(path)!r}"
            ) from error
    if not isinstance(value, str):
        raise BackendError("completion response field is not text")
    return value


class HttpCompletionBackend(CompletionBackend):
    """Text completion over a JSON POST endpoint.

    Samples fan out concurrently; transient failures (connection errors,
    timeouts, 5xx, 429) are retried with exponential backoff, rate limits
    honoring a Retry-After header; 401/403 abort immediately.  Any failure
    surfaces as one batch-level error, never a partial batch.
    """

    def __init__(self, config: HttpBackendConfig, session: requests.Session | None = None):
        self.id = config.id
        self.name = config.name
        self.config = config
        self._session = session or requests.Session()

    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(
            id=self.id,
            name=self.name,
            kind="http",
            credential_env=self.config.resolved_credential_env(),
        )

    def _credential(self) -> str:
        env_name = self.config.resolved_credential_env()
        token = os.environ.get(env_name, "")
        if not token:
            raise AuthError(
                f"backend {self.id!r} needs the {env_name} environment variable"
            )
        return token

    def _one_completion(self, request: CompletionRequest, token: str) -> str:
        config = self.config
        body = dict(config.extra_body)
        body[config.prompt_field] = request.prompt
        body[config.temperature_field] = request.temperature
        body[config.max_tokens_field] = request.max_tokens
        body[config.stop_field] = request.stop_token
        header_value = (
            f"{config.auth_scheme} {token}" if config.auth_scheme else token
        )
        last_error: BackendError | None = None
        for attempt in range(config.max_retries + 1):
            if attempt:
                time.sleep(config.backoff_seconds * (2 ** (attempt - 1)))
            try:
                response = self._session.post(
                    config.endpoint,
                    json=body,
                    headers={config.auth_header: header_value},
                    timeout=config.timeout_seconds,
                )
            except requests.RequestException as error:
                last_error = BackendError(f"request to {config.endpoint} failed: {error}")
                continue
            if response.status_code in (401, 403):
                raise AuthError(
                    f"backend {self.id!r} rejected the credential "
                    f"(HTTP {response.status_code})"
                )
            if response.status_code == 429:
                retry_after = _parse_retry_after(response.headers.get("Retry-After"))
                last_error = RateLimitError(
                    f"backend {self.id!r} rate limited the request", retry_after
                )
                if retry_after is not None:
                    time.sleep(min(retry_after, config.backoff_seconds * 4))
                continue
            if response.status_code >= 500:
                last_error = BackendError(
                    f"backend {self.id!r} returned HTTP {response.status_code}"
                )
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"backend {self.id!r} returned HTTP {response.status_code}"
                )
            try:
                payload = response.json()
            except ValueError as error:
                raise BackendError("completion response is not JSON") from error
            return truncate_at_stop(_dig(payload, config.response_path), request.stop_token)
        assert last_error is not None
        raise last_error

    def complete(self, request: CompletionRequest) -> CompletionBatch:
        token = self._credential()
        with ThreadPoolExecutor(max_workers=min(request.runs, 8)) as pool:
            texts = list(
                pool.map(lambda _: self._one_completion(request, token), range(request.runs))
            )
        return CompletionBatch(completions=tuple(texts), backend_id=self.id)


def _parse_retry_after(raw: str | None) -> float | None:
    if raw is None:
        return None
    try:
        return max(float(raw), 0.0)
    except ValueError:
        return None

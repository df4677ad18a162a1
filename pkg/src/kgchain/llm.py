"""Uniform interface to chat-completion providers.

Three provider kinds share one ``complete()`` call:

* ``openai-compatible`` — HTTP POST to ``{base_url}/chat/completions``
  with bearer-token auth, retrying transport errors, timeouts, and
  HTTP 429/5xx with exponential backoff.  Every live call is logged to
  an append-only JSONL transcript (prompt/response hashes included)
  when a transcript path is configured.
* ``mock-script`` — ordered literal-substring matchers over the
  flattened request text; first hit wins, else the default reply.
* ``mock-oracle`` — an in-process responder callable, for fixtures that
  compute replies programmatically.

Mock providers are bit-deterministic and never touch the network; no
other module in this package performs network activity.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import requests

from .errors import (
    HttpStatusError,
    MissingContentError,
    ProviderError,
    RequestTimeoutError,
    TransportError,
)

CREDENTIAL_ENV_VAR = "KGCHAIN_API_KEY"

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if self.role in ("user", "assistant") and not self.content:
            raise ValueError(f"{self.role} message content must be non-empty")


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 1024
    model: str = "gpt-4"

    def __post_init__(self):
        if not any(m.role == "user" for m in self.messages):
            raise ValueError("request must contain at least one user message")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.max_tokens <= 0:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")

    def flattened(self) -> str:
        return "\n\n".join(m.content for m in self.messages)


@dataclass
class ProviderConfig:
    """Provider handle; shareable across threads.

    ``model``/``temperature``/``max_tokens`` are the request defaults the
    pipeline uses when building completion requests for this provider.
    """

    kind: str  # openai-compatible | mock-script | mock-oracle
    base_url: str = ""
    credential: str = ""
    timeout: float = 30.0
    max_retries: int = 2
    backoff_base: float = 0.5
    max_in_flight: int = 0  # 0 = unbounded
    transcript_path: str = ""
    model: str = "gpt-4"
    temperature: float = 0.0
    max_tokens: int = 1024
    script: tuple[tuple[str, str], ...] = ()
    default_reply: str = ""
    responder: Callable[[CompletionRequest], str] | None = None
    _gate: threading.Semaphore | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("openai-compatible", "mock-script", "mock-oracle"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == "openai-compatible" and not self.base_url:
            raise ValueError("live providers require a base URL")
        if self.max_retries < 0:
            raise ValueError("max retries must be >= 0")
        if self.max_in_flight > 0:
            self._gate = threading.Semaphore(self.max_in_flight)


def make_request(provider: ProviderConfig, messages: Sequence[ChatMessage]) -> CompletionRequest:
    """Build a request using the provider's configured defaults."""
    return CompletionRequest(
        messages=tuple(messages),
        temperature=provider.temperature,
        max_tokens=provider.max_tokens,
        model=provider.model,
    )


def make_scripted_provider(
    script: Sequence[tuple[str, str]], default_reply: str = "", **overrides
) -> ProviderConfig:
    """Deterministic mock: first (substring, reply) pair that matches wins."""
    return ProviderConfig(kind="mock-script", script=tuple(script), default_reply=default_reply, **overrides)


def make_oracle_provider(responder: Callable[[CompletionRequest], str], **overrides) -> ProviderConfig:
    return ProviderConfig(kind="mock-oracle", responder=responder, **overrides)


_transcript_lock = threading.Lock()


def _log_transcript(provider: ProviderConfig, request: CompletionRequest, response: str, attempts: int) -> None:
    if not provider.transcript_path:
        return
    prompt = request.flattened()
    entry = {
        "ts": time.time(),
        "model": request.model,
        "attempts": attempts,
        "prompt_sha256": hashlib.sha256(prompt.encode("utf-8")).hexdigest(),
        "response_sha256": hashlib.sha256(response.encode("utf-8")).hexdigest(),
        "request": [{"role": m.role, "content": m.content} for m in request.messages],
        "response": response,
    }
    line = json.dumps(entry, ensure_ascii=False)
    with _transcript_lock:
        with open(provider.transcript_path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")


def _complete_live(provider: ProviderConfig, request: CompletionRequest) -> str:
    url = provider.base_url.rstrip("/") + "/chat/completions"
    credential = os.environ.get(CREDENTIAL_ENV_VAR) or provider.credential
    headers = {"Content-Type": "application/json"}
    if credential:
        headers["Authorization"] = f"Bearer {credential}"
    body = {
        "model": request.model,
        "messages": [{"role": m.role, "content": m.content} for m in request.messages],
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
    }

    attempts = 0
    last_error: Exception | None = None
    last_status: int | None = None
    for attempt in range(provider.max_retries + 1):
        if attempt > 0:
            time.sleep(provider.backoff_base * (2 ** (attempt - 1)))
        attempts += 1
        try:
            resp = requests.post(url, json=body, headers=headers, timeout=provider.timeout)
        except requests.Timeout as exc:
            last_error = exc
            last_status = None
            continue
        except requests.RequestException as exc:
            last_error = exc
            last_status = None
            continue

        if resp.status_code == 429 or resp.status_code >= 500:
            last_error = None
            last_status = resp.status_code
            continue
        if not 200 <= resp.status_code < 300:
            raise HttpStatusError(f"provider returned HTTP {resp.status_code}", attempts, resp.status_code)

        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            content = None
        if not isinstance(content, str) or content == "":
            raise MissingContentError("response carried no assistant message content", attempts)
        _log_transcript(provider, request, content, attempts)
        return content

    if last_status is not None:
        raise HttpStatusError(f"provider kept returning HTTP {last_status}", attempts, last_status)
    if isinstance(last_error, requests.Timeout):
        raise RequestTimeoutError(f"provider timed out: {last_error}", attempts)
    raise TransportError(f"transport failure: {last_error}", attempts)


def complete(provider: ProviderConfig, request: CompletionRequest) -> str:
    """Return the assistant reply text for ``request``."""
    if provider.kind == "mock-script":
        flattened = request.flattened()
        for pattern, reply in provider.script:
            if pattern in flattened:
                return reply
        return provider.default_reply
    if provider.kind == "mock-oracle":
        if provider.responder is None:
            raise ProviderError("mock-oracle provider has no responder", attempts=1)
        return provider.responder(request)

    if provider._gate is not None:
        with provider._gate:
            return _complete_live(provider, request)
    return _complete_live(provider, request)

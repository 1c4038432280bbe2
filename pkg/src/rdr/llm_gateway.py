"""Single choke-point for text-model calls.

Shapes requests, retries transient provider failures with exponential
backoff, caps concurrent in-flight requests, parses structured output, and
logs every request/response pair to a replayable transcript. The replay
provider turns any recorded transcript back into a deterministic backend,
which is how every LLM-dependent stage stays testable offline.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

from .errors import ConfigurationError, ContractError, FormatError, UpstreamError

MODEL_TAGS = ("filter_model", "reasoning_model")


@dataclass(frozen=True)
class PromptRequest:
    system_text: str
    user_text: str
    temperature: float = 0.0
    max_output_tokens: int = 2048
    model_tag: str = "reasoning_model"

    def __post_init__(self):
        if not self.user_text:
            raise ContractError("user_text must be nonempty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ContractError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_output_tokens <= 0:
            raise ContractError("max_output_tokens must be positive")
        if self.model_tag not in MODEL_TAGS:
            raise ContractError(f"unknown model_tag {self.model_tag!r}")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    input_tokens: int
    output_tokens: int
    provider_id: str


def request_hash(req: PromptRequest) -> str:
    """Stable key for transcripts and replay: model tag + both prompt texts."""
    payload = "\x1f".join((req.model_tag, req.system_text, req.user_text))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class Provider(Protocol):
    provider_id: str

    def complete(self, req: PromptRequest) -> CompletionResult: ...


class TransientProviderError(Exception):
    """Retryable provider failure (rate limit, 5xx, connection drop)."""

    def __init__(self, message: str, status: int | str | None = None):
        self.status = status
        super().__init__(message)


class ReplayProvider:
    """Deterministic provider backed by a request-hash -> response map."""

    provider_id = "replay"

    def __init__(self, responses: dict[str, str] | None = None):
        self.responses = dict(responses or {})

    @classmethod
    def from_transcript(cls, path: str | Path) -> "ReplayProvider":
        responses = {}
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            entry = json.loads(line)
            responses[entry["request_hash"]] = entry["response_text"]
        return cls(responses)

    def complete(self, req: PromptRequest) -> CompletionResult:
        key = request_hash(req)
        if key not in self.responses:
            raise UpstreamError(
                f"replay transcript has no entry for request {key[:12]}... "
                f"(model_tag={req.model_tag})",
                status="replay-miss",
            )
        text = self.responses[key]
        return CompletionResult(
            text=text,
            input_tokens=len(req.user_text.split()),
            output_tokens=len(text.split()),
            provider_id=self.provider_id,
        )


class ScriptedProvider:
    """Pops scripted outcomes in order; an Exception instance means 'raise it'."""

    provider_id = "scripted"

    def __init__(self, script: list[str | Exception]):
        self.script = list(script)
        self.calls = 0

    def complete(self, req: PromptRequest) -> CompletionResult:
        self.calls += 1
        if not self.script:
            raise UpstreamError("scripted provider exhausted", status="exhausted")
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return CompletionResult(
            text=item,
            input_tokens=len(req.user_text.split()),
            output_tokens=len(item.split()),
            provider_id=self.provider_id,
        )


class HttpChatProvider:
    """Chat-completions HTTP backend (RDR_LLM_API_KEY / RDR_LLM_BASE_URL)."""

    def __init__(self, base_url: str, api_key: str, model_name: str, timeout: float = 120.0):
        if not api_key:
            raise ConfigurationError("missing API key", key="RDR_LLM_API_KEY")
        if not base_url:
            raise ConfigurationError("missing base URL", key="RDR_LLM_BASE_URL")
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.model_name = model_name
        self.timeout = timeout
        self.provider_id = f"http:{model_name}"

    def complete(self, req: PromptRequest) -> CompletionResult:
        import requests

        payload = {
            "model": self.model_name,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
        }
        try:
            resp = requests.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransientProviderError(str(exc), status="connection") from exc
        if resp.status_code in (429,) or resp.status_code >= 500:
            raise TransientProviderError(
                f"provider returned {resp.status_code}", status=resp.status_code
            )
        if resp.status_code != 200:
            raise UpstreamError(
                f"provider rejected request: {resp.text[:500]}", status=resp.status_code
            )
        data = resp.json()
        usage = data.get("usage", {})
        return CompletionResult(
            text=data["choices"][0]["message"]["content"],
            input_tokens=int(usage.get("prompt_tokens", 0)),
            output_tokens=int(usage.get("completion_tokens", 0)),
            provider_id=self.provider_id,
        )


class LlmGateway:
    """Routes requests by model tag through retry, limiter, and transcript."""

    def __init__(
        self,
        providers: dict[str, Provider],
        max_retries: int = 3,
        backoff_base: float = 0.5,
        max_concurrency: int = 4,
        transcript_path: str | Path | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        unknown = set(providers) - set(MODEL_TAGS)
        if unknown:
            raise ConfigurationError(f"unknown model tags {sorted(unknown)}")
        if max_concurrency < 1:
            raise ConfigurationError("max_concurrency must be >= 1")
        self.providers = dict(providers)
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._limiter = threading.Semaphore(max_concurrency)
        self._transcript_lock = threading.Lock()
        self.transcript_path = Path(transcript_path) if transcript_path else None
        self._sleep = sleep
        self.stats = {"requests": 0, "retries": 0}

    def complete(self, req: PromptRequest) -> CompletionResult:
        provider = self.providers.get(req.model_tag)
        if provider is None:
            raise ConfigurationError(
                f"no provider configured for model tag {req.model_tag!r}"
            )
        self.stats["requests"] += 1
        last: TransientProviderError | None = None
        for attempt in range(self.max_retries + 1):
            if attempt > 0:
                self.stats["retries"] += 1
                self._sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                with self._limiter:
                    result = provider.complete(req)
            except TransientProviderError as exc:
                last = exc
                continue
            self._log(req, result)
            return result
        raise UpstreamError(
            f"provider failed after {self.max_retries} retries: {last}",
            status=last.status if last else None,
        )

    def _log(self, req: PromptRequest, result: CompletionResult) -> None:
        if self.transcript_path is None:
            return
        entry = {
            "request_hash": request_hash(req),
            "model_tag": req.model_tag,
            "response_text": result.text,
            "tokens": {"input": result.input_tokens, "output": result.output_tokens},
        }
        line = json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n"
        with self._transcript_lock:
            with open(self.transcript_path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()


def gateway_from_env(
    transcript_path: str | Path | None = None,
    replay_transcript: str | Path | None = None,
    filter_model_name: str = "filter-model",
    reasoning_model_name: str = "reasoning-model",
    max_retries: int = 3,
    max_concurrency: int = 4,
) -> LlmGateway:
    """Build a gateway from the environment, or a replay one from a transcript."""
    import os

    if replay_transcript is not None:
        provider = ReplayProvider.from_transcript(replay_transcript)
        providers: dict[str, Provider] = {tag: provider for tag in MODEL_TAGS}
        return LlmGateway(
            providers,
            max_retries=max_retries,
            max_concurrency=max_concurrency,
            transcript_path=transcript_path,
        )
    api_key = os.environ.get("RDR_LLM_API_KEY", "")
    base_url = os.environ.get("RDR_LLM_BASE_URL", "")
    providers = {
        "filter_model": HttpChatProvider(base_url, api_key, filter_model_name),
        "reasoning_model": HttpChatProvider(base_url, api_key, reasoning_model_name),
    }
    return LlmGateway(
        providers,
        max_retries=max_retries,
        max_concurrency=max_concurrency,
        transcript_path=transcript_path,
    )


# --- structured-output parsing ------------------------------------------------

_TRAILING_COMMA = re.compile(r",(\s*[}\]])")
_QUOTE_MAP = {
    "“": '"', "”": '"', "„": '"', "″": '"',
    "‘": "'", "’": "'", "‚": "'", "′": "'",
}


def _balanced_spans(text: str):
    """Yield (start, end) spans of brace-balanced candidates, outermost first."""
    depth = 0
    start = -1
    in_string = False
    escape = False
    for i, ch in enumerate(text):
        if in_string:
            if escape:
                escape = False
            elif ch == "\\":
                escape = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    yield start, i + 1
    # unterminated string or unbalanced braces: nothing more to yield


def _repair(candidate: str) -> str:
    for bad, good in _QUOTE_MAP.items():
        candidate = candidate.replace(bad, good)
    return _TRAILING_COMMA.sub(r"\1", candidate)


def extract_structured(text: str) -> dict:
    """Parse the first well-formed brace-delimited object found in text.

    Fenced code blocks need no special casing: the scanner keys on braces.
    A failing candidate gets one repair pass (trailing commas stripped,
    curly quotes straightened) before the next candidate is tried.
    """
    for start, end in _balanced_spans(text):
        candidate = text[start:end]
        for variant in (candidate, _repair(candidate)):
            try:
                doc = json.loads(variant)
            except json.JSONDecodeError:
                continue
            if isinstance(doc, dict):
                return doc
    raise FormatError("no parseable brace-delimited object found", raw_text=text)


def serialize_structured(doc: dict) -> str:
    """Canonical inverse of extract_structured for flat documents."""
    return json.dumps(doc, sort_keys=True, ensure_ascii=False)

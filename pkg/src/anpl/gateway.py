"""Chat-completion gateways: a real HTTP client, deterministic mocks for
tests, and record/replay wrappers.

Every gateway exposes ``complete(request) -> ChatResponse``. Requests are
identified by a fingerprint over the canonicalized prompt, temperature,
and completion count, so replay distinguishes retries at different
temperatures.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .errors import ProviderError, RateLimited, ScriptMiss, Timeout

DEFAULT_MAX_TOKENS = 1024
DEFAULT_TIMEOUT_S = 120.0


@dataclass(frozen=True)
class ChatRequest:
    system_text: str
    user_text: str
    temperature: float = 0.0
    max_tokens: int = DEFAULT_MAX_TOKENS
    n_completions: int = 1

    def fingerprint(self) -> str:
        return fingerprint(self)


@dataclass(frozen=True)
class ChatResponse:
    completions: tuple[str, ...]
    request_fingerprint: str


def _canonical_text(text: str) -> str:
    normalized = text.replace("\r\n", "\n").replace("\r", "\n")
    return "\n".join(line.rstrip() for line in normalized.split("\n"))


def fingerprint(req: ChatRequest) -> str:
    payload = json.dumps(
        [_canonical_text(req.system_text), _canonical_text(req.user_text),
         round(req.temperature, 6), req.n_completions],
        ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class LlmGateway(Protocol):
    def complete(self, req: ChatRequest) -> ChatResponse: ...


# ---------------------------------------------------------------------------
# real backend

@dataclass
class GatewayConfig:
    endpoint: str
    model: str
    api_key: str = ""
    timeout_s: float = DEFAULT_TIMEOUT_S

    @classmethod
    def from_env(cls, env=os.environ) -> "GatewayConfig":
        return cls(endpoint=env.get("ANPL_LLM_ENDPOINT", ""),
                   model=env.get("ANPL_LLM_MODEL", ""),
                   api_key=env.get("ANPL_LLM_API_KEY", ""),
                   timeout_s=float(env.get("ANPL_LLM_TIMEOUT", DEFAULT_TIMEOUT_S)))


class HttpGateway:
    """OpenAI-style chat-completions client.

    Transport errors are retried here (they never consume compiler
    attempts); only a delivered completion reaches the compiler.
    """

    MAX_TRANSPORT_RETRIES = 2

    def __init__(self, config: GatewayConfig, session=None):
        if not config.endpoint or not config.model:
            raise ValueError("gateway endpoint and model must be configured")
        import requests
        self._config = config
        self._session = session or requests.Session()

    def complete(self, req: ChatRequest) -> ChatResponse:
        import requests
        url = self._config.endpoint.rstrip("/") + "/chat/completions"
        body = {
            "model": self._config.model,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
            "n": req.n_completions,
        }
        headers = {}
        if self._config.api_key:
            headers["Authorization"] = f"Bearer {self._config.api_key}"
        last_exc: Exception | None = None
        for _ in range(self.MAX_TRANSPORT_RETRIES + 1):
            try:
                resp = self._session.post(url, json=body, headers=headers,
                                          timeout=self._config.timeout_s)
            except requests.Timeout as exc:
                raise Timeout(f"no response within {self._config.timeout_s}s") from exc
            except requests.RequestException as exc:
                last_exc = exc
                time.sleep(0.2)
                continue
            if resp.status_code == 429:
                retry_after = resp.headers.get("Retry-After")
                raise RateLimited(float(retry_after) if retry_after else None)
            if resp.status_code >= 400:
                raise ProviderError(resp.status_code, resp.text)
            data = resp.json()
            completions = tuple(c["message"]["content"] for c in data["choices"])
            return ChatResponse(completions=completions,
                                request_fingerprint=fingerprint(req))
        raise ProviderError(0, f"transport failure: {last_exc}")


# ---------------------------------------------------------------------------
# deterministic mocks

class ScriptedGateway:
    """Answers from a fingerprint-keyed script; unknown requests miss."""

    def __init__(self, script: dict[str, list[str]]):
        self._script = dict(script)
        self.calls: list[ChatRequest] = []

    def complete(self, req: ChatRequest) -> ChatResponse:
        self.calls.append(req)
        fp = fingerprint(req)
        if fp not in self._script:
            raise ScriptMiss(fp)
        completions = tuple(self._script[fp])
        if len(completions) != req.n_completions:
            raise ValueError(f"script provides {len(completions)} completions, "
                             f"request wants {req.n_completions}")
        return ChatResponse(completions=completions, request_fingerprint=fp)


@dataclass(frozen=True)
class Rule:
    """Match a request by substring of the user prompt, and optionally by
    exact temperature (to script per-attempt retries statelessly)."""

    needle: str
    completions: tuple[str, ...]
    temperature: float | None = None

    def matches(self, req: ChatRequest) -> bool:
        if self.needle not in req.user_text:
            return False
        return self.temperature is None or abs(self.temperature - req.temperature) < 1e-9


class RuleGateway:
    """Stateless mock: the first matching rule answers. Being stateless,
    identical request sequences always see identical responses."""

    def __init__(self, rules: list[Rule]):
        self._rules = list(rules)
        self.calls: list[ChatRequest] = []

    def complete(self, req: ChatRequest) -> ChatResponse:
        self.calls.append(req)
        for rule in self._rules:
            if rule.matches(req):
                if len(rule.completions) != req.n_completions:
                    raise ValueError(
                        f"rule {rule.needle!r} provides "
                        f"{len(rule.completions)} completions, request "
                        f"wants {req.n_completions}")
                return ChatResponse(completions=rule.completions,
                                    request_fingerprint=fingerprint(req))
        raise ScriptMiss(fingerprint(req))


def rule(needle: str, *completions: str, temperature: float | None = None) -> Rule:
    return Rule(needle=needle, completions=tuple(completions), temperature=temperature)


# ---------------------------------------------------------------------------
# record / replay

@dataclass(frozen=True)
class ExchangeRecord:
    fingerprint: str
    request: ChatRequest
    completions: tuple[str, ...]
    wall_time: float

    def to_json(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "request": {
                "system_text": self.request.system_text,
                "user_text": self.request.user_text,
                "temperature": self.request.temperature,
                "max_tokens": self.request.max_tokens,
                "n_completions": self.request.n_completions,
            },
            "completions": list(self.completions),
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ExchangeRecord":
        req = ChatRequest(**data["request"])
        return cls(fingerprint=data["fingerprint"], request=req,
                   completions=tuple(data["completions"]),
                   wall_time=data.get("wall_time", 0.0))


class RecordingGateway:
    """Wraps a gateway and appends every exchange to an in-memory list and
    (optionally) a JSON-lines file. Appends are serialized."""

    def __init__(self, inner: LlmGateway, path: str | Path | None = None):
        self._inner = inner
        self._path = Path(path) if path else None
        self._lock = threading.Lock()
        self.records: list[ExchangeRecord] = []

    def complete(self, req: ChatRequest) -> ChatResponse:
        start = time.monotonic()
        resp = self._inner.complete(req)
        record = ExchangeRecord(fingerprint=resp.request_fingerprint,
                                request=req, completions=resp.completions,
                                wall_time=time.monotonic() - start)
        with self._lock:
            self.records.append(record)
            if self._path is not None:
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
        return resp


class ReplayGateway:
    """Answers recorded responses by fingerprint; novel requests miss.

    Multiple recordings of one fingerprint are served in order, then the
    last one repeats (a deterministic compile asks identical questions).
    """

    def __init__(self, records: list[ExchangeRecord]):
        self._by_fp: dict[str, list[tuple[str, ...]]] = {}
        for rec in records:
            self._by_fp.setdefault(rec.fingerprint, []).append(rec.completions)
        self._served: dict[str, int] = {}
        self.calls: list[ChatRequest] = []

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ReplayGateway":
        records = [ExchangeRecord.from_json(json.loads(line))
                   for line in Path(path).read_text(encoding="utf-8").splitlines()
                   if line.strip()]
        return cls(records)

    def complete(self, req: ChatRequest) -> ChatResponse:
        self.calls.append(req)
        fp = fingerprint(req)
        queue = self._by_fp.get(fp)
        if not queue:
            raise ScriptMiss(fp)
        index = min(self._served.get(fp, 0), len(queue) - 1)
        self._served[fp] = index + 1
        return ChatResponse(completions=queue[index], request_fingerprint=fp)

"""Chat-completion gateway: bounded concurrency, key rotation, response cache.

Every model call in the pipeline goes through Gateway.complete / complete_many.
Responses are cached in an append-only JSONL file keyed by a content hash of
the request, so a recorded run can be replayed byte-identically with the
network disabled (backend=None). A deterministic ScriptedBackend stands in for
the real endpoint in tests and fixture runs.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import requests

ROLES = ("system", "user", "assistant")


class GatewayError(Exception):
    pass


class TransportError(GatewayError):
    """Network failure that survived all retries."""


class AuthError(GatewayError):
    """Every configured API key was rejected."""


class BackendRefused(GatewayError):
    """Non-retryable HTTP 4xx from the endpoint."""


class RateLimited(GatewayError):
    """HTTP 429; the key that hit it goes into cooldown."""


class AllKeysCoolingDown(GatewayError):
    pass


class CacheMiss(GatewayError):
    """Replay mode was asked for a request that was never recorded."""


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"bad role {self.role!r}")
        if not self.content:
            raise ValueError("empty message content")


@dataclass(frozen=True)
class ChatRequest:
    """One chat completion call; sample_index distinguishes independent samples
    drawn at identical parameters (it is part of the cache key only, never sent
    on the wire)."""

    model: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_tokens: int = 256
    sample_index: int = 0

    def __post_init__(self) -> None:
        if not self.messages or self.messages[0].role != "system":
            raise ValueError("messages must start with a system message")
        if sum(1 for m in self.messages if m.role == "system") != 1:
            raise ValueError("exactly one system message required")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature out of range")
        if self.max_tokens <= 0 or self.sample_index < 0:
            raise ValueError("bad max_tokens / sample_index")

    def payload(self) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True)
class ChatResponse:
    content: str
    finish_reason: str = "stop"
    usage: tuple[tuple[str, int], ...] = ()

    def to_json(self) -> dict:
        return {"content": self.content, "finish_reason": self.finish_reason, "usage": dict(self.usage)}

    @classmethod
    def from_json(cls, obj: dict) -> "ChatResponse":
        return cls(
            content=obj["content"],
            finish_reason=obj.get("finish_reason", "stop"),
            usage=tuple(sorted(obj.get("usage", {}).items())),
        )


def request_key(endpoint_id: str, request: ChatRequest) -> str:
    digest_input = {
        "endpoint": endpoint_id,
        "model": request.model,
        "messages": [{"role": m.role, "content": m.content} for m in request.messages],
        "temperature": request.temperature,
        "max_tokens": request.max_tokens,
        "sample_index": request.sample_index,
    }
    blob = json.dumps(digest_input, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def describe_request(request: ChatRequest) -> str:
    last_user = next((m.content for m in reversed(request.messages) if m.role == "user"), "")
    preview = last_user[:100].replace("\n", " ")
    return f"model={request.model} sample_index={request.sample_index} user={preview!r}"


class ResponseCache:
    """Append-only JSONL cache with an in-memory index.

    Concurrent lookups/inserts are lock-protected; identical keys always carry
    identical values (the key hashes everything that determines the response
    for a deterministic backend), so last-write-wins is harmless.
    """

    def __init__(self, path: str | Path | None):
        self.path = Path(path) if path else None
        self._index: dict[str, ChatResponse] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        self._index[rec["key"]] = ChatResponse.from_json(rec["response"])

    def __len__(self) -> int:
        return len(self._index)

    def get(self, key: str) -> ChatResponse | None:
        with self._lock:
            return self._index.get(key)

    def put_many(self, records: list[tuple[str, ChatRequest, ChatResponse]]) -> None:
        with self._lock:
            lines = []
            for key, request, response in records:
                if key in self._index:
                    continue
                self._index[key] = response
                lines.append(
                    json.dumps(
                        {
                            "key": key,
                            "request": {
                                "model": request.model,
                                "messages": [
                                    {"role": m.role, "content": m.content} for m in request.messages
                                ],
                                "temperature": request.temperature,
                                "max_tokens": request.max_tokens,
                                "sample_index": request.sample_index,
                            },
                            "response": response.to_json(),
                            "created_at": datetime.now(timezone.utc).isoformat(),
                        },
                        ensure_ascii=False,
                        sort_keys=True,
                    )
                )
            if lines and self.path:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write("\n".join(lines) + "\n")


class KeyPool:
    """Round-robin API keys; a rate-limited key sits out for cooldown_s."""

    def __init__(self, keys: list[str], cooldown_s: float = 30.0, clock=time.monotonic):
        if not keys:
            raise ValueError("empty key pool")
        self._keys = list(keys)
        self._cooldown_until = {k: 0.0 for k in keys}
        self._rejected: set[str] = set()
        self._next = 0
        self._cooldown_s = cooldown_s
        self._clock = clock
        self._lock = threading.Lock()

    def next_key(self) -> str:
        with self._lock:
            now = self._clock()
            live = [k for k in self._keys if k not in self._rejected]
            if not live:
                raise AuthError("all API keys rejected")
            for _ in range(len(self._keys)):
                key = self._keys[self._next % len(self._keys)]
                self._next += 1
                if key in self._rejected:
                    continue
                if self._cooldown_until[key] <= now:
                    return key
            raise AllKeysCoolingDown(f"{len(live)} key(s), all cooling down")

    def report_rate_limited(self, key: str) -> None:
        with self._lock:
            self._cooldown_until[key] = self._clock() + self._cooldown_s

    def report_rejected(self, key: str) -> None:
        with self._lock:
            self._rejected.add(key)


class HttpBackend:
    """OpenAI-compatible chat-completions endpoint over HTTP+JSON."""

    def __init__(
        self,
        base_url: str,
        key_pool: KeyPool,
        timeout_s: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.key_pool = key_pool
        self.timeout_s = timeout_s
        self.session = session or requests.Session()

    @property
    def endpoint_id(self) -> str:
        return self.base_url

    def send(self, request: ChatRequest) -> ChatResponse:
        key = self.key_pool.next_key()
        try:
            resp = self.session.post(
                f"{self.base_url}/chat/completions",
                json=request.payload(),
                headers={"Authorization": f"Bearer {key}"},
                timeout=self.timeout_s,
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code == 429:
            self.key_pool.report_rate_limited(key)
            raise RateLimited(f"429 from {self.base_url}")
        if resp.status_code in (401, 403):
            self.key_pool.report_rejected(key)
            raise RateLimited(f"{resp.status_code}: key rejected, rotating")
        if 400 <= resp.status_code < 500:
            raise BackendRefused(f"{resp.status_code}: {resp.text[:300]}")
        if resp.status_code >= 500:
            raise TransportError(f"{resp.status_code} from {self.base_url}")
        body = resp.json()
        choice = body["choices"][0]
        return ChatResponse(
            content=choice["message"]["content"] or "",
            finish_reason=choice.get("finish_reason", "stop"),
            usage=tuple(sorted((body.get("usage") or {}).items())),
        )


@dataclass
class ScriptRule:
    """Matcher plus canned replies; the reply is picked by sample_index, so a
    scripted 'malformed first, then valid' resample sequence is just a
    two-element replies list."""

    replies: list[str]
    system_contains: str | None = None
    user_contains: str | None = None
    user_not_contains: str | None = None
    name: str = ""

    def matches(self, request: ChatRequest) -> bool:
        system = request.messages[0].content
        last_user = next((m.content for m in reversed(request.messages) if m.role == "user"), "")
        if self.system_contains is not None and self.system_contains not in system:
            return False
        if self.user_contains is not None and self.user_contains not in last_user:
            return False
        if self.user_not_contains is not None and self.user_not_contains in last_user:
            return False
        return True

    def reply_for(self, request: ChatRequest) -> str:
        return self.replies[request.sample_index % len(self.replies)]

    @classmethod
    def from_json(cls, obj: dict) -> "ScriptRule":
        replies = obj["replies"] if "replies" in obj else [obj["reply"]]
        return cls(
            replies=list(replies),
            system_contains=obj.get("system_contains"),
            user_contains=obj.get("user_contains"),
            user_not_contains=obj.get("user_not_contains"),
            name=obj.get("name", ""),
        )


class UnscriptedRequest(GatewayError):
    pass


class ScriptedBackend:
    """Deterministic test double: first matching rule wins, reply chosen by
    sample_index. Tracks served requests and peak concurrency so tests can
    assert call counts and the in-flight bound."""

    def __init__(self, rules: list[ScriptRule], delay_s: float = 0.0):
        self.rules = rules
        self.delay_s = delay_s
        self.served: list[ChatRequest] = []
        self.peak_concurrency = 0
        self._active = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        rules = [ScriptRule.from_json(obj) for obj in json.loads(Path(path).read_text("utf-8"))]
        return cls(rules)

    @property
    def endpoint_id(self) -> str:
        return "scripted"

    @property
    def calls(self) -> int:
        return len(self.served)

    def send(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            self._active += 1
            self.peak_concurrency = max(self.peak_concurrency, self._active)
            self.served.append(request)
        try:
            if self.delay_s:
                time.sleep(self.delay_s)
            for rule in self.rules:
                if rule.matches(request):
                    return ChatResponse(content=rule.reply_for(request))
            raise UnscriptedRequest(describe_request(request))
        finally:
            with self._lock:
                self._active -= 1


class ReplayBackend:
    """Network-disabled stand-in: replays must be fully answered by the cache.

    Keys are computed against the endpoint id of the backend that recorded the
    cache, so a replay resolves exactly the requests the recorded run made.
    """

    def __init__(self, endpoint_id: str = "scripted"):
        self.endpoint_id = endpoint_id

    def send(self, request: ChatRequest) -> ChatResponse:
        raise CacheMiss(f"uncached request in replay mode: {describe_request(request)}")


class Gateway:
    """Cache-through completion calls with bounded concurrency and retries."""

    def __init__(
        self,
        backend: HttpBackend | ScriptedBackend | ReplayBackend,
        cache: ResponseCache | None = None,
        max_in_flight: int = 4,
        retries: int = 3,
        backoff_s: float = 0.5,
        sleep=time.sleep,
    ):
        self.backend = backend
        self.cache = cache if cache is not None else ResponseCache(None)
        self.max_in_flight = max_in_flight
        self.retries = retries
        self.backoff_s = backoff_s
        self._sleep = sleep

    def key_for(self, request: ChatRequest) -> str:
        return request_key(self.backend.endpoint_id, request)

    def complete(self, request: ChatRequest) -> ChatResponse:
        return self.complete_many([request])[0]

    def complete_many(
        self, requests_: list[ChatRequest], return_errors: bool = False
    ) -> list[ChatResponse | GatewayError]:
        if not requests_:
            return []

        keys = [self.key_for(r) for r in requests_]
        to_fetch: dict[str, ChatRequest] = {}
        for key, request in zip(keys, requests_):
            if self.cache.get(key) is None and key not in to_fetch:
                to_fetch[key] = request

        fetched: dict[str, ChatResponse | GatewayError] = {}
        if to_fetch:
            with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
                futures = {key: pool.submit(self._fetch, request) for key, request in to_fetch.items()}
            for key, fut in futures.items():
                fetched[key] = fut.result()
            self.cache.put_many(
                [
                    (key, to_fetch[key], fetched[key])
                    for key in to_fetch
                    if isinstance(fetched[key], ChatResponse)
                ]
            )

        results: list[ChatResponse | GatewayError | None] = [None] * len(requests_)
        for i, key in enumerate(keys):
            response = self.cache.get(key)
            if response is None:
                response = fetched[key]
            if isinstance(response, GatewayError) and not return_errors:
                raise response
            results[i] = response
        return results  # type: ignore[return-value]

    def _fetch(self, request: ChatRequest) -> ChatResponse | GatewayError:
        last: GatewayError | None = None
        for attempt in range(self.retries + 1):
            try:
                return self.backend.send(request)
            except RateLimited as exc:
                last = exc
            except TransportError as exc:
                last = exc
            except AllKeysCoolingDown as exc:
                return exc
            except GatewayError as exc:
                return exc
            if attempt < self.retries:
                self._sleep(self.backoff_s * (2**attempt))
        if isinstance(last, RateLimited):
            return TransportError(f"rate limited after {self.retries} retries: {last}")
        return last if last is not None else TransportError("unreachable")

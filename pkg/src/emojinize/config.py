"""Pipeline configuration: one JSON file plus environment overrides.

Secrets never live in the config file: EMOJINIZE_API_KEY appends a key and
EMOJINIZE_BASE_URL overrides the endpoint. Every stage output records the
digest of the config that produced it.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .gateway import Gateway, HttpBackend, KeyPool, ReplayBackend, ResponseCache, ScriptedBackend


class ConfigInvalid(ValueError):
    pass


@dataclass
class GatewayConfig:
    backend: str = "scripted"  # scripted | http
    base_url: str = "https://api.openai.com/v1"
    api_keys: list[str] = field(default_factory=list)
    script: str | None = None
    models: dict[str, str] = field(
        default_factory=lambda: {
            "translator": "gpt-4",
            "participant": "gpt-4",
            "scorer": "gpt-4",
            "filter": "gpt-4",
        }
    )
    max_in_flight: int = 4
    retries: int = 3
    cooldown_s: float = 30.0
    cache: str = "work/cache.jsonl"


@dataclass
class TranslatorSettings:
    language: str = "English"
    temperature: float = 0.0
    max_resamples: int = 5
    candidate_temperature: float = 1.0
    candidates: int = 5
    guesses_per_candidate: int = 10
    batch_spans: int = 3
    demonstrations: str | None = None  # path; bundled set when null


@dataclass
class CorpusSettings:
    news_dir: str | None = None
    ebook_dir: str | None = None
    count_news: int = 500
    count_ebook: int = 500
    seed: int = 0
    min_tokens: int = 8
    max_tokens: int = 60
    profanity_path: str | None = None
    stopwords_path: str | None = None
    tagger: str = "llm"  # llm | lexicon; llm applies only when a gateway backend is configured
    skip_quality_filter: bool = False


@dataclass
class EvaluationSettings:
    guess_temperature: float = 0.0
    max_resamples: int = 5
    bootstrap_resamples: int = 10_000
    seed: int = 0


@dataclass
class PipelineConfig:
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    translator: TranslatorSettings = field(default_factory=TranslatorSettings)
    corpus: CorpusSettings = field(default_factory=CorpusSettings)
    evaluation: EvaluationSettings = field(default_factory=EvaluationSettings)
    workdir: str = "work"

    @classmethod
    def load(cls, path: str | Path | None) -> "PipelineConfig":
        raw: dict = {}
        if path is not None:
            try:
                raw = json.loads(Path(path).read_text("utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(raw)

    @classmethod
    def from_json(cls, raw: dict) -> "PipelineConfig":
        def build(dc, key):
            section = raw.get(key, {})
            if not isinstance(section, dict):
                raise ConfigInvalid(f"section {key!r} must be an object")
            known = {f for f in dc.__dataclass_fields__}
            unknown = set(section) - known
            if unknown:
                raise ConfigInvalid(f"unknown keys in {key!r}: {sorted(unknown)}")
            return dc(**section)

        config = cls(
            gateway=build(GatewayConfig, "gateway"),
            translator=build(TranslatorSettings, "translator"),
            corpus=build(CorpusSettings, "corpus"),
            evaluation=build(EvaluationSettings, "evaluation"),
            workdir=raw.get("workdir", "work"),
        )
        if key := os.environ.get("EMOJINIZE_API_KEY"):
            config.gateway.api_keys = [*config.gateway.api_keys, key]
        if url := os.environ.get("EMOJINIZE_BASE_URL"):
            config.gateway.base_url = url
        if model := os.environ.get("EMOJINIZE_MODEL"):
            config.gateway.models = {role: model for role in config.gateway.models}
        if config.gateway.backend not in ("scripted", "http"):
            raise ConfigInvalid(f"unknown backend {config.gateway.backend!r}")
        return config

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def model(self, role: str) -> str:
        try:
            return self.gateway.models[role]
        except KeyError as exc:
            raise ConfigInvalid(f"no model configured for role {role!r}") from exc

    def build_gateway(self, replay: bool = False) -> Gateway:
        gw = self.gateway
        cache = ResponseCache(gw.cache)
        if replay:
            endpoint_id = "scripted" if gw.backend == "scripted" else gw.base_url.rstrip("/")
            backend = ReplayBackend(endpoint_id)
        elif gw.backend == "scripted":
            if not gw.script:
                raise ConfigInvalid("scripted backend requires gateway.script")
            backend = ScriptedBackend.from_file(gw.script)
        else:
            if not gw.api_keys:
                raise ConfigInvalid("http backend requires api keys (config or EMOJINIZE_API_KEY)")
            backend = HttpBackend(gw.base_url, KeyPool(gw.api_keys, cooldown_s=gw.cooldown_s))
        return Gateway(backend, cache, max_in_flight=gw.max_in_flight, retries=gw.retries)

"""Text-to-emoji translation via few-shot prompting with a JSON reply template.

The prompt marks the passage to translate in angle brackets and shows curated
in-context demonstrations; the model fills a two-key JSON template that first
repeats the marked passage and then gives the emoji translation. Replies that
fail the template or the emoji-only check are rejected and resampled. On top
of the single-passage translator sit: batch mode (N passages, one call),
LLM-proposed translation units (idioms and other multi-word expressions), and
a multi-shot mode that samples several candidate translations and keeps the
one an LLM jury backtranslates best.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .cloze import ClozeItem, GuessConfig, build_guess_request, extract_guess, match_guess
from .emojitext import EmojiSequence, EmojiTextError, emoji_count, parse_emoji_sequence
from .gateway import ChatMessage, ChatRequest, Gateway, GatewayError

TRANSLATION_SYSTEM = (
    "You are an expert translator from {language} into emoji. The user sends a "
    "text in which one or more passages are marked with angle brackets, like "
    "<this>. Translate each marked passage into a sequence of one or more emoji "
    "that conveys its meaning in this specific context. Reply with a single "
    "JSON object and nothing else. The object has exactly two keys: \"text\", "
    "which repeats each marked passage verbatim, and \"emoji\", which holds its "
    "emoji translation. {shape} The translations must consist only of emoji."
)
SHAPE_SINGLE = 'Both values are strings, e.g. {"text": "...", "emoji": "..."}.'
SHAPE_BATCH = (
    "Both values are arrays with one entry per marked passage, in the order "
    'the passages appear, e.g. {"text": ["...", "..."], "emoji": ["...", "..."]}.'
)

UNITS_SYSTEM = (
    "You find translation units in {language} text: words, complex expressions, "
    "idioms, or phrases that can be translated into emoji as a whole. Each unit "
    "must be one consecutive string of words copied verbatim from the text. "
    "Units must not overlap. Reply with a single JSON object and nothing else, "
    'of the form {{"units": ["...", "..."]}}.'
)
UNITS_DEMONSTRATIONS = (
    (
        "The new policy on social security was announced after the press conference.",
        '{"units": ["social security", "announced", "press conference"]}',
    ),
    (
        "He promised not to let the cat out of the bag before the wedding.",
        '{"units": ["promised", "let the cat out of the bag", "wedding"]}',
    ),
)

# keeps multi-shot jury guesses in a cache-key namespace of their own, so the
# final evaluation guess (sample_index 0, 1, ...) stays an independent sample;
# divisible by every jury size up to 13 so scripted reply cycles start at 0
UTILITY_SAMPLE_BASE = 720_720

_FENCE = re.compile(r"^```[a-zA-Z]*\n(.*)\n```$", re.S)


class TranslationReject(ValueError):
    """Reply rejected; the translator resamples within its budget."""


class MalformedJson(TranslationReject):
    pass


class MissingSpan(TranslationReject):
    pass


class ResampleBudgetExhausted(RuntimeError):
    pass


class NoUnitsFound(RuntimeError):
    pass


@dataclass(frozen=True)
class MarkedText:
    """Source text with character spans marked for translation."""

    text: str
    spans: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.spans:
            raise ValueError("at least one marked span required")
        last = 0
        for start, end in self.spans:
            if not (last <= start < end <= len(self.text)):
                raise ValueError(f"bad span ({start}, {end})")
            if not self.text[start:end].strip():
                raise ValueError("span covers no words")
            last = end

    @classmethod
    def from_marked(cls, marked: str) -> "MarkedText":
        """Parse angle-bracket notation: 'the <bat> whooshed'."""
        text, spans, cursor = "", [], 0
        for m in re.finditer(r"<([^<>]+)>", marked):
            text += marked[cursor : m.start()]
            spans.append((len(text), len(text) + len(m.group(1))))
            text += m.group(1)
            cursor = m.end()
        text += marked[cursor:]
        if not spans:
            raise ValueError("no <marked> span in text")
        return cls(text=text, spans=tuple(spans))

    def passages(self) -> list[str]:
        return [self.text[start:end] for start, end in self.spans]

    def render(self, only: int | None = None) -> str:
        """Wrap marked spans in angle brackets (all, or just span `only`)."""
        out, cursor = "", 0
        for i, (start, end) in enumerate(self.spans):
            out += self.text[cursor:start]
            if only is None or i == only:
                out += f"<{self.text[start:end]}>"
            else:
                out += self.text[start:end]
            cursor = end
        return out + self.text[cursor:]


@dataclass(frozen=True)
class Demonstration:
    marked: MarkedText
    translations: tuple[EmojiSequence, ...]

    def __post_init__(self) -> None:
        if len(self.translations) != len(self.marked.spans):
            raise ValueError("one translation per span required")


def load_demonstrations(path: str | Path | None = None) -> tuple[Demonstration, ...]:
    """Load and validate a demonstrations file (bundled set by default)."""
    if path is None:
        raw = (resources.files("emojinize.data") / "demonstrations.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    demos = []
    for obj in json.loads(raw):
        marked = MarkedText(text=obj["text"], spans=tuple((s["start"], s["end"]) for s in obj["spans"]))
        translations = tuple(parse_emoji_sequence(t) for t in obj["translations"])
        demos.append(Demonstration(marked=marked, translations=translations))
    if not demos:
        raise ValueError("no demonstrations")
    return tuple(demos)


@dataclass
class TranslatorConfig:
    language: str = "English"
    model: str = "gpt-4"
    temperature: float = 0.0
    max_tokens: int = 256
    max_resamples: int = 5
    candidate_temperature: float = 1.0
    demonstrations: tuple[Demonstration, ...] = field(default_factory=load_demonstrations)


@dataclass(frozen=True)
class TranslationResult:
    sequences: tuple[EmojiSequence, ...]
    raw_reply: str
    resamples_used: int


@dataclass(frozen=True)
class MultishotTranslation:
    result: TranslationResult
    utility: float
    candidates: tuple[tuple[str, float], ...]  # (emoji, utility) per evaluated candidate


def _demo_reply(demo: Demonstration, batch: bool, only: int | None = None) -> str:
    if batch:
        obj = {
            "text": demo.marked.passages(),
            "emoji": [str(seq) for seq in demo.translations],
        }
    else:
        index = only if only is not None else 0
        obj = {"text": demo.marked.passages()[index], "emoji": str(demo.translations[index])}
    return json.dumps(obj, ensure_ascii=False)


def build_translation_prompt(
    marked: MarkedText,
    config: TranslatorConfig,
    sample_index: int = 0,
    batch: bool = False,
    only: int | None = None,
) -> ChatRequest:
    """System message, demonstration user/assistant pairs, then the query.

    Single mode marks one passage per message and shows scalar JSON values;
    batch mode marks all passages and shows array values. The system prompt
    names the source language; demonstrations stay in English regardless.
    """
    shape = SHAPE_BATCH if batch else SHAPE_SINGLE
    messages = [ChatMessage("system", TRANSLATION_SYSTEM.format(language=config.language, shape=shape))]
    for demo in config.demonstrations:
        messages.append(ChatMessage("user", demo.marked.render(only=None if batch else 0)))
        messages.append(ChatMessage("assistant", _demo_reply(demo, batch)))
    messages.append(ChatMessage("user", marked.render(only=only)))
    return ChatRequest(
        model=config.model,
        messages=tuple(messages),
        temperature=config.temperature,
        max_tokens=config.max_tokens,
        sample_index=sample_index,
    )


def _strip_fence(reply: str) -> str:
    m = _FENCE.match(reply.strip())
    return m.group(1) if m else reply


def _normalize_repeat(value: str) -> str:
    return value.strip().strip("<>").strip()


def parse_translation_reply(reply: str, expected_spans: list[str]) -> list[EmojiSequence]:
    """Validate a model reply against the JSON template.

    Every expected passage must be repeated under "text" and translated under
    "emoji", and every translation must be emoji-only. Any violation raises a
    TranslationReject subclass (or an EmojiTextError), which all mean: reject
    and resample.
    """
    try:
        obj = json.loads(_strip_fence(reply))
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"not JSON: {reply[:80]!r}") from exc
    if not isinstance(obj, dict) or "text" not in obj or "emoji" not in obj:
        raise MalformedJson("reply must be an object with 'text' and 'emoji' keys")

    texts, emoji = obj["text"], obj["emoji"]
    if isinstance(texts, str) and isinstance(emoji, str):
        texts, emoji = [texts], [emoji]
    if not isinstance(texts, list) or not isinstance(emoji, list):
        raise MalformedJson("'text' and 'emoji' must both be strings or both arrays")
    if len(texts) != len(expected_spans) or len(emoji) != len(expected_spans):
        raise MissingSpan(f"expected {len(expected_spans)} entries, got {len(texts)}/{len(emoji)}")
    for expected, repeated in zip(expected_spans, texts):
        if not isinstance(repeated, str) or _normalize_repeat(repeated) != expected.strip():
            raise MissingSpan(f"passage {expected!r} not repeated (got {repeated!r})")
    sequences = []
    for value in emoji:
        if not isinstance(value, str):
            raise MalformedJson("emoji entries must be strings")
        sequences.append(parse_emoji_sequence(value))
    return sequences


def _attempt_until_accepted(
    gateway: Gateway,
    make_request,
    parse,
    max_resamples: int,
) -> tuple[object, str, int]:
    """Issue make_request(sample_index) until parse accepts, within budget."""
    rejections = []
    for attempt in range(max_resamples):
        reply = gateway.complete(make_request(attempt)).content
        try:
            return parse(reply), reply, attempt
        except (TranslationReject, EmojiTextError) as exc:
            rejections.append(f"attempt {attempt}: {type(exc).__name__}: {exc}")
    raise ResampleBudgetExhausted("; ".join(rejections))


def translate(marked: MarkedText, config: TranslatorConfig, gateway: Gateway) -> TranslationResult:
    """Translate each marked span with its own prompt (one passage per call),
    resampling rejected replies with an incremented sample_index."""
    sequences: list[EmojiSequence] = []
    raw_replies: list[str] = []
    resamples = 0
    for i, passage in enumerate(marked.passages()):
        parsed, reply, used = _attempt_until_accepted(
            gateway,
            lambda sample_index, i=i: build_translation_prompt(marked, config, sample_index, only=i),
            lambda reply, passage=passage: parse_translation_reply(reply, [passage]),
            config.max_resamples,
        )
        sequences.extend(parsed)
        raw_replies.append(reply)
        resamples += used
    return TranslationResult(
        sequences=tuple(sequences), raw_reply="\n".join(raw_replies), resamples_used=resamples
    )


def translate_batch(marked: MarkedText, config: TranslatorConfig, gateway: Gateway) -> TranslationResult:
    """All spans in one round trip; validation and resampling are
    all-or-nothing. With a single span this degenerates to translate()."""
    batch = len(marked.spans) > 1
    parsed, reply, used = _attempt_until_accepted(
        gateway,
        lambda sample_index: build_translation_prompt(marked, config, sample_index, batch=batch),
        lambda reply: parse_translation_reply(reply, marked.passages()),
        config.max_resamples,
    )
    return TranslationResult(sequences=tuple(parsed), raw_reply=reply, resamples_used=used)


def _parse_units_reply(reply: str, text: str) -> list[tuple[int, int]]:
    try:
        obj = json.loads(_strip_fence(reply))
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"not JSON: {reply[:80]!r}") from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("units"), list):
        raise MalformedJson("reply must be an object with a 'units' array")
    spans: list[tuple[int, int]] = []
    cursor = 0
    for unit in obj["units"]:
        if not isinstance(unit, str) or not unit.strip():
            continue
        # verbatim check: invented units are dropped, overlapping ones too
        start = text.find(unit, cursor)
        if start < 0:
            continue
        spans.append((start, start + len(unit)))
        cursor = start + len(unit)
    return spans


def identify_units(text: str, config: TranslatorConfig, gateway: Gateway) -> list[tuple[int, int]]:
    """Ask the model for translation units; keep only spans that occur
    verbatim in the text, non-overlapping, in order."""
    if not text.strip():
        raise ValueError("empty text")
    messages = [ChatMessage("system", UNITS_SYSTEM.format(language=config.language))]
    for question, answer in UNITS_DEMONSTRATIONS:
        messages.append(ChatMessage("user", question))
        messages.append(ChatMessage("assistant", answer))
    messages.append(ChatMessage("user", text))

    def make_request(sample_index: int) -> ChatRequest:
        return ChatRequest(
            model=config.model,
            messages=tuple(messages),
            temperature=config.temperature,
            max_tokens=config.max_tokens,
            sample_index=sample_index,
        )

    try:
        spans, _, _ = _attempt_until_accepted(
            gateway, make_request, lambda reply: _parse_units_reply(reply, text), config.max_resamples
        )
    except ResampleBudgetExhausted as exc:
        raise NoUnitsFound(str(exc)) from exc
    if not spans:
        raise NoUnitsFound(f"no verbatim units in {text[:60]!r}")
    return spans


def backtranslation_utility(
    candidate: EmojiSequence,
    item: ClozeItem,
    independent_guesses: int,
    gateway: Gateway,
    guess_config: GuessConfig,
) -> float:
    """Fraction of independent LLM guesses that recover the hidden word when
    the candidate is shown as the hint."""
    hinted = replace(item, hint=candidate, condition="emojinize_multishot")
    requests = [
        build_guess_request(hinted, guess_config, sample_index=UTILITY_SAMPLE_BASE + j)
        for j in range(independent_guesses)
    ]
    replies = gateway.complete_many(requests)
    correct = sum(
        match_guess(extract_guess(reply.content), item.hidden_surface, gateway, guess_config)
        for reply in replies
    )
    return correct / independent_guesses


def translate_multishot(
    marked: MarkedText,
    item: ClozeItem,
    config: TranslatorConfig,
    gateway: Gateway,
    guess_config: GuessConfig | None = None,
    candidates: int = 5,
    guesses_per_candidate: int = 10,
) -> MultishotTranslation:
    """Sample K candidate translations at the candidate temperature, score
    each by backtranslation utility, and keep the argmax; ties go to the
    translation with fewer emoji, then to the earlier sample."""
    if len(marked.spans) != 1:
        raise ValueError("multi-shot translation expects a single marked span")
    if guess_config is None:
        guess_config = GuessConfig()
    jury_config = replace(guess_config, temperature=max(guess_config.temperature, 1.0))

    candidate_config = replace(config, temperature=config.candidate_temperature)
    requests = [
        build_translation_prompt(marked, candidate_config, sample_index=k) for k in range(candidates)
    ]
    replies = gateway.complete_many(requests, return_errors=True)

    seen: dict[tuple[str, ...], tuple[EmojiSequence, str, int]] = {}
    rejects = 0
    for k, reply in enumerate(replies):
        if isinstance(reply, GatewayError):
            rejects += 1
            continue
        try:
            (sequence,) = parse_translation_reply(reply.content, marked.passages())
        except (TranslationReject, EmojiTextError):
            rejects += 1
            continue
        dedup_key = tuple(c.text for c in sequence.clusters)
        if dedup_key not in seen:  # deduplicate: don't pay the jury twice
            seen[dedup_key] = (sequence, reply.content, k)
    if not seen:
        raise ResampleBudgetExhausted(f"all {candidates} candidates rejected")

    scored = []
    for sequence, raw_reply, k in seen.values():
        utility = backtranslation_utility(sequence, item, guesses_per_candidate, gateway, jury_config)
        scored.append((utility, sequence, raw_reply, k))

    best = max(scored, key=lambda s: (s[0], -emoji_count(s[1]), -s[3]))
    utility, sequence, raw_reply, _ = best
    return MultishotTranslation(
        result=TranslationResult(sequences=(sequence,), raw_reply=raw_reply, resamples_used=rejects),
        utility=utility,
        candidates=tuple((str(seq), u) for u, seq, _, _ in sorted(scored, key=lambda s: s[3])),
    )

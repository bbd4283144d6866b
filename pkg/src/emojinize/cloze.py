"""Cloze-test protocol: render items, collect LLM guesses, score them.

One cloze item hides a word (or consecutive words) from a passage; the
participant sees blanks plus, in non-baseline conditions, an emoji hint.
Guessing uses few-shot prompting with plain-text answers; scoring
short-circuits on exact matches and otherwise asks an LLM whether guess and
hidden word mean the same thing (synonyms and typos count as correct).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .emojitext import EmojiSequence, parse_emoji_sequence
from .gateway import ChatMessage, ChatRequest, Gateway, GatewayError

CONDITIONS = (
    "baseline",
    "human_translation",
    "emojinize",
    "emojinize_multishot",
    "emojinize_batch",
    "emojinize_mwe",
)

BLANK = "____"

GUESS_SYSTEM = (
    "You are taking a fill-in-the-blank test. Each question is a short text in "
    "which one or more consecutive words were replaced by blanks (____). "
    "Sometimes an emoji hint for the hidden words is shown in parentheses right "
    "after the blanks. Reply with only your guess for the hidden words, as plain "
    "text on a single line, exactly one word per blank, with no explanation."
)

# (question, answer) few-shot pairs; plain-text answers, no JSON
GUESS_DEMONSTRATIONS = (
    ("The sailboat drifted across the calm ____ at dawn.", "lake"),
    ("He tied his ____ (hint: 👟) tightly before the race.", "shoes"),
    ("She decided to ____ ____ early and watch the sunrise.", "wake up"),
)

MATCH_SYSTEM = (
    "You judge whether two given words or short phrases have the same meaning "
    "in ordinary usage. Detect synonyms, and ignore capitalization, small "
    "spelling mistakes, and typos. Reply with exactly one word: yes or no."
)


class ClozeError(ValueError):
    pass


class ScorerExhausted(ClozeError):
    """The synonym scorer never produced a parseable yes/no verdict."""


@dataclass(frozen=True)
class ClozeItem:
    sample_id: str
    text: str
    span: tuple[int, int]
    hidden_surface: str
    condition: str
    hint: EmojiSequence | None = None

    def __post_init__(self) -> None:
        if self.condition not in CONDITIONS:
            raise ClozeError(f"unknown condition {self.condition!r}")
        start, end = self.span
        if self.text[start:end] != self.hidden_surface:
            raise ClozeError("span does not match hidden surface")
        if (self.hint is None) != (self.condition == "baseline"):
            raise ClozeError("hint required exactly when condition is not baseline")


@dataclass(frozen=True)
class GuessRecord:
    item_id: str
    condition: str
    participant_kind: str
    participant_id: str
    guess: str
    matched: bool
    scored_by: str  # exact | llm | error
    flags: tuple[str, ...] = ()
    error: str | None = None

    def to_json(self) -> dict:
        rec = {
            "item_id": self.item_id,
            "condition": self.condition,
            "participant_kind": self.participant_kind,
            "participant_id": self.participant_id,
            "guess": self.guess,
            "matched": self.matched,
            "scored_by": self.scored_by,
        }
        if self.flags:
            rec["flags"] = list(self.flags)
        if self.error is not None:
            rec["error"] = self.error
        return rec

    @classmethod
    def from_json(cls, obj: dict) -> "GuessRecord":
        return cls(
            item_id=obj["item_id"],
            condition=obj["condition"],
            participant_kind=obj["participant_kind"],
            participant_id=obj["participant_id"],
            guess=obj["guess"],
            matched=obj["matched"],
            scored_by=obj["scored_by"],
            flags=tuple(obj.get("flags", ())),
            error=obj.get("error"),
        )


@dataclass
class GuessConfig:
    model: str = "gpt-4"
    temperature: float = 0.0
    max_tokens: int = 24
    max_resamples: int = 5


def render_cloze(item: ClozeItem) -> str:
    """Replace the hidden span with one blank per hidden word, hint after."""
    start, end = item.span
    blanks = " ".join([BLANK] * len(item.hidden_surface.split()))
    if item.hint is not None:
        blanks += f" (hint: {item.hint})"
    return item.text[:start] + blanks + item.text[end:]


def build_guess_request(item: ClozeItem, config: GuessConfig, sample_index: int = 0) -> ChatRequest:
    messages = [ChatMessage("system", GUESS_SYSTEM)]
    for question, answer in GUESS_DEMONSTRATIONS:
        messages.append(ChatMessage("user", question))
        messages.append(ChatMessage("assistant", answer))
    messages.append(ChatMessage("user", render_cloze(item)))
    return ChatRequest(
        model=config.model,
        messages=tuple(messages),
        temperature=config.temperature,
        max_tokens=config.max_tokens,
        sample_index=sample_index,
    )


def extract_guess(reply: str) -> str:
    """Whitespace-trim the reply and keep its first line verbatim."""
    lines = reply.strip().splitlines()
    return lines[0].strip() if lines else ""


def llm_guess(item: ClozeItem, gateway: Gateway, config: GuessConfig, sample_index: int = 0) -> str:
    return extract_guess(gateway.complete(build_guess_request(item, config, sample_index)).content)


def _parse_verdict(reply: str) -> bool | None:
    word = reply.strip().split()[0].strip(".,!:;\"'").lower() if reply.strip() else ""
    if word == "yes":
        return True
    if word == "no":
        return False
    return None


def match_guess_detail(
    guess: str, hidden: str, gateway: Gateway, config: GuessConfig
) -> tuple[bool, str, tuple[str, ...]]:
    """(matched, scored_by, flags); exhausting the scorer budget scores as
    unmatched with a flag rather than failing the run."""
    if not guess.strip():
        return False, "exact", ("blank",)
    if guess.strip().casefold() == hidden.strip().casefold():
        return True, "exact", ()
    user = f'Word A: "{hidden}"\nWord B: "{guess}"\nDo they mean the same thing?'
    for sample_index in range(config.max_resamples):
        request = ChatRequest(
            model=config.model,
            messages=(ChatMessage("system", MATCH_SYSTEM), ChatMessage("user", user)),
            temperature=config.temperature,
            max_tokens=8,
            sample_index=sample_index,
        )
        verdict = _parse_verdict(gateway.complete(request).content)
        if verdict is not None:
            return verdict, "llm", ()
    return False, "llm", ("scorer_exhausted",)


def match_guess(guess: str, hidden: str, gateway: Gateway, config: GuessConfig) -> bool:
    return match_guess_detail(guess, hidden, gateway, config)[0]


def read_records(path: str | Path) -> list[GuessRecord]:
    path = Path(path)
    if not path.exists():
        return []
    return [
        GuessRecord.from_json(json.loads(line))
        for line in path.read_text("utf-8").splitlines()
        if line.strip()
    ]


def append_records(path: str | Path, records: list[GuessRecord]) -> None:
    if not records:
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def load_human_translations(path: str | Path) -> dict[str, EmojiSequence]:
    """Import format: one JSON record per line {sample_id, emoji}; every entry
    is validated as emoji-only on load."""
    translations = {}
    for line in Path(path).read_text("utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        translations[str(obj["sample_id"])] = parse_emoji_sequence(obj["emoji"])
    return translations


@dataclass(frozen=True)
class TranslationEntry:
    """A hint for one corpus sample; span/surface present only when the
    translation unit replaces the corpus target (multi-word expressions)."""

    sample_id: str
    emoji: EmojiSequence
    span: tuple[int, int] | None = None
    surface: str | None = None


def build_items(
    corpus_entries: list[dict],
    condition: str,
    translations: dict[str, TranslationEntry] | None = None,
) -> tuple[list[ClozeItem], list[GuessRecord]]:
    """Make one ClozeItem per corpus entry; entries whose translation is
    missing in a hinted condition become error records instead."""
    items: list[ClozeItem] = []
    errors: list[GuessRecord] = []
    for entry in corpus_entries:
        sample_id = entry["id"]
        target = entry["target"]
        span = (target["start"], target["end"])
        surface = target["surface"]
        hint = None
        if condition != "baseline":
            translation = (translations or {}).get(sample_id)
            if translation is None:
                errors.append(
                    GuessRecord(
                        item_id=sample_id,
                        condition=condition,
                        participant_kind="llm",
                        participant_id="",
                        guess="",
                        matched=False,
                        scored_by="error",
                        error="missing translation",
                    )
                )
                continue
            hint = translation.emoji
            if translation.span is not None:
                span = translation.span
                surface = translation.surface or entry["text"][span[0] : span[1]]
        items.append(
            ClozeItem(
                sample_id=sample_id,
                text=entry["text"],
                span=span,
                hidden_surface=surface,
                condition=condition,
                hint=hint,
            )
        )
    return items, errors


def run_condition(
    corpus_entries: list[dict],
    condition: str,
    gateway: Gateway,
    config: GuessConfig,
    translations: dict[str, TranslationEntry] | None = None,
    records_path: str | Path | None = None,
    participant_id: str = "llm-0",
    sample_index: int = 0,
) -> list[GuessRecord]:
    """One guess per item, scored; records are appended incrementally in item
    order, per-item failures recorded without aborting, and items already in
    the records file are skipped so interrupted runs resume."""
    done = set()
    if records_path is not None:
        done = {
            (r.item_id, r.condition, r.participant_id)
            for r in read_records(records_path)
            if r.condition == condition
        }

    items, error_records = build_items(corpus_entries, condition, translations)
    error_records = [
        replace(r, participant_id=participant_id)
        for r in error_records
        if (r.item_id, condition, participant_id) not in done
    ]
    items = [i for i in items if (i.sample_id, condition, participant_id) not in done]
    if records_path is not None:
        append_records(records_path, error_records)

    requests = [build_guess_request(item, config, sample_index) for item in items]
    replies = gateway.complete_many(requests, return_errors=True)

    records: list[GuessRecord] = []
    for item, reply in zip(items, replies):
        if isinstance(reply, GatewayError):
            record = GuessRecord(
                item_id=item.sample_id,
                condition=condition,
                participant_kind="llm",
                participant_id=participant_id,
                guess="",
                matched=False,
                scored_by="error",
                error=str(reply),
            )
        else:
            guess = extract_guess(reply.content)
            try:
                matched, scored_by, flags = match_guess_detail(guess, item.hidden_surface, gateway, config)
                record = GuessRecord(
                    item_id=item.sample_id,
                    condition=condition,
                    participant_kind="llm",
                    participant_id=participant_id,
                    guess=guess,
                    matched=matched,
                    scored_by=scored_by,
                    flags=flags,
                )
            except GatewayError as exc:
                record = GuessRecord(
                    item_id=item.sample_id,
                    condition=condition,
                    participant_kind="llm",
                    participant_id=participant_id,
                    guess=guess,
                    matched=False,
                    scored_by="error",
                    error=str(exc),
                )
        records.append(record)
        if records_path is not None:
            append_records(records_path, [record])
    return error_records + records

#!/usr/bin/env python3
"""Regenerate the scripted-backend fixture for end-to-end pipeline runs.

Builds the 20-item fixture corpus exactly as `emojinize corpus-build` does
(seed 7, lexicon tagger, scripted quality filter), then derives:

  tests/fixtures/script.json              backend rules covering every request
                                          the whole pipeline will make
  tests/fixtures/human_translations.jsonl hand-authored human condition hints

The guess rules are constructed so the report reproduces the qualitative
ordering emojinize (14/20) > human_translation (10/20) > baseline (6/20),
with multi-word-expression items correct on 12/20.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from emojinize.cli import _batch_spans  # noqa: E402
from emojinize.corpus import CorpusConfig, LexiconPosTagger, TOKEN_RE, build_corpus  # noqa: E402
from emojinize.gateway import Gateway, ScriptRule, ScriptedBackend  # noqa: E402
from emojinize.translator import MarkedText  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"
SEED = 7
BATCH_SPANS = 3

SPAM = '{"spam": true, "non_english": false, "formatting": false, "explicit": false}'
CLEAR = '{"spam": false, "non_english": false, "formatting": false, "explicit": false}'

# one emoji per item per role; all single RGI clusters, no cross-pool repeats
PRIMARY = "🐈 🐕 🐦 🦊 🐻 🐸 🐙 🦉 🐢 🐝 🌲 🌻 🍁 🌵 🍄 ⛰️ 🌊 ⭐ 🌙 ☀️".split()
ALT_1 = "🍎 🍞 🧀 🍇 🍋 🍒 🍑 🥕 🌽 🍚 🍰 🍪 🍯 🥛 🍵 🍜 🥨 🥐 🍐 🍉".split()
ALT_2 = "⚽ 🎲 🎯 🎻 🎺 🥁 🎷 🎨 🎭 🎪 🚗 🚲 ⛵ 🚂 🎈 🪁 🔔 🧭 ⚙️ 🔑".split()
UNIT = "🏔️ 🛶 🏰 🗼 🎡 ⛺ 🛖 🏗️ ⛲ 🛰️ 🧵 🪵 🪨 🧲 🪜 🧪 🕰️ 🗿 🪞 🧸".split()
HUMAN = "📗 📙 📘 📕 📒 🗞️ ✏️ 🖊️ 🖌️ 📐 📎 ✂️ 📌 🔍 🗝️ 🪶 🧮 🗺️ 🎁 🧩".split()

BASELINE_CORRECT = 6
HUMAN_CORRECT = 10
EMOJINIZE_CORRECT = 14
MWE_CORRECT = 12
WRONG_GUESS = "pebble"
WRONG_MWE_GUESS = "pebble stone"


def build_fixture_corpus() -> list[dict]:
    quality = Gateway(
        ScriptedBackend(
            [
                ScriptRule(replies=[SPAM], system_contains="reading-comprehension", user_contains="newsletter"),
                ScriptRule(replies=[CLEAR], system_contains="reading-comprehension"),
            ]
        )
    )
    config = CorpusConfig(
        news_dir=FIXTURES / "sources" / "news",
        ebook_dir=FIXTURES / "sources" / "ebooks",
        count_news=10,
        count_ebook=10,
        seed=SEED,
    )
    _, entries = build_corpus(config, gateway=quality, tagger=LexiconPosTagger())
    return entries


def cloze_fragment(entry: dict) -> str:
    """A substring of every rendered cloze for this item (never the target)."""
    target = entry["target"]
    prefix = entry["text"][: target["start"]]
    suffix = entry["text"][target["end"] :]
    return prefix if len(prefix) >= 12 else suffix


def unit_phrase(entry: dict) -> str:
    """A two-word translation unit containing the target, verbatim in text."""
    text, target = entry["text"], entry["target"]
    spans = [(m.start(), m.end()) for m in TOKEN_RE.finditer(text) if m.group()[0].isalpha()]
    index = spans.index((target["start"], target["end"]))
    if index + 1 < len(spans):
        return text[target["start"] : spans[index + 1][1]]
    return text[spans[index - 1][0] : target["end"]]


def translation_json(passage: str, emoji: str) -> str:
    return json.dumps({"text": passage, "emoji": emoji}, ensure_ascii=False)


def main() -> None:
    entries = build_fixture_corpus()
    assert len(entries) == 20, f"expected 20 fixture samples, got {len(entries)}"

    fragments = [cloze_fragment(e) for e in entries]
    assert len(set(fragments)) == len(fragments), "cloze fragments must be unique per item"

    rules: list[dict] = [
        {
            "name": "quality-spam",
            "system_contains": "reading-comprehension",
            "user_contains": "newsletter",
            "replies": [SPAM],
        },
        {"name": "quality-clear", "system_contains": "reading-comprehension", "replies": [CLEAR]},
    ]
    human_lines = []

    for i, entry in enumerate(entries):
        sid = entry["id"]
        text, target = entry["text"], entry["target"]
        surface = target["surface"]
        fragment = fragments[i]
        primary, alt1, alt2 = PRIMARY[i], ALT_1[i], ALT_2[i]
        unit_emoji, human_emoji = UNIT[i], HUMAN[i]
        unit = unit_phrase(entry)

        marked_single = MarkedText(text=text, spans=((target["start"], target["end"]),)).render()
        marked_batch = _batch_spans(entry, BATCH_SPANS, SEED)

        # batch before single: the batch prompt marks extra words, so the
        # single-render string never occurs inside it (and vice versa)
        batch_reply = json.dumps(
            {
                "text": [text[s:e] for s, e in marked_batch.spans],
                "emoji": [
                    primary if (s, e) == (target["start"], target["end"]) else ALT_1[(i + 7) % 20]
                    for s, e in marked_batch.spans
                ],
            },
            ensure_ascii=False,
        )
        rules.append(
            {
                "name": f"translate-batch-{i}",
                "system_contains": "expert translator",
                "user_contains": marked_batch.render(),
                "replies": [batch_reply],
            }
        )
        rules.append(
            {
                "name": f"translate-single-{i}",
                "system_contains": "expert translator",
                "user_contains": marked_single,
                "replies": [
                    translation_json(surface, primary),
                    translation_json(surface, alt1),
                    translation_json(surface, alt2),
                ],
            }
        )
        rules.append(
            {
                "name": f"translate-unit-{i}",
                "system_contains": "expert translator",
                "user_contains": f"<{unit}>",
                "replies": [translation_json(unit, unit_emoji)],
            }
        )
        rules.append(
            {
                "name": f"units-{i}",
                "system_contains": "translation units",
                "user_contains": text,
                "replies": [json.dumps({"units": [unit]}, ensure_ascii=False)],
            }
        )

        # guesses per hint; jury guesses cycle through the reply list
        guess = lambda ok, wrong=WRONG_GUESS, right=surface: right if ok else wrong
        rules.append(
            {
                "name": f"guess-primary-{i}",
                "system_contains": "fill-in-the-blank",
                "user_contains": f"(hint: {primary})",
                "replies": [guess(i < EMOJINIZE_CORRECT)],
            }
        )
        rules.append(
            {
                "name": f"guess-alt1-{i}",
                "system_contains": "fill-in-the-blank",
                "user_contains": f"(hint: {alt1})",
                "replies": [surface, WRONG_GUESS],  # jury utility 0.5 at M=2
            }
        )
        rules.append(
            {
                "name": f"guess-alt2-{i}",
                "system_contains": "fill-in-the-blank",
                "user_contains": f"(hint: {alt2})",
                "replies": [WRONG_GUESS],
            }
        )
        rules.append(
            {
                "name": f"guess-human-{i}",
                "system_contains": "fill-in-the-blank",
                "user_contains": f"(hint: {human_emoji})",
                "replies": [guess(i < HUMAN_CORRECT)],
            }
        )
        rules.append(
            {
                "name": f"guess-unit-{i}",
                "system_contains": "fill-in-the-blank",
                "user_contains": f"(hint: {unit_emoji})",
                "replies": [unit if i < MWE_CORRECT else WRONG_MWE_GUESS],
            }
        )
        rules.append(
            {
                "name": f"guess-baseline-{i}",
                "system_contains": "fill-in-the-blank",
                "user_contains": fragment,
                "user_not_contains": "(hint:",
                "replies": [guess(i < BASELINE_CORRECT)],
            }
        )

        human_lines.append(json.dumps({"sample_id": sid, "emoji": human_emoji}, ensure_ascii=False))

    rules.append({"name": "scorer-no", "system_contains": "same meaning", "replies": ["no"]})

    (FIXTURES / "script.json").write_text(json.dumps(rules, ensure_ascii=False, indent=1) + "\n", "utf-8")
    (FIXTURES / "human_translations.jsonl").write_text("\n".join(human_lines) + "\n", "utf-8")
    print(f"{len(rules)} rules -> tests/fixtures/script.json")
    print(f"{len(human_lines)} human translations -> tests/fixtures/human_translations.jsonl")


if __name__ == "__main__":
    main()

"""Evaluation-corpus construction: ingest, clean, pick hidden target words.

News HTML contributes its paragraph text; ebooks contribute plain text. From
both we sample sentence-sized passages, drop anything caught by the profanity
lexicon (after suffix-strip lemmatization) or the LLM quality rubric, then
hide one randomly chosen noun/verb/adjective/adverb per passage. The finished
corpus is a JSONL file with a manifest header, fully determined by (sources,
config, seed, filter verdicts).
"""

from __future__ import annotations

import hashlib
import json
import random
import re
import zlib
from dataclasses import dataclass, field
from html.parser import HTMLParser
from importlib import resources
from pathlib import Path

from .gateway import ChatMessage, ChatRequest, Gateway

QUALITY_SYSTEM = (
    "You review short text passages for use in a reading-comprehension study. "
    "Reply with a single JSON object and nothing else: "
    '{"spam": true/false, "non_english": true/false, "formatting": true/false, '
    '"explicit": true/false}. "spam" covers advertisements and calls to action '
    'such as newsletter subscription requests; "non_english" any passage not in '
    'English; "formatting" leftover markup, truncation, or garbled text; '
    '"explicit" violent or sexual content, including implicit and indirect '
    "descriptions."
)
QUALITY_CATEGORIES = ("spam", "non_english", "formatting", "explicit")

POS_SYSTEM = (
    "You tag words with their part of speech as used in the given sentence. "
    "The user sends a sentence followed by a JSON array of words. Reply with a "
    "single JSON array of the same length, each entry one of: noun, verb, "
    "adjective, adverb, other. Proper nouns are tagged other."
)

WORD_CLASSES = ("noun", "verb", "adjective", "adverb")

TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z'’-]*|\d+(?:\.\d+)?|[^\w\s]")

# (suffix, replacement) candidates tried against the lexicon during
# lemmatization; good enough for profanity matching, the LLM filter is the
# real safety net
SUFFIX_RULES = (
    ("ies", "y"),
    ("ied", "y"),
    ("ier", "y"),
    ("iest", "y"),
    ("ves", "f"),
    ("sses", "ss"),
    ("es", ""),
    ("s", ""),
    ("ing", ""),
    ("ing", "e"),
    ("ed", ""),
    ("ed", "e"),
    ("er", ""),
    ("est", ""),
    ("ly", ""),
)


class CorpusError(RuntimeError):
    pass


class NoParagraphs(CorpusError):
    pass


class NoEligibleToken(CorpusError):
    pass


class InsufficientCleanSamples(CorpusError):
    pass


@dataclass(frozen=True)
class TextSample:
    id: str
    text: str
    source_kind: str  # news | ebook
    origin: str


@dataclass(frozen=True)
class TargetSelection:
    sample_id: str
    span: tuple[int, int]
    surface: str
    word_class: str


@dataclass(frozen=True)
class FilterVerdict:
    passed: bool
    reason: str | None = None


# --- HTML paragraph extraction ----------------------------------------------


class _ParagraphParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.paragraphs: list[str] = []
        self._depth = 0
        self._chunks: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "p":
            if self._depth == 0:
                self._chunks = []
            self._depth += 1

    def handle_endtag(self, tag):
        if tag == "p" and self._depth > 0:
            self._depth -= 1
            if self._depth == 0:
                text = re.sub(r"\s+", " ", "".join(self._chunks)).strip()
                if text:
                    self.paragraphs.append(text)

    def handle_data(self, data):
        if self._depth > 0:
            self._chunks.append(data)


def extract_paragraphs(html: str) -> list[str]:
    """Text of every top-level <p> element: tags stripped, entities decoded,
    whitespace normalized, order preserved."""
    parser = _ParagraphParser()
    parser.feed(html)
    parser.close()
    if not parser.paragraphs:
        raise NoParagraphs("document contains no paragraph text")
    return parser.paragraphs


# --- lexicons and lemmatization ----------------------------------------------


def _read_lexicon(name: str) -> list[str]:
    text = (resources.files("emojinize.data.lexicons") / name).read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    words = Path(path).read_text("utf-8").split() if path else _read_lexicon("stopwords_en.txt")
    return frozenset(w.casefold() for w in words)


def load_profanity_lexicon(path: str | Path | None = None) -> frozenset[str]:
    words = Path(path).read_text("utf-8").split() if path else _read_lexicon("profanity_en.txt")
    return frozenset(w.casefold() for w in words)


def lemma_candidates(token: str) -> list[str]:
    """The token itself plus every suffix-stripped variant, most specific first."""
    token = token.casefold()
    candidates = [token]
    for suffix, replacement in SUFFIX_RULES:
        if token.endswith(suffix) and len(token) > len(suffix) + 1:
            candidate = token[: -len(suffix)] + replacement
            if candidate not in candidates:
                candidates.append(candidate)
    # undouble a trailing consonant left by -ed/-ing stripping (patted -> pat)
    for candidate in list(candidates):
        if len(candidate) >= 3 and candidate[-1] == candidate[-2] and candidate[-1] not in "aeiousz":
            if candidate[:-1] not in candidates:
                candidates.append(candidate[:-1])
    return candidates


def profanity_filter(text: str, lexicon: frozenset[str]) -> FilterVerdict:
    """Fail on any token whose lemma candidates hit the lexicon; empty text
    fails outright."""
    if not text.strip():
        return FilterVerdict(passed=False, reason="empty")
    for token in TOKEN_RE.findall(text):
        if not token[0].isalpha():
            continue
        for candidate in lemma_candidates(token):
            if candidate in lexicon:
                return FilterVerdict(passed=False, reason=candidate)
    return FilterVerdict(passed=True)


# --- LLM quality filter -------------------------------------------------------


def llm_quality_filter(
    text: str, gateway: Gateway, model: str = "gpt-4", max_resamples: int = 3
) -> FilterVerdict:
    """LLM rubric over spam / non-English / formatting / explicit content;
    passes only when every category is clear."""
    request_messages = (
        ChatMessage("system", QUALITY_SYSTEM),
        ChatMessage("user", text),
    )
    for sample_index in range(max_resamples):
        reply = gateway.complete(
            ChatRequest(model=model, messages=request_messages, max_tokens=64, sample_index=sample_index)
        ).content
        try:
            verdict = json.loads(reply)
            flagged = [c for c in QUALITY_CATEGORIES if verdict.get(c)]
        except (json.JSONDecodeError, AttributeError):
            continue
        if not isinstance(verdict, dict):
            continue
        if flagged:
            return FilterVerdict(passed=False, reason=flagged[0])
        return FilterVerdict(passed=True)
    return FilterVerdict(passed=False, reason="verdict_unparseable")


# --- word-class tagging --------------------------------------------------------


class LexiconPosTagger:
    """Offline tagger over the bundled lexicon: exact lookup first, then
    suffix-stripped lookup, then coarse suffix heuristics."""

    HEURISTICS = (
        ("ly", "adverb"),
        ("tion", "noun"),
        ("sion", "noun"),
        ("ment", "noun"),
        ("ness", "noun"),
        ("ship", "noun"),
        ("ize", "verb"),
        ("ise", "verb"),
        ("ify", "verb"),
        ("ous", "adjective"),
        ("ful", "adjective"),
        ("ive", "adjective"),
        ("able", "adjective"),
        ("ible", "adjective"),
        ("al", "adjective"),
        ("ic", "adjective"),
    )

    def __init__(self, path: str | Path | None = None):
        if path is None:
            lines = _read_lexicon("pos_lexicon_en.tsv")
        else:
            lines = [l for l in Path(path).read_text("utf-8").splitlines() if l.strip()]
        self._classes: dict[str, str] = {}
        for line in lines:
            word, cls = line.split("\t")
            self._classes[word] = cls

    def tag(self, tokens: list[str], text: str = "") -> list[str]:
        return [self._tag_one(token) for token in tokens]

    def _tag_one(self, token: str) -> str:
        word = token.casefold()
        if not word or not word[0].isalpha():
            return "other"
        if word in self._classes:
            return self._classes[word]
        for candidate in lemma_candidates(word)[1:]:
            if candidate in self._classes:
                return self._classes[candidate]
        for suffix, cls in self.HEURISTICS:
            if word.endswith(suffix) and len(word) > len(suffix) + 2:
                return cls
        return "other"


class LlmPosTagger:
    """LLM-backed tagger via a JSON rubric; the default when a gateway is
    available, since the offline lexicon cannot cover open vocabulary."""

    def __init__(self, gateway: Gateway, model: str = "gpt-4", max_resamples: int = 3):
        self.gateway = gateway
        self.model = model
        self.max_resamples = max_resamples

    def tag(self, tokens: list[str], text: str = "") -> list[str]:
        user = f"{text}\n{json.dumps(tokens, ensure_ascii=False)}"
        messages = (ChatMessage("system", POS_SYSTEM), ChatMessage("user", user))
        for sample_index in range(self.max_resamples):
            reply = self.gateway.complete(
                ChatRequest(model=self.model, messages=messages, max_tokens=512, sample_index=sample_index)
            ).content
            try:
                classes = json.loads(reply)
            except json.JSONDecodeError:
                continue
            if (
                isinstance(classes, list)
                and len(classes) == len(tokens)
                and all(isinstance(c, str) for c in classes)
            ):
                return [c if c in WORD_CLASSES else "other" for c in classes]
        return ["other"] * len(tokens)


# --- target selection -----------------------------------------------------------


def _token_spans(text: str) -> list[tuple[int, int, str]]:
    return [(m.start(), m.end(), m.group()) for m in TOKEN_RE.finditer(text)]


def _is_sentence_initial(text: str, start: int) -> bool:
    before = text[:start].rstrip()
    return not before or before[-1] in ".!?\"'"


def eligible_targets(
    text: str,
    tagger,
    stopwords: frozenset[str],
) -> list[tuple[tuple[int, int], str, str]]:
    """Token spans eligible for hiding: noun/verb/adjective/adverb, no
    stopwords, proper nouns, punctuation, or numbers."""
    spans = _token_spans(text)
    tokens = [t for _, _, t in spans]
    classes = tagger.tag(tokens, text)
    eligible = []
    known = getattr(tagger, "_classes", {})
    for (start, end, token), cls in zip(spans, classes):
        if not token[0].isalpha():
            continue  # punctuation, numbers
        if token.casefold() in stopwords:
            continue
        if token[0].isupper():
            # proper-noun heuristic: capitalized mid-sentence is a name; at
            # sentence start trust only words the lexicon knows (when the
            # tagger has one)
            if not _is_sentence_initial(text, start):
                continue
            if known and token.casefold() not in known:
                continue
        if cls not in WORD_CLASSES:
            continue
        eligible.append(((start, end), token, cls))
    return eligible


def select_target_word(
    sample: TextSample,
    seed: int,
    tagger=None,
    stopwords: frozenset[str] | None = None,
) -> TargetSelection:
    """Uniformly pick one eligible token with the seeded RNG."""
    tagger = tagger or LexiconPosTagger()
    stopwords = stopwords if stopwords is not None else load_stopwords()
    eligible = eligible_targets(sample.text, tagger, stopwords)
    if not eligible:
        raise NoEligibleToken(f"no eligible token in {sample.text[:60]!r}")
    span, surface, cls = random.Random(seed).choice(eligible)
    return TargetSelection(sample_id=sample.id, span=span, surface=surface, word_class=cls)


# --- passage sampling and corpus assembly ----------------------------------------


_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


def split_passages(blocks: list[str], min_tokens: int = 8, max_tokens: int = 60) -> list[str]:
    """Sentence-like units within the configured length bounds."""
    passages = []
    for block in blocks:
        for sentence in _SENTENCE_SPLIT.split(block.strip()):
            sentence = sentence.strip()
            n = len(TOKEN_RE.findall(sentence))
            if min_tokens <= n <= max_tokens:
                passages.append(sentence)
    return passages


def _sample_id(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


@dataclass
class CorpusConfig:
    news_dir: str | Path | None = None
    ebook_dir: str | Path | None = None
    count_news: int = 500
    count_ebook: int = 500
    seed: int = 0
    min_tokens: int = 8
    max_tokens: int = 60
    profanity_path: str | Path | None = None
    stopwords_path: str | Path | None = None
    quality_model: str = "gpt-4"
    skip_quality_filter: bool = False


def _collect_candidates(config: CorpusConfig) -> dict[str, list[TextSample]]:
    sources: dict[str, list[TextSample]] = {"news": [], "ebook": []}
    if config.news_dir:
        for path in sorted(Path(config.news_dir).glob("*.htm*")):
            try:
                blocks = extract_paragraphs(path.read_text("utf-8"))
            except NoParagraphs:
                continue
            for passage in split_passages(blocks, config.min_tokens, config.max_tokens):
                sources["news"].append(
                    TextSample(id=_sample_id(passage), text=passage, source_kind="news", origin=path.name)
                )
    if config.ebook_dir:
        for path in sorted(Path(config.ebook_dir).glob("*.txt")):
            blocks = [b.strip() for b in re.split(r"\n\s*\n", path.read_text("utf-8")) if b.strip()]
            blocks = [re.sub(r"\s+", " ", b) for b in blocks]
            for passage in split_passages(blocks, config.min_tokens, config.max_tokens):
                sources["ebook"].append(
                    TextSample(id=_sample_id(passage), text=passage, source_kind="ebook", origin=path.name)
                )
    return sources


def build_corpus(
    config: CorpusConfig,
    gateway: Gateway | None = None,
    tagger=None,
    out_path: str | Path | None = None,
) -> tuple[dict, list[dict]]:
    """Sample, clean (profanity lexicon, then LLM rubric), select targets,
    meet per-source quotas, shuffle with the seed, optionally write JSONL.

    Returns (manifest, entries). Reproducible byte-for-byte for fixed inputs.
    """
    lexicon = load_profanity_lexicon(config.profanity_path)
    stopwords = load_stopwords(config.stopwords_path)
    if tagger is None:
        tagger = LlmPosTagger(gateway, config.quality_model) if gateway else LexiconPosTagger()

    candidates = _collect_candidates(config)
    rng = random.Random(config.seed)
    quotas = {"news": config.count_news, "ebook": config.count_ebook}
    chosen: list[tuple[TextSample, TargetSelection]] = []
    seen_ids: set[str] = set()

    for kind in ("news", "ebook"):
        pool = candidates[kind]
        rng.shuffle(pool)
        taken = 0
        for sample in pool:
            if taken >= quotas[kind]:
                break
            if sample.id in seen_ids:
                continue
            if not profanity_filter(sample.text, lexicon).passed:
                continue
            if gateway is not None and not config.skip_quality_filter:
                if not llm_quality_filter(sample.text, gateway, config.quality_model).passed:
                    continue
            target_seed = config.seed ^ zlib.crc32(sample.id.encode())
            try:
                target = select_target_word(sample, target_seed, tagger, stopwords)
            except NoEligibleToken:
                continue
            chosen.append((sample, target))
            seen_ids.add(sample.id)
            taken += 1
        if taken < quotas[kind] and quotas[kind] > 0:
            raise InsufficientCleanSamples(
                f"{kind}: needed {quotas[kind]}, found {taken} clean samples"
            )

    order = random.Random(config.seed)
    order.shuffle(chosen)

    entries = [
        {
            "id": sample.id,
            "text": sample.text,
            "source_kind": sample.source_kind,
            "origin": sample.origin,
            "target": {
                "start": target.span[0],
                "end": target.span[1],
                "surface": target.surface,
                "word_class": target.word_class,
            },
        }
        for sample, target in chosen
    ]
    manifest = {
        "kind": "corpus_manifest",
        "counts": {
            "news": sum(1 for e in entries if e["source_kind"] == "news"),
            "ebook": sum(1 for e in entries if e["source_kind"] == "ebook"),
        },
        "seed": config.seed,
        "filters": {
            "profanity_lexicon": hashlib.sha256(
                "\n".join(sorted(lexicon)).encode()
            ).hexdigest()[:12],
            "stopwords": hashlib.sha256("\n".join(sorted(stopwords)).encode()).hexdigest()[:12],
            "tagger": type(tagger).__name__,
            "llm_quality_filter": bool(gateway is not None and not config.skip_quality_filter),
        },
    }
    if out_path is not None:
        write_corpus(out_path, manifest, entries)
    return manifest, entries


def write_corpus(path: str | Path, manifest: dict, entries: list[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(manifest, ensure_ascii=False, sort_keys=True) + "\n")
        for entry in entries:
            fh.write(json.dumps(entry, ensure_ascii=False, sort_keys=True) + "\n")


def load_corpus(path: str | Path) -> tuple[dict, list[dict]]:
    lines = [l for l in Path(path).read_text("utf-8").splitlines() if l.strip()]
    if not lines:
        raise CorpusError(f"empty corpus file {path}")
    manifest = json.loads(lines[0])
    if manifest.get("kind") != "corpus_manifest":
        raise CorpusError("first line must be the corpus manifest")
    return manifest, [json.loads(line) for line in lines[1:]]

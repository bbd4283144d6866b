from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from emojinize.corpus import (
    CorpusConfig,
    InsufficientCleanSamples,
    LexiconPosTagger,
    LlmPosTagger,
    NoEligibleToken,
    NoParagraphs,
    TextSample,
    build_corpus,
    eligible_targets,
    extract_paragraphs,
    lemma_candidates,
    llm_quality_filter,
    load_corpus,
    load_profanity_lexicon,
    load_stopwords,
    profanity_filter,
    select_target_word,
    split_passages,
)
from emojinize.gateway import Gateway, ScriptRule, ScriptedBackend

FIXTURES = Path(__file__).parent / "fixtures" / "sources"

ALL_CLEAR = '{"spam": false, "non_english": false, "formatting": false, "explicit": false}'


# --- HTML extraction ---------------------------------------------------------


def test_extract_simple_paragraphs():
    assert extract_paragraphs("<p>Hello</p><p>World</p>") == ["Hello", "World"]


def test_extract_decodes_entities_and_skips_divs():
    assert extract_paragraphs("<div>skip</div><p>A &amp; B</p>") == ["A & B"]


def test_extract_strips_nested_tags():
    assert extract_paragraphs("<p>x <b>y</b></p>") == ["x y"]


def test_extract_normalizes_whitespace():
    assert extract_paragraphs("<p>a\n   b\t c</p>") == ["a b c"]


def test_extract_no_paragraphs_raises():
    with pytest.raises(NoParagraphs):
        extract_paragraphs("<div>only divs here</div>")


def test_extract_fixture_articles():
    for path in (FIXTURES / "news").glob("*.html"):
        paragraphs = extract_paragraphs(path.read_text())
        assert len(paragraphs) >= 7
        assert all("<" not in p for p in paragraphs)


# --- profanity filter ----------------------------------------------------------


def test_profanity_clean_sentence_passes():
    lexicon = load_profanity_lexicon()
    assert profanity_filter("The quiet garden grew beside the river.", lexicon).passed


def test_profanity_inflected_hit_fails_with_lemma():
    lexicon = frozenset({"blork"})
    verdict = profanity_filter("They were blorking all night.", lexicon)
    assert not verdict.passed
    assert verdict.reason == "blork"


def test_profanity_plural_hit():
    lexicon = frozenset({"zuzzy"})
    assert not profanity_filter("Two zuzzies walked in.", lexicon).passed


def test_profanity_empty_text_fails():
    assert not profanity_filter("   ", frozenset({"x"})).passed


def test_lemma_candidates_cover_common_inflections():
    assert "run" in lemma_candidates("running")
    assert "carry" in lemma_candidates("carried")
    assert "happy" in lemma_candidates("happier")
    assert "quick" in lemma_candidates("quickly")


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz ", min_size=1, max_size=60))
def test_profanity_filter_never_crashes(text):
    profanity_filter(text, frozenset({"qqq"}))


# --- LLM quality filter -----------------------------------------------------------


def scripted_gateway(rules) -> Gateway:
    return Gateway(ScriptedBackend(rules))


def test_quality_filter_all_clear_passes():
    gw = scripted_gateway([ScriptRule(replies=[ALL_CLEAR])])
    assert llm_quality_filter("A calm and ordinary sentence.", gw).passed


def test_quality_filter_spam_fails():
    reply = '{"spam": true, "non_english": false, "formatting": false, "explicit": false}'
    gw = scripted_gateway([ScriptRule(replies=[reply])])
    verdict = llm_quality_filter("Subscribe to our newsletter for updates!", gw)
    assert not verdict.passed
    assert verdict.reason == "spam"


def test_quality_filter_non_english_fails():
    reply = '{"spam": false, "non_english": true, "formatting": false, "explicit": false}'
    gw = scripted_gateway([ScriptRule(replies=[reply])])
    assert llm_quality_filter("Der Hirsch steht im Wald.", gw).reason == "non_english"


def test_quality_filter_unparseable_verdict_fails_closed():
    gw = scripted_gateway([ScriptRule(replies=["hmm, looks fine to me"])])
    verdict = llm_quality_filter("whatever", gw, max_resamples=2)
    assert not verdict.passed
    assert verdict.reason == "verdict_unparseable"


# --- tagging and target selection ---------------------------------------------------


def test_lexicon_tagger_basics():
    tagger = LexiconPosTagger()
    assert tagger.tag(["cat"])[0] == "noun"
    assert tagger.tag(["ran"])[0] == "verb"
    assert tagger.tag(["happy"])[0] == "adjective"
    assert tagger.tag(["slowly"])[0] == "adverb"
    assert tagger.tag(["the"])[0] == "other" or tagger.tag(["the"])[0] not in ("noun",)


def test_llm_tagger_parses_reply():
    reply = '["other", "noun", "verb", "other"]'
    gw = scripted_gateway([ScriptRule(replies=[reply])])
    tagger = LlmPosTagger(gw)
    assert tagger.tag(["The", "cat", "sat", "."], "The cat sat.") == ["other", "noun", "verb", "other"]


def test_eligible_excludes_stopwords_punctuation_numbers():
    tagger = LexiconPosTagger()
    stopwords = load_stopwords()
    eligible = eligible_targets("The cat sat on 3 mats.", tagger, stopwords)
    surfaces = [s for _, s, _ in eligible]
    assert "The" not in surfaces
    assert "3" not in surfaces
    assert "." not in surfaces
    assert set(surfaces) <= {"cat", "sat", "mats"}


def test_eligible_excludes_proper_nouns():
    tagger = LexiconPosTagger()
    stopwords = load_stopwords()
    eligible = eligible_targets("Paris is big.", tagger, stopwords)
    assert [(s, c) for _, s, c in eligible] == [("big", "adjective")]


def test_select_target_deterministic():
    sample = TextSample(id="t1", text="The cat sat.", source_kind="news", origin="x")
    first = select_target_word(sample, seed=7)
    second = select_target_word(sample, seed=7)
    assert first == second
    assert first.surface in {"cat", "sat"}
    assert sample.text[first.span[0] : first.span[1]] == first.surface


def test_select_target_no_eligible_raises():
    sample = TextSample(id="t2", text="The of and.", source_kind="news", origin="x")
    with pytest.raises(NoEligibleToken):
        select_target_word(sample, seed=1)


# --- passage sampling -----------------------------------------------------------------


def test_split_passages_bounds():
    blocks = ["Too short. " + "word " * 20 + "end here now. " + "word " * 80 + "."]
    passages = split_passages(blocks)
    assert all(8 <= len(p.split()) <= 60 for p in passages)


# --- build_corpus ------------------------------------------------------------------------


def corpus_config(**kwargs) -> CorpusConfig:
    defaults = dict(
        news_dir=FIXTURES / "news",
        ebook_dir=FIXTURES / "ebooks",
        count_news=10,
        count_ebook=10,
        seed=7,
    )
    defaults.update(kwargs)
    return CorpusConfig(**defaults)


def test_build_corpus_fixture_counts_and_shuffle(tmp_path):
    manifest, entries = build_corpus(corpus_config(), gateway=None)
    assert manifest["counts"] == {"news": 10, "ebook": 10}
    assert len(entries) == 20
    kinds = [e["source_kind"] for e in entries]
    assert kinds != sorted(kinds)  # shuffled, not grouped by source
    for entry in entries:
        target = entry["target"]
        assert entry["text"][target["start"] : target["end"]] == target["surface"]
        assert target["word_class"] in ("noun", "verb", "adjective", "adverb")


def test_build_corpus_reproducible(tmp_path):
    p1, p2 = tmp_path / "c1.jsonl", tmp_path / "c2.jsonl"
    build_corpus(corpus_config(), out_path=p1)
    build_corpus(corpus_config(), out_path=p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_build_corpus_seed_changes_output():
    _, a = build_corpus(corpus_config())
    _, b = build_corpus(corpus_config(seed=8))
    assert [e["id"] for e in a] != [e["id"] for e in b] or [e["target"] for e in a] != [
        e["target"] for e in b
    ]


def test_build_corpus_no_profanity_in_output():
    lexicon = load_profanity_lexicon()
    _, entries = build_corpus(corpus_config())
    for entry in entries:
        assert profanity_filter(entry["text"], lexicon).passed


def test_build_corpus_scripted_quality_filter_drops_spam():
    # scripted verdicts: the newsletter paragraph is spam, everything else clear
    spam = '{"spam": true, "non_english": false, "formatting": false, "explicit": false}'
    gw = scripted_gateway(
        [
            ScriptRule(replies=[spam], system_contains="reading-comprehension", user_contains="newsletter"),
            ScriptRule(replies=[ALL_CLEAR], system_contains="reading-comprehension"),
        ]
    )
    _, entries = build_corpus(corpus_config(), gateway=gw, tagger=LexiconPosTagger())
    assert all("newsletter" not in e["text"] for e in entries)


def test_build_corpus_insufficient_samples():
    with pytest.raises(InsufficientCleanSamples):
        build_corpus(corpus_config(count_news=10_000))


def test_corpus_round_trip(tmp_path):
    path = tmp_path / "corpus.jsonl"
    manifest, entries = build_corpus(corpus_config(), out_path=path)
    loaded_manifest, loaded_entries = load_corpus(path)
    assert loaded_manifest == manifest
    assert loaded_entries == entries

from __future__ import annotations

import json

import pytest

from emojinize.cloze import ClozeItem, GuessConfig
from emojinize.emojitext import EmptySequence, NonEmojiContent, parse_emoji_sequence
from emojinize.gateway import Gateway, ScriptRule, ScriptedBackend
from emojinize.translator import (
    Demonstration,
    MalformedJson,
    MarkedText,
    MissingSpan,
    NoUnitsFound,
    ResampleBudgetExhausted,
    TranslatorConfig,
    backtranslation_utility,
    build_translation_prompt,
    identify_units,
    load_demonstrations,
    parse_translation_reply,
    translate,
    translate_batch,
    translate_multishot,
)


def config(**kwargs) -> TranslatorConfig:
    return TranslatorConfig(**kwargs)


def gateway_for(rules: list[ScriptRule]) -> tuple[Gateway, ScriptedBackend]:
    backend = ScriptedBackend(rules)
    return Gateway(backend), backend


# --- marked text ------------------------------------------------------------


def test_marked_text_from_marked():
    marked = MarkedText.from_marked("The player was ready, the <bat> whooshed as it swung by.")
    assert marked.passages() == ["bat"]
    assert marked.render() == "The player was ready, the <bat> whooshed as it swung by."


def test_marked_text_validation():
    with pytest.raises(ValueError):
        MarkedText(text="hello", spans=())
    with pytest.raises(ValueError):
        MarkedText(text="hello", spans=((2, 9),))
    with pytest.raises(ValueError):
        MarkedText(text="a  b", spans=((1, 2),))  # whitespace-only span
    with pytest.raises(ValueError):
        MarkedText.from_marked("no spans here")


def test_render_single_span_of_many():
    marked = MarkedText.from_marked("The <chef> plated the <dessert>.")
    assert marked.render(only=0) == "The <chef> plated the dessert."
    assert marked.render(only=1) == "The chef plated the <dessert>."


# --- demonstrations ---------------------------------------------------------


def test_bundled_demonstrations_load_and_validate():
    demos = load_demonstrations()
    assert len(demos) >= 6
    assert all(isinstance(d, Demonstration) for d in demos)
    assert any(len(d.marked.spans) > 1 for d in demos)  # batch-capable demos
    assert any(" " in d.marked.passages()[0] for d in demos)  # an MWE demo


# --- prompt assembly --------------------------------------------------------


def test_prompt_structure_one_demo_one_query():
    demos = load_demonstrations()[:1]
    marked = MarkedText.from_marked("the <bat> whooshed")
    request = build_translation_prompt(marked, config(demonstrations=demos))
    roles = [m.role for m in request.messages]
    assert roles == ["system", "user", "assistant", "user"]
    assert request.temperature == 0.0


def test_prompt_marks_query_span():
    marked = MarkedText.from_marked("The player was ready, the <bat> whooshed as it swung by.")
    request = build_translation_prompt(marked, config())
    assert "<bat>" in request.messages[-1].content


def test_prompt_language_parameter():
    marked = MarkedText.from_marked("Das Haus ist <blau>.")
    english = build_translation_prompt(marked, config())
    german = build_translation_prompt(marked, config(language="German"))
    assert "English" in english.messages[0].content
    assert "German" in german.messages[0].content
    # demonstrations stay in English
    assert german.messages[1].content == english.messages[1].content


def test_demo_replies_are_json_template():
    request = build_translation_prompt(MarkedText.from_marked("<hi> there"), config())
    demo_reply = json.loads(request.messages[2].content)
    assert set(demo_reply) == {"text", "emoji"}


def test_batch_prompt_uses_arrays():
    marked = MarkedText.from_marked("The <chef> plated the <dessert>.")
    request = build_translation_prompt(marked, config(), batch=True)
    assert "<chef>" in request.messages[-1].content
    assert "<dessert>" in request.messages[-1].content
    demo_reply = json.loads(request.messages[2].content)
    assert isinstance(demo_reply["text"], list)


# --- reply parsing ----------------------------------------------------------


def test_parse_valid_reply():
    (seq,) = parse_translation_reply('{"text": "bat", "emoji": "🏏"}', ["bat"])
    assert str(seq) == "🏏"


def test_parse_rejects_prose():
    with pytest.raises(MalformedJson):
        parse_translation_reply("sure! here is the translation: 🏏", ["bat"])


def test_parse_rejects_non_emoji():
    with pytest.raises(NonEmojiContent):
        parse_translation_reply('{"text": "bat", "emoji": "a bat"}', ["bat"])


def test_parse_rejects_empty_translation():
    with pytest.raises(EmptySequence):
        parse_translation_reply('{"text": "bat", "emoji": ""}', ["bat"])


def test_parse_rejects_wrong_repeat():
    with pytest.raises(MissingSpan):
        parse_translation_reply('{"text": "cat", "emoji": "🏏"}', ["bat"])


def test_parse_accepts_bracketed_repeat():
    (seq,) = parse_translation_reply('{"text": "<bat>", "emoji": "🦇"}', ["bat"])
    assert str(seq) == "🦇"


def test_parse_batch_arrays():
    reply = '{"text": ["chef", "dessert"], "emoji": ["👨‍🍳", "🍰"]}'
    seqs = parse_translation_reply(reply, ["chef", "dessert"])
    assert [str(s) for s in seqs] == ["👨‍🍳", "🍰"]


def test_parse_batch_missing_entry():
    with pytest.raises(MissingSpan):
        parse_translation_reply('{"text": ["chef"], "emoji": ["👨‍🍳"]}', ["chef", "dessert"])


def test_parse_fenced_json_tolerated():
    (seq,) = parse_translation_reply('```json\n{"text": "bat", "emoji": "🏏"}\n```', ["bat"])
    assert str(seq) == "🏏"


# --- translate --------------------------------------------------------------


def test_translate_table_examples():
    gw, backend = gateway_for(
        [
            ScriptRule(replies=['{"text": "bat", "emoji": "⚾🏏"}'], user_contains="<bat>"),
            ScriptRule(replies=['{"text": "blue", "emoji": "😞💙"}'], user_contains="<blue>"),
        ]
    )
    result = translate(
        MarkedText.from_marked("The player was ready, the <bat> whooshed as it swung by."),
        config(),
        gw,
    )
    assert str(result.sequences[0]) == "⚾🏏"
    assert result.resamples_used == 0

    result = translate(MarkedText.from_marked("I'm feeling <blue> today"), config(), gw)
    assert str(result.sequences[0]) == "😞💙"


def test_translate_resamples_malformed_reply():
    gw, backend = gateway_for(
        [ScriptRule(replies=["oops not json", '{"text": "bat", "emoji": "🦇"}'])]
    )
    result = translate(MarkedText.from_marked("the <bat> shrieked"), config(), gw)
    assert result.resamples_used == 1
    assert str(result.sequences[0]) == "🦇"
    assert backend.calls == 2


def test_translate_exhausts_budget():
    gw, _ = gateway_for([ScriptRule(replies=["junk"])])
    with pytest.raises(ResampleBudgetExhausted):
        translate(MarkedText.from_marked("the <bat>"), config(max_resamples=3), gw)


def test_translate_deterministic_with_cache():
    rules = [ScriptRule(replies=['{"text": "bat", "emoji": "🦇"}'])]
    gw, backend = gateway_for(rules)
    marked = MarkedText.from_marked("the <bat> flew")
    first = translate(marked, config(), gw)
    second = translate(marked, config(), gw)
    assert first == second
    assert backend.calls == 1  # second run served from cache


def test_translate_multiple_spans_one_call_each():
    gw, backend = gateway_for(
        [
            ScriptRule(replies=['{"text": "chef", "emoji": "👨‍🍳"}'], user_contains="<chef>"),
            ScriptRule(replies=['{"text": "dessert", "emoji": "🍰"}'], user_contains="<dessert>"),
        ]
    )
    marked = MarkedText.from_marked("The <chef> plated the <dessert>.")
    result = translate(marked, config(), gw)
    assert [str(s) for s in result.sequences] == ["👨‍🍳", "🍰"]
    assert backend.calls == 2


# --- translate_batch --------------------------------------------------------


def test_batch_three_spans_single_call():
    reply = '{"text": ["chef", "dessert", "midnight"], "emoji": ["👨‍🍳", "🍰", "🕛"]}'
    gw, backend = gateway_for([ScriptRule(replies=[reply])])
    marked = MarkedText.from_marked("The <chef> plated the <dessert> before <midnight>.")
    result = translate_batch(marked, config(), gw)
    assert backend.calls == 1
    assert [str(s) for s in result.sequences] == ["👨‍🍳", "🍰", "🕛"]


def test_batch_single_span_agrees_with_translate():
    rules = [ScriptRule(replies=['{"text": "bat", "emoji": "🦇"}'])]
    marked = MarkedText.from_marked("the <bat> flew")
    gw1, _ = gateway_for(list(rules))
    gw2, _ = gateway_for(list(rules))
    assert translate_batch(marked, config(), gw1) == translate(marked, config(), gw2)


def test_batch_missing_span_resampled():
    bad = '{"text": ["chef", "dessert"], "emoji": ["👨‍🍳", "🍰"]}'
    good = '{"text": ["chef", "dessert", "midnight"], "emoji": ["👨‍🍳", "🍰", "🕛"]}'
    gw, backend = gateway_for([ScriptRule(replies=[bad, good])])
    marked = MarkedText.from_marked("The <chef> plated the <dessert> before <midnight>.")
    result = translate_batch(marked, config(), gw)
    assert result.resamples_used == 1
    assert backend.calls == 2


# --- identify_units ---------------------------------------------------------


def test_identify_units_idiom():
    text = "Don't spill the beans about the party."
    gw, _ = gateway_for([ScriptRule(replies=['{"units": ["spill the beans", "party"]}'])])
    spans = identify_units(text, config(), gw)
    assert [text[a:b] for a, b in spans] == ["spill the beans", "party"]


def test_identify_units_drops_invented():
    text = "Don't spill the beans about the party."
    gw, _ = gateway_for([ScriptRule(replies=['{"units": ["purple unicorn", "party"]}'])])
    spans = identify_units(text, config(), gw)
    assert [text[a:b] for a, b in spans] == ["party"]


def test_identify_units_drops_overlaps():
    text = "the social security policy"
    gw, _ = gateway_for(
        [ScriptRule(replies=['{"units": ["social security", "security policy", "policy"]}'])]
    )
    spans = identify_units(text, config(), gw)
    # "security policy" overlaps the kept "social security" and is dropped;
    # "policy" still occurs verbatim after it and is kept
    assert [text[a:b] for a, b in spans] == ["social security", "policy"]


def test_identify_units_none_found():
    gw, _ = gateway_for([ScriptRule(replies=['{"units": ["nothing here matches"]}'])])
    with pytest.raises(NoUnitsFound):
        identify_units("a b c", config(), gw)


# --- backtranslation utility & multi-shot ------------------------------------


def cloze_item(condition="baseline", hint=None) -> ClozeItem:
    return ClozeItem(
        sample_id="s1",
        text="The cat sat on the mat.",
        span=(4, 7),
        hidden_surface="cat",
        condition=condition,
        hint=hint,
    )


def test_backtranslation_utility_counts_correct_guesses():
    # guesses alternate correct/wrong by sample_index; scorer says no for wrong
    gw, _ = gateway_for(
        [
            ScriptRule(
                replies=["cat", "dog", "cat", "dog"],
                system_contains="fill-in-the-blank",
            ),
            ScriptRule(replies=["no"], system_contains="same meaning"),
        ]
    )
    utility = backtranslation_utility(
        parse_emoji_sequence("🐈"), cloze_item(), 4, gw, GuessConfig()
    )
    assert utility == 0.5


def test_backtranslation_utility_boundaries():
    gw, _ = gateway_for([ScriptRule(replies=["cat"], system_contains="fill-in-the-blank")])
    assert backtranslation_utility(parse_emoji_sequence("🐈"), cloze_item(), 1, gw, GuessConfig()) == 1.0
    gw, _ = gateway_for(
        [
            ScriptRule(replies=["dog"], system_contains="fill-in-the-blank"),
            ScriptRule(replies=["no"], system_contains="same meaning"),
        ]
    )
    assert backtranslation_utility(parse_emoji_sequence("🐈"), cloze_item(), 3, gw, GuessConfig()) == 0.0


def multishot_rules(candidates: dict[str, str], guesses: dict[str, list[str]]) -> list[ScriptRule]:
    """candidates: sample_index -> reply json; guesses: hint emoji -> replies."""
    rules = [
        ScriptRule(
            replies=[candidates[str(k)] for k in range(len(candidates))],
            system_contains="expert translator",
        )
    ]
    for emoji, replies in guesses.items():
        rules.append(
            ScriptRule(replies=replies, system_contains="fill-in-the-blank", user_contains=emoji)
        )
    rules.append(ScriptRule(replies=["no"], system_contains="same meaning"))
    return rules


def test_multishot_selects_argmax_utility():
    candidates = {
        "0": '{"text": "cat", "emoji": "🐯"}',
        "1": '{"text": "cat", "emoji": "🐈"}',
        "2": '{"text": "cat", "emoji": "🦁"}',
    }
    guesses = {
        "🐯": ["dog", "dog", "cat", "dog"],  # 0.25
        "🐈": ["cat", "cat", "cat", "dog"],  # 0.75
        "🦁": ["cat", "dog", "dog", "dog"],  # 0.25
    }
    gw, _ = gateway_for(multishot_rules(candidates, guesses))
    out = translate_multishot(
        MarkedText.from_marked("The <cat> sat on the mat."),
        cloze_item(),
        config(),
        gw,
        candidates=3,
        guesses_per_candidate=4,
    )
    assert str(out.result.sequences[0]) == "🐈"
    assert out.utility == 0.75
    assert max(u for _, u in out.candidates) == out.utility


def test_multishot_tie_breaks_on_fewer_emoji():
    candidates = {
        "0": '{"text": "cat", "emoji": "🐈🐾"}',
        "1": '{"text": "cat", "emoji": "🐈"}',
    }
    guesses = {"🐈🐾": ["cat", "cat"], "🐈": ["cat", "cat"]}  # both 1.0
    gw, _ = gateway_for(multishot_rules(candidates, guesses))
    out = translate_multishot(
        MarkedText.from_marked("The <cat> sat on the mat."),
        cloze_item(),
        config(),
        gw,
        candidates=2,
        guesses_per_candidate=2,
    )
    assert str(out.result.sequences[0]) == "🐈"
    assert out.utility == 1.0


def test_multishot_k1_degenerates_to_translate():
    candidates = {"0": '{"text": "cat", "emoji": "🐈"}'}
    guesses = {"🐈": ["cat"]}
    gw, _ = gateway_for(multishot_rules(candidates, guesses))
    out = translate_multishot(
        MarkedText.from_marked("The <cat> sat on the mat."),
        cloze_item(),
        config(),
        gw,
        candidates=1,
        guesses_per_candidate=1,
    )
    assert str(out.result.sequences[0]) == "🐈"
    assert out.result.resamples_used == 0


def test_multishot_all_rejected():
    gw, _ = gateway_for([ScriptRule(replies=["garbage"])])
    with pytest.raises(ResampleBudgetExhausted):
        translate_multishot(
            MarkedText.from_marked("The <cat> sat."),
            ClozeItem(
                sample_id="s1",
                text="The cat sat.",
                span=(4, 7),
                hidden_surface="cat",
                condition="baseline",
            ),
            config(),
            gw,
            candidates=2,
            guesses_per_candidate=1,
        )


def test_multishot_dedups_candidates_before_jury():
    candidates = {
        "0": '{"text": "cat", "emoji": "🐈"}',
        "1": '{"text": "cat", "emoji": "🐈"}',
        "2": '{"text": "cat", "emoji": "🐈"}',
    }
    guesses = {"🐈": ["cat"]}
    gw, backend = gateway_for(multishot_rules(candidates, guesses))
    translate_multishot(
        MarkedText.from_marked("The <cat> sat on the mat."),
        cloze_item(),
        config(),
        gw,
        candidates=3,
        guesses_per_candidate=1,
    )
    jury_calls = [r for r in backend.served if "fill-in-the-blank" in r.messages[0].content]
    assert len(jury_calls) == 1  # one unique candidate -> one jury guess


def test_guess_prompts_never_leak_hidden_word():
    candidates = {"0": '{"text": "zymurgy", "emoji": "🍺"}'}
    guesses = {"🍺": ["brewing"]}
    gw, backend = gateway_for(multishot_rules(candidates, guesses))
    item = ClozeItem(
        sample_id="s1",
        text="The zymurgy lesson was long.",
        span=(4, 11),
        hidden_surface="zymurgy",
        condition="baseline",
    )
    translate_multishot(
        MarkedText.from_marked("The <zymurgy> lesson was long."),
        item,
        config(),
        gw,
        candidates=1,
        guesses_per_candidate=1,
    )
    for request in backend.served:
        if "fill-in-the-blank" in request.messages[0].content:
            assert "zymurgy" not in request.messages[-1].content

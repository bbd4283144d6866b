"""Command-line pipeline: corpus-build, translate, evaluate, score, report, serve.

Every stage is resumable (items already present in its output are skipped),
writes a manifest next to its output (config digest, seeds, cache statistics),
and `emojinize replay <command> ...` re-runs any stage against the response
cache with the network disabled.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import zlib
from dataclasses import replace
from pathlib import Path

from . import cloze as cloze_mod
from . import corpus as corpus_mod
from . import stats as stats_mod
from . import translator as translator_mod
from .cloze import CONDITIONS, GuessConfig, TranslationEntry
from .config import ConfigInvalid, PipelineConfig
from .corpus import CorpusConfig, LexiconPosTagger, LlmPosTagger, build_corpus, load_corpus, load_stopwords
from .emojitext import parse_emoji_sequence
from .gateway import Gateway
from .translator import MarkedText, TranslatorConfig, load_demonstrations

TRANSLATE_MODES = ("single", "batch", "mwe", "multishot")
MODE_CONDITION = {
    "single": "emojinize",
    "batch": "emojinize_batch",
    "mwe": "emojinize_mwe",
    "multishot": "emojinize_multishot",
}


class MissingStageInput(RuntimeError):
    pass


def write_manifest(out_path: Path, command: str, config: PipelineConfig, **extra) -> None:
    manifest = {"command": command, "config_digest": config.digest(), **extra}
    Path(str(out_path) + ".manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=1) + "\n", "utf-8"
    )


def require(path: str | Path, what: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise MissingStageInput(f"{what} not found: {path}")
    return path


def translator_config(config: PipelineConfig) -> TranslatorConfig:
    t = config.translator
    demos = load_demonstrations(t.demonstrations) if t.demonstrations else load_demonstrations()
    return TranslatorConfig(
        language=t.language,
        model=config.model("translator"),
        temperature=t.temperature,
        max_resamples=t.max_resamples,
        candidate_temperature=t.candidate_temperature,
        demonstrations=demos,
    )


def guess_config(config: PipelineConfig, role: str = "participant") -> GuessConfig:
    return GuessConfig(
        model=config.model(role),
        temperature=config.evaluation.guess_temperature,
        max_resamples=config.evaluation.max_resamples,
    )


def load_translations_file(path: str | Path) -> dict[str, TranslationEntry]:
    entries: dict[str, TranslationEntry] = {}
    for line in Path(path).read_text("utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        span = tuple(obj["span"]) if "span" in obj else None
        entries[str(obj["sample_id"])] = TranslationEntry(
            sample_id=str(obj["sample_id"]),
            emoji=parse_emoji_sequence(obj["emoji"]),
            span=span,
            surface=obj.get("surface"),
        )
    return entries


def append_jsonl(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


def read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text("utf-8").splitlines() if line.strip()]


# --- corpus-build --------------------------------------------------------------


def cmd_corpus_build(args, config: PipelineConfig) -> int:
    c = config.corpus
    gateway = None
    if not c.skip_quality_filter or c.tagger == "llm":
        gateway = config.build_gateway(replay=args.replay)
    tagger = None
    if c.tagger == "lexicon" or gateway is None:
        tagger = LexiconPosTagger()
    else:
        tagger = LlmPosTagger(gateway, config.model("filter"))
    corpus_config = CorpusConfig(
        news_dir=c.news_dir,
        ebook_dir=c.ebook_dir,
        count_news=c.count_news,
        count_ebook=c.count_ebook,
        seed=c.seed,
        min_tokens=c.min_tokens,
        max_tokens=c.max_tokens,
        profanity_path=c.profanity_path,
        stopwords_path=c.stopwords_path,
        quality_model=config.model("filter"),
        skip_quality_filter=c.skip_quality_filter,
    )
    out = Path(args.out)
    cache_before = len(gateway.cache) if gateway else 0
    manifest, entries = build_corpus(corpus_config, gateway=gateway, tagger=tagger, out_path=out)
    write_manifest(
        out,
        "corpus-build",
        config,
        seed=c.seed,
        counts=manifest["counts"],
        cache={"before": cache_before, "after": len(gateway.cache) if gateway else 0},
    )
    print(f"corpus: {len(entries)} samples -> {out}")
    return 0


# --- translate -------------------------------------------------------------------


def _batch_spans(entry: dict, count: int, seed: int) -> MarkedText:
    """The corpus target plus up to count-1 extra eligible words, seeded."""
    text = entry["text"]
    target = entry["target"]
    target_span = (target["start"], target["end"])
    if count <= 1:
        return MarkedText(text=text, spans=(target_span,))
    eligible = corpus_mod.eligible_targets(text, LexiconPosTagger(), load_stopwords())
    extra = [span for span, _, _ in eligible if span != target_span]
    rng = random.Random(seed ^ zlib.crc32(entry["id"].encode()))
    rng.shuffle(extra)
    chosen = [target_span]
    for span in extra:
        if len(chosen) >= count:
            break
        if all(span[1] <= s or span[0] >= e for s, e in chosen):
            chosen.append(span)
    return MarkedText(text=text, spans=tuple(sorted(chosen)))


def cmd_translate(args, config: PipelineConfig) -> int:
    _, entries = load_corpus(require(args.corpus, "corpus"))
    gateway = config.build_gateway(replay=args.replay)
    tconfig = translator_config(config)
    out = Path(args.out)
    done = {obj["sample_id"] for obj in read_jsonl(out)}
    cache_before = len(gateway.cache)

    written = errors = 0
    for entry in entries:
        if entry["id"] in done:
            continue
        try:
            record = _translate_entry(entry, args.mode, config, tconfig, gateway)
        except Exception as exc:  # per-item failure: record and continue
            append_jsonl(out, {"sample_id": entry["id"], "mode": args.mode, "error": f"{type(exc).__name__}: {exc}"})
            errors += 1
            continue
        append_jsonl(out, record)
        written += 1

    write_manifest(
        out,
        f"translate:{args.mode}",
        config,
        seed=config.corpus.seed,
        written=written,
        errors=errors,
        skipped=len(done),
        cache={"before": cache_before, "after": len(gateway.cache)},
    )
    print(f"translate[{args.mode}]: {written} new, {len(done)} skipped, {errors} errors -> {out}")
    return 0


def _translate_entry(
    entry: dict, mode: str, config: PipelineConfig, tconfig: TranslatorConfig, gateway: Gateway
) -> dict:
    text = entry["text"]
    target = entry["target"]
    target_span = (target["start"], target["end"])

    if mode == "single":
        marked = MarkedText(text=text, spans=(target_span,))
        result = translator_mod.translate(marked, tconfig, gateway)
        return {
            "sample_id": entry["id"],
            "mode": mode,
            "emoji": str(result.sequences[0]),
            "resamples": result.resamples_used,
        }

    if mode == "batch":
        marked = _batch_spans(entry, config.translator.batch_spans, config.corpus.seed)
        result = translator_mod.translate_batch(marked, tconfig, gateway)
        target_index = marked.spans.index(target_span)
        return {
            "sample_id": entry["id"],
            "mode": mode,
            "emoji": str(result.sequences[target_index]),
            "spans": [
                {"start": s, "end": e, "surface": text[s:e], "emoji": str(seq)}
                for (s, e), seq in zip(marked.spans, result.sequences)
            ],
            "resamples": result.resamples_used,
        }

    if mode == "mwe":
        unit_spans = translator_mod.identify_units(text, tconfig, gateway)
        marked = MarkedText(text=text, spans=tuple(unit_spans))
        result = translator_mod.translate_batch(marked, tconfig, gateway)
        chosen = next(
            (i for i, (s, e) in enumerate(marked.spans) if s <= target_span[0] < e),
            0,
        )
        span = marked.spans[chosen]
        return {
            "sample_id": entry["id"],
            "mode": mode,
            "emoji": str(result.sequences[chosen]),
            "span": list(span),
            "surface": text[span[0] : span[1]],
            "units": [
                {"start": s, "end": e, "surface": text[s:e], "emoji": str(seq)}
                for (s, e), seq in zip(marked.spans, result.sequences)
            ],
            "resamples": result.resamples_used,
        }

    if mode == "multishot":
        marked = MarkedText(text=text, spans=(target_span,))
        item = cloze_mod.ClozeItem(
            sample_id=entry["id"],
            text=text,
            span=target_span,
            hidden_surface=target["surface"],
            condition="baseline",
            hint=None,
        )
        out = translator_mod.translate_multishot(
            marked,
            item,
            tconfig,
            gateway,
            guess_config=guess_config(config),
            candidates=config.translator.candidates,
            guesses_per_candidate=config.translator.guesses_per_candidate,
        )
        return {
            "sample_id": entry["id"],
            "mode": mode,
            "emoji": str(out.result.sequences[0]),
            "utility": out.utility,
            "candidates": [[emoji, utility] for emoji, utility in out.candidates],
            "resamples": out.result.resamples_used,
        }

    raise ConfigInvalid(f"unknown translate mode {mode!r}")


# --- evaluate ----------------------------------------------------------------------


def parse_condition_arg(value: str) -> tuple[str, str | None]:
    name, _, path = value.partition("=")
    if name not in CONDITIONS:
        raise ConfigInvalid(f"unknown condition {name!r} (known: {', '.join(CONDITIONS)})")
    return name, path or None


def cmd_evaluate(args, config: PipelineConfig) -> int:
    _, entries = load_corpus(require(args.corpus, "corpus"))
    gateway = config.build_gateway(replay=args.replay)
    records_path = Path(args.records)
    cache_before = len(gateway.cache)

    total = 0
    for value in args.condition:
        condition, translations_path = parse_condition_arg(value)
        translations = None
        if condition != "baseline":
            if translations_path is None:
                raise MissingStageInput(f"condition {condition} needs =<translations.jsonl>")
            translations = load_translations_file(require(translations_path, "translations"))
        records = cloze_mod.run_condition(
            entries,
            condition,
            gateway,
            guess_config(config),
            translations=translations,
            records_path=records_path,
            participant_id=args.participant_id,
        )
        total += len(records)

    write_manifest(
        records_path,
        "evaluate",
        config,
        conditions=[parse_condition_arg(v)[0] for v in args.condition],
        new_records=total,
        cache={"before": cache_before, "after": len(gateway.cache)},
    )
    print(f"evaluate: {total} new records -> {records_path}")
    return 0


# --- score (human records) -----------------------------------------------------------


def cmd_score(args, config: PipelineConfig) -> int:
    _, entries = load_corpus(require(args.corpus, "corpus"))
    by_id = {e["id"]: e for e in entries}
    translations_by_condition: dict[str, dict[str, TranslationEntry]] = {}
    for value in args.translations or []:
        condition, path = parse_condition_arg(value)
        if path:
            translations_by_condition[condition] = load_translations_file(require(path, "translations"))

    gateway = config.build_gateway(replay=args.replay)
    gconfig = guess_config(config, role="scorer")
    records_path = require(args.records, "records")
    rows = read_jsonl(records_path)
    scored = 0
    for row in rows:
        if row.get("scored_by") != "pending":
            continue
        entry = by_id.get(row["item_id"])
        if entry is None:
            row["scored_by"] = "error"
            row["error"] = "unknown item"
            continue
        surface = entry["target"]["surface"]
        override = translations_by_condition.get(row["condition"], {}).get(row["item_id"])
        if override is not None and override.span is not None:
            surface = override.surface or entry["text"][override.span[0] : override.span[1]]
        matched, scored_by, flags = cloze_mod.match_guess_detail(row["guess"], surface, gateway, gconfig)
        row["matched"] = matched
        row["scored_by"] = scored_by
        if flags:
            row["flags"] = list(flags)
        scored += 1

    tmp = records_path.with_suffix(".tmp")
    tmp.write_text(
        "".join(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n" for row in rows), "utf-8"
    )
    tmp.replace(records_path)
    write_manifest(records_path, "score", config, scored=scored)
    print(f"score: {scored} records scored in place -> {records_path}")
    return 0


# --- report -----------------------------------------------------------------------------


def cmd_report(args, config: PipelineConfig) -> int:
    records: list[dict] = []
    for path in args.records:
        records.extend(read_jsonl(require(path, "records")))

    scored = [r for r in records if r.get("scored_by") in ("exact", "llm")]
    errored = [r for r in records if r.get("scored_by") == "error" or r.get("error")]
    pending = [r for r in records if r.get("scored_by") == "pending"]

    conditions: dict[str, dict] = {}
    by_participant: dict[str, dict[str, dict]] = {}
    for condition in CONDITIONS:
        rows = [r for r in scored if r["condition"] == condition]
        if rows:
            conditions[condition] = stats_mod.accuracy([r["matched"] for r in rows]).to_json()
        for kind in ("human", "llm"):
            krows = [r for r in rows if r["participant_kind"] == kind]
            if krows:
                by_participant.setdefault(kind, {})[condition] = stats_mod.accuracy(
                    [r["matched"] for r in krows]
                ).to_json()

    translations_report: dict[str, dict] = {}
    for value in args.translations or []:
        name, _, path = value.partition("=")
        if not path:
            raise ConfigInvalid("--translations expects name=path")
        entries = load_translations_file(require(path, "translations"))
        sequences = [t.emoji for t in entries.values()]
        block: dict = {"count": len(sequences)}
        if sequences:
            block["usage"] = stats_mod.emoji_usage_stats(sequences).to_json()
        if len(sequences) >= 2:
            block["length"] = stats_mod.mean_length(
                sequences,
                bootstrap_resamples=config.evaluation.bootstrap_resamples,
                seed=config.evaluation.seed,
            ).to_json()
        translations_report[name] = block

    # human-vs-LLM phi over (item, condition) cells both kinds answered
    outcomes: dict[tuple[str, str], dict[str, bool]] = {}
    for row in scored:
        outcomes.setdefault((row["item_id"], row["condition"]), {})[row["participant_kind"]] = row["matched"]
    pairs = [(v["human"], v["llm"]) for v in outcomes.values() if "human" in v and "llm" in v]
    try:
        phi = stats_mod.correlation(pairs) if len(pairs) >= 2 else None
    except stats_mod.StatsError:
        phi = None

    report = {
        "conditions": conditions,
        "by_participant": by_participant,
        "translations": translations_report,
        "correlation_human_llm": round(phi, 6) if phi is not None else None,
        "paired_items": len(pairs),
        "counts": {
            "records": len(records),
            "scored": len(scored),
            "errored": len(errored),
            "pending": len(pending),
        },
        "series": {
            "accuracy_bars": [
                {"condition": c, **conditions[c]} for c in CONDITIONS if c in conditions
            ]
        },
    }

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report, ensure_ascii=False, sort_keys=True, indent=1) + "\n", "utf-8")

    if args.csv:
        csv_path = Path(args.csv)
        with csv_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["item_id", "condition", "participant_kind", "participant_id", "guess", "matched", "scored_by"])
            for row in sorted(scored, key=lambda r: (r["condition"], r["item_id"], r["participant_id"])):
                writer.writerow(
                    [row["item_id"], row["condition"], row["participant_kind"], row["participant_id"], row["guess"], int(row["matched"]), row["scored_by"]]
                )

    write_manifest(out, "report", config, records=len(records), seed=config.evaluation.seed)
    print(f"report: {len(conditions)} conditions -> {out}")
    return 0


# --- serve ------------------------------------------------------------------------------


def cmd_serve(args, config: PipelineConfig) -> int:
    from .service import StudyService, create_app

    _, entries = load_corpus(require(args.corpus, "corpus"))
    translations = None
    if args.translations_file:
        translations = load_translations_file(require(args.translations_file, "translations"))
    service = StudyService(
        corpus_entries=entries,
        state_dir=args.state_dir,
        translations=translations,
        cloze_condition=args.cloze_condition,
        batch_size=args.batch_size,
    )
    app = create_app(service, ui_dir=args.ui)
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emojinize", description=__doc__)
    parser.add_argument("--config", help="pipeline config JSON", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("corpus-build", help="ingest sources, clean, select targets")
    p.add_argument("--out", required=True)

    p = sub.add_parser("translate", help="translate corpus targets to emoji")
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", choices=TRANSLATE_MODES, default="single")
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="run LLM participants over conditions")
    p.add_argument("--corpus", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--condition", action="append", required=True, metavar="NAME[=translations.jsonl]")
    p.add_argument("--participant-id", default="llm-0")

    p = sub.add_parser("score", help="score pending (human) guess records")
    p.add_argument("--corpus", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--translations", action="append", metavar="CONDITION=path.jsonl")

    p = sub.add_parser("report", help="aggregate records into the summary report")
    p.add_argument("--records", action="append", required=True)
    p.add_argument("--translations", action="append", metavar="NAME=path.jsonl")
    p.add_argument("--out", required=True)
    p.add_argument("--csv", default=None)

    p = sub.add_parser("serve", help="run the human-study HTTP service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--state-dir", required=True)
    p.add_argument("--translations-file", default=None)
    p.add_argument("--cloze-condition", default="emojinize")
    p.add_argument("--batch-size", type=int, default=10)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", default=None, help="static UI bundle directory")

    p = sub.add_parser("replay", help="re-run any command in cache-only mode")
    p.add_argument("rest", nargs=argparse.REMAINDER)

    return parser


HANDLERS = {
    "corpus-build": cmd_corpus_build,
    "translate": cmd_translate,
    "evaluate": cmd_evaluate,
    "score": cmd_score,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None, replay: bool = False) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "replay":
        rest = [a for a in args.rest if a != "--"]
        if args.config is not None:
            rest = ["--config", args.config, *rest]
        return main(rest, replay=True)

    args.replay = replay
    try:
        config = PipelineConfig.load(args.config)
        return HANDLERS[args.command](args, config)
    except (ConfigInvalid, MissingStageInput) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    except Exception as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

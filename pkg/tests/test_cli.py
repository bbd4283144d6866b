from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

from emojinize.config import ConfigInvalid, PipelineConfig
from tests.conftest import FIXTURES, fixture_config, run_cli, run_fixture_pipeline


def read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]


# --- config ------------------------------------------------------------------


def test_config_defaults_and_digest():
    config = PipelineConfig.from_json({})
    assert config.gateway.backend == "scripted"
    assert config.digest() == PipelineConfig.from_json({}).digest()


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigInvalid):
        PipelineConfig.from_json({"gateway": {"no_such_key": 1}})


def test_config_rejects_unknown_backend():
    with pytest.raises(ConfigInvalid):
        PipelineConfig.from_json({"gateway": {"backend": "telepathy"}})


def test_config_env_overrides(monkeypatch):
    monkeypatch.setenv("EMOJINIZE_API_KEY", "sk-test")
    monkeypatch.setenv("EMOJINIZE_MODEL", "my-model")
    config = PipelineConfig.from_json({"gateway": {"backend": "http"}})
    assert "sk-test" in config.gateway.api_keys
    assert set(config.gateway.models.values()) == {"my-model"}


def test_cli_error_is_machine_readable(tmp_path, capsys):
    code = run_cli("--config", str(tmp_path / "missing.json"), "corpus-build", "--out", str(tmp_path / "c"))
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigInvalid"


def test_cli_missing_stage_input(tmp_path, capsys):
    config = fixture_config(tmp_path)
    code = run_cli("--config", str(config), "translate", "--corpus", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "t"))
    assert code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "MissingStageInput"


# --- stages -------------------------------------------------------------------


def test_pipeline_produces_expected_outputs(pipeline_paths):
    corpus = read_jsonl(pipeline_paths["corpus"])
    assert len(corpus) == 21  # manifest + 20 entries
    report = json.loads(pipeline_paths["report"].read_text())
    assert set(report["conditions"]) == {"baseline", "human_translation", "emojinize"}
    assert pipeline_paths["csv"].exists()


def test_pipeline_report_ordering(pipeline_paths):
    report = json.loads(pipeline_paths["report"].read_text())
    conditions = report["conditions"]
    assert (
        conditions["emojinize"]["accuracy"]
        > conditions["human_translation"]["accuracy"]
        > conditions["baseline"]["accuracy"]
    )


def test_manifests_carry_config_digest(pipeline_paths):
    config = PipelineConfig.load(pipeline_paths["config"])
    for key in ("corpus", "single", "records", "report"):
        manifest = json.loads(Path(str(pipeline_paths[key]) + ".manifest.json").read_text())
        assert manifest["config_digest"] == config.digest()


def test_translate_resumes_without_duplicates(tmp_path):
    config = fixture_config(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    out = tmp_path / "trans.jsonl"
    run_cli("--config", str(config), "corpus-build", "--out", str(corpus))
    run_cli("--config", str(config), "translate", "--corpus", str(corpus), "--out", str(out))
    first = out.read_text()
    code = run_cli("--config", str(config), "translate", "--corpus", str(corpus), "--out", str(out))
    assert code == 0
    assert out.read_text() == first  # nothing re-appended


def test_evaluate_resumes_after_interruption(tmp_path):
    config = fixture_config(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    records = tmp_path / "records.jsonl"
    run_cli("--config", str(config), "corpus-build", "--out", str(corpus))
    run_cli("--config", str(config), "evaluate", "--corpus", str(corpus), "--records", str(records), "--condition", "baseline")
    rows = read_jsonl(records)
    # simulate an interrupted run: keep only the first 5 records
    records.write_text("".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in rows[:5]))
    run_cli("--config", str(config), "evaluate", "--corpus", str(corpus), "--records", str(records), "--condition", "baseline")
    resumed = read_jsonl(records)
    assert len(resumed) == len(rows)
    assert len({r["item_id"] for r in resumed}) == len(rows)


def test_evaluate_unknown_condition_rejected(tmp_path, capsys):
    config = fixture_config(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    run_cli("--config", str(config), "corpus-build", "--out", str(corpus))
    code = run_cli("--config", str(config), "evaluate", "--corpus", str(corpus), "--records", str(tmp_path / "r"), "--condition", "sideways")
    assert code == 2


def test_report_errored_records_excluded_from_trials(tmp_path):
    config = fixture_config(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    records = tmp_path / "records.jsonl"
    run_cli("--config", str(config), "corpus-build", "--out", str(corpus))
    # translations for all but one sample: the missing one becomes an error record
    entries = read_jsonl(corpus)[1:]
    translations = tmp_path / "partial.jsonl"
    translations.write_text(
        "".join(
            json.dumps({"sample_id": e["id"], "emoji": "🐈"}) + "\n" for e in entries[:-1]
        )
    )
    run_cli("--config", str(config), "evaluate", "--corpus", str(corpus), "--records", str(records), "--condition", f"emojinize={translations}")
    run_cli("--config", str(config), "report", "--records", str(records), "--out", str(tmp_path / "report.json"))
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["counts"]["errored"] == 1
    assert report["conditions"]["emojinize"]["trials"] == len(entries) - 1


def test_replay_subcommand_round_trip(tmp_path, capsys):
    paths = run_fixture_pipeline(tmp_path)
    replay_records = tmp_path / "replay_records.jsonl"
    code = run_cli(
        "--config", str(paths["config"]), "replay", "evaluate",
        "--corpus", str(paths["corpus"]), "--records", str(replay_records),
        "--condition", "baseline",
        "--condition", f"emojinize={paths['single']}",
    )
    assert code == 0
    rows = read_jsonl(replay_records)
    assert all(not r.get("error") for r in rows)
    original = [r for r in read_jsonl(paths["records"]) if r["condition"] in ("baseline", "emojinize")]
    assert sorted((r["item_id"], r["condition"], r["matched"]) for r in rows) == sorted(
        (r["item_id"], r["condition"], r["matched"]) for r in original
    )


def test_score_command_scores_pending_records(tmp_path):
    config = fixture_config(tmp_path)
    corpus = tmp_path / "corpus.jsonl"
    run_cli("--config", str(config), "corpus-build", "--out", str(corpus))
    entries = read_jsonl(corpus)[1:]
    records = tmp_path / "human_records.jsonl"
    surface = entries[0]["target"]["surface"]
    records.write_text(
        json.dumps(
            {
                "item_id": entries[0]["id"],
                "condition": "baseline",
                "participant_kind": "human",
                "participant_id": "h-1",
                "guess": surface.upper(),
                "matched": False,
                "scored_by": "pending",
            }
        )
        + "\n"
    )
    assert run_cli("--config", str(config), "score", "--corpus", str(corpus), "--records", str(records)) == 0
    row = read_jsonl(records)[0]
    assert row["matched"] is True and row["scored_by"] == "exact"


def test_cache_keys_collision_free_over_fixture_run(pipeline_paths):
    # every distinct request in a full pipeline run maps to a distinct key
    cache = Path(str(pipeline_paths["config"])).parent / "cache.jsonl"
    rows = read_jsonl(cache)
    keys = [r["key"] for r in rows]
    assert len(keys) == len(set(keys))
    requests = [json.dumps(r["request"], sort_keys=True) for r in rows]
    assert len(set(requests)) == len(keys)  # distinct requests, distinct keys
    assert len(keys) > 100

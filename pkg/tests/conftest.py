from __future__ import annotations

import json
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def fixture_config(workdir: Path) -> Path:
    """The fixture pipeline config with absolute paths, cache under workdir."""
    config = json.loads((FIXTURES / "config.json").read_text("utf-8"))
    config["gateway"]["script"] = str(FIXTURES / "script.json")
    config["gateway"]["cache"] = str(workdir / "cache.jsonl")
    config["corpus"]["news_dir"] = str(FIXTURES / "sources" / "news")
    config["corpus"]["ebook_dir"] = str(FIXTURES / "sources" / "ebooks")
    config["workdir"] = str(workdir)
    path = workdir / "config.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(config, indent=1), "utf-8")
    return path


def run_cli(*argv: str) -> int:
    from emojinize.cli import main

    return main(list(argv))


def run_fixture_pipeline(workdir: Path, conditions: tuple[str, ...] = ()) -> dict[str, Path]:
    """build -> translate (all modes) -> evaluate -> report, scripted backend."""
    config = fixture_config(workdir)
    paths = {
        "config": config,
        "corpus": workdir / "corpus.jsonl",
        "records": workdir / "records.jsonl",
        "report": workdir / "report.json",
        "csv": workdir / "report.csv",
    }
    for mode in ("single", "batch", "mwe", "multishot"):
        paths[mode] = workdir / f"trans_{mode}.jsonl"

    assert run_cli("--config", str(config), "corpus-build", "--out", str(paths["corpus"])) == 0
    for mode in ("single", "batch", "mwe", "multishot"):
        assert (
            run_cli(
                "--config", str(config), "translate",
                "--corpus", str(paths["corpus"]), "--mode", mode, "--out", str(paths[mode]),
            )
            == 0
        )
    condition_args = conditions or (
        "baseline",
        f"human_translation={FIXTURES / 'human_translations.jsonl'}",
        f"emojinize={paths['single']}",
    )
    evaluate = ["--config", str(config), "evaluate", "--corpus", str(paths["corpus"]), "--records", str(paths["records"])]
    for value in condition_args:
        evaluate += ["--condition", value]
    assert run_cli(*evaluate) == 0
    assert (
        run_cli(
            "--config", str(config), "report",
            "--records", str(paths["records"]),
            "--translations", f"human={FIXTURES / 'human_translations.jsonl'}",
            "--translations", f"emojinize={paths['single']}",
            "--out", str(paths["report"]), "--csv", str(paths["csv"]),
        )
        == 0
    )
    return paths


@pytest.fixture()
def pipeline_paths(tmp_path):
    return run_fixture_pipeline(tmp_path)

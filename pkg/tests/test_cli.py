import json
import subprocess
import sys

import pytest

from reviewgram.cli import main
from reviewgram.corpus import ingest_csv, ingest_jsonl
from reviewgram.report import CONFIG_ENV_VAR

from conftest import GOLDEN


def _analyze(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main(["analyze", "--out", str(out), *args])
    return code, out


class TestAnalyze:
    def test_matches_golden(self, tmp_path, fixture_csv):
        code, out = _analyze(tmp_path, "--input", str(fixture_csv), "--threads", "2")
        assert code == 0
        assert (out / "report.json").read_bytes() == (GOLDEN / "report.json").read_bytes()
        assert (out / "report.md").read_bytes() == (GOLDEN / "report.md").read_bytes()

    def test_csv_and_jsonl_give_identical_reports(self, tmp_path, fixture_csv, fixture_jsonl):
        _, a = _analyze(tmp_path, "--input", str(fixture_csv), name="a")
        _, b = _analyze(tmp_path, "--input", str(fixture_jsonl), name="b")
        assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()

    def test_emit_json_only(self, tmp_path, fixture_csv):
        code, out = _analyze(tmp_path, "--input", str(fixture_csv), "--emit", "json")
        assert code == 0
        assert sorted(p.name for p in out.iterdir()) == ["report.json"]

    def test_overrides_reach_the_report(self, tmp_path, fixture_csv):
        code, out = _analyze(tmp_path, "--input", str(fixture_csv), "--k", "5", "--min-count", "2", "--stemmer", "none")
        assert code == 0
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert report["config"]["k"] == 5
        assert report["config"]["pipeline"]["stemmer"] == "none"
        assert len(report["ngrams"]["Positive"]["bigrams"]) == 5
        assert ["friendly", "staff"] in [r["ngram"] for r in report["ngrams"]["Positive"]["bigrams"]]

    def test_config_file_via_env(self, tmp_path, fixture_csv, monkeypatch):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"inputs": [str(fixture_csv)], "k": 3, "emit": ["json"]}), encoding="utf-8")
        monkeypatch.setenv(CONFIG_ENV_VAR, str(cfg))
        code, out = _analyze(tmp_path)
        assert code == 0
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert report["config"]["k"] == 3

    def test_flag_beats_config_file(self, tmp_path, fixture_csv):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"inputs": [str(fixture_csv)], "k": 3}), encoding="utf-8")
        code, out = _analyze(tmp_path, "--config", str(cfg), "--k", "4")
        assert code == 0
        assert json.loads((out / "report.json").read_text(encoding="utf-8"))["config"]["k"] == 4


class TestExitCodes:
    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["analyze", "--k", "0", "--input", "x.csv"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_input_flag(self, tmp_path, monkeypatch):
        monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
        with pytest.raises(SystemExit) as exc:
            _analyze(tmp_path)
        assert exc.value.code == 2

    def test_io_error(self, tmp_path, capsys):
        code, _ = _analyze(tmp_path, "--input", str(tmp_path / "missing.csv"))
        assert code == 3
        assert "[ingest]" in capsys.readouterr().err

    def test_empty_corpus(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("review_id,rating,text\na,9,nope\n", encoding="utf-8")
        code, _ = _analyze(tmp_path, "--input", str(bad))
        assert code == 4

    def test_config_error(self, tmp_path, fixture_csv):
        mapping = tmp_path / "m.json"
        mapping.write_text('{"Staff": "Synergy"}', encoding="utf-8")
        code, _ = _analyze(tmp_path, "--input", str(fixture_csv), "--map", str(mapping))
        assert code == 5
        cfg = tmp_path / "c.json"
        cfg.write_text("[]", encoding="utf-8")
        code, _ = _analyze(tmp_path, "--input", str(fixture_csv), "--config", str(cfg))
        assert code == 5


class TestDegenerateInputs:
    @pytest.mark.parametrize(
        "rows",
        [
            [("a", 3, "It was fine."), ("b", 3, "Nothing special.")],
            [("solo", 4, "Great pilot.")],
            [("a", 5, "The the the."), ("b", 1, "Was it?")],
        ],
        ids=["all-neutral", "single-review", "all-stop-words"],
    )
    def test_exit_zero_with_complete_report(self, tmp_path, rows):
        path = tmp_path / "in.csv"
        path.write_text("review_id,rating,text\n" + "".join(f"{i},{r},{t}\n" for i, r, t in rows), encoding="utf-8")
        code, out = _analyze(tmp_path, "--input", str(path))
        assert code == 0
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert set(report) == {"caveats", "config", "corpus", "input_digest", "ngrams", "seven_s", "tool", "topics"}
        assert len(report["seven_s"]["elements"]) == 7
        assert "## 7S Assessment" in (out / "report.md").read_text(encoding="utf-8")


def test_ngrams_verb(fixture_csv, capsys):
    assert main(["ngrams", "--input", str(fixture_csv), "--n", "2", "--k", "3", "--segment", "Negative"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "segment\tngram\tcount\tcond_prob"
    assert len(lines) == 4
    assert all(line.startswith("Negative\t") for line in lines[1:])
    assert "long wait" in [line.split("\t")[1] for line in lines[1:]]


def test_gen_fixture_verb(tmp_path, fixture_csv, fixture_jsonl):
    assert main(["gen-fixture", "--out", str(tmp_path / "f.csv")]) == 0
    assert main(["gen-fixture", "--out", str(tmp_path / "f.jsonl")]) == 0
    assert (tmp_path / "f.csv").read_bytes() == fixture_csv.read_bytes()
    assert (tmp_path / "f.jsonl").read_bytes() == fixture_jsonl.read_bytes()
    assert main(["gen-fixture", "--out", str(tmp_path / "g.csv"), "--seed", "8"]) == 0
    assert ingest_csv(tmp_path / "g.csv") != ingest_jsonl(fixture_jsonl)


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "reviewgram", "gen-fixture", "--out", str(tmp_path / "x.csv")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr

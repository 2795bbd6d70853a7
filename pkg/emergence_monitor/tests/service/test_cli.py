import json
import os

import pytest

from emergence_monitor.src.cli import main
from emergence_monitor.src.corpus import read_documents


@pytest.fixture
def config_file(tmp_path, small_config):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(small_config), encoding="utf-8")
    return str(path)


def error_of(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


class TestCli:
    """Tests for the command line entry point."""

    def test_synth(self, tmp_path, capsys):
        out = tmp_path / "corpus.jsonl"
        assert main(["-q", "synth", "--config", "synth_small", "--out", str(out), "--seed", "11"]) == 0
        result = json.loads(capsys.readouterr().out)
        docs = read_documents(str(out))
        assert result["documents"] == len(docs) == 3 * 60
        with open(result["lexical_fields"], encoding="utf-8") as f:
            fields = json.load(f)
        assert fields["spec"]["seed"] == 11
        assert sorted(fields["lexical_fields"]) == ["cat00", "cat01", "cat02"]

    def test_synth_file_format(self, tmp_path):
        out = tmp_path / "corpus.jsonl"
        assert main(["-q", "synth", "--config", "synth_small", "--out", str(out)]) == 0
        first = json.loads(out.read_text(encoding="utf-8").splitlines()[0])
        assert sorted(first) == ["category", "id", "text", "time_index"]

    def test_gold(self, config_file, tmp_path, capsys):
        assert main(["-q", "gold", "--config", config_file, "--output-dir", str(tmp_path / "gold")]) == 0
        result = json.loads(capsys.readouterr().out)
        assert os.path.exists(result["gold"])

    def test_run_with_overrides(self, config_file, tmp_path, capsys):
        out = tmp_path / "cli_run"
        code = main(["-q", "run", "--config", config_file, "--rates", "0.5,1.0", "--seeds", "0",
                     "--output-dir", str(out)])
        assert code == 0
        result = json.loads(capsys.readouterr().out)
        assert result["output_dir"] == str(out)
        assert [(s["category"], s["method"], s["rate"]) for s in result["summary"]] == [
            ("cat01", "correlation", 0.5), ("cat01", "tfidf", 0.5),
            ("cat01", "correlation", 1.0), ("cat01", "tfidf", 1.0),
            ("all", "correlation", 0.5), ("all", "tfidf", 0.5),
            ("all", "correlation", 1.0), ("all", "tfidf", 1.0),
        ]
        assert os.path.exists(out / "reports" / "cat01" / "report_rate_1_n3.json")

        assert main(["-q", "plotdata", str(out), "--words", "cat01w000"]) == 0
        paths = json.loads(capsys.readouterr().out)
        assert os.path.exists(paths["series"])

    def test_run_several_categories(self, config_file, tmp_path, capsys):
        out = tmp_path / "cli_categories"
        code = main(["-q", "run", "--config", config_file, "--category", "cat01, cat02", "--seeds", "0",
                     "--output-dir", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)["summary"]
        assert [s["category"] for s in summary if s["method"] == "correlation"] == ["cat01", "cat02", "all"]
        assert os.path.exists(out / "reports" / "cat02" / "report_rate_0.5_n3.json")

    def test_usage_error(self, capsys):
        assert main(["run"]) == 2
        error = error_of(capsys)
        assert error["type"] == "CliArgumentError"
        assert "--config" in error["error"]

    def test_invalid_choice(self, capsys):
        assert main(["run", "--config", "synth_small", "--model", "glove"]) == 2
        assert error_of(capsys)["type"] == "CliArgumentError"

    def test_missing_configuration(self, capsys):
        assert main(["-q", "gold", "--config", "does_not_exist"]) == 1
        error = error_of(capsys)
        assert error["type"] == "FileNotFoundError"
        assert error["context"] == {}

    def test_invalid_override(self, config_file, capsys):
        assert main(["-q", "run", "--config", config_file, "--rates", "-1"]) == 1
        assert error_of(capsys)["type"] == "ValueError"

    def test_unknown_category(self, config_file, capsys):
        assert main(["-q", "run", "--config", config_file, "--category", "cat09"]) == 1
        error = error_of(capsys)
        assert error["type"] == "ValueError"
        assert "cat09" in error["error"]

    def test_plotdata_on_empty_directory(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        assert main(["-q", "plotdata", str(tmp_path / "empty")]) == 1
        assert error_of(capsys)["type"] == "ValueError"

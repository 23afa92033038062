import json
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from reltraj.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def fixture_config(tmp_path):
    """Config over the checked-in fixture corpus."""
    text = f"""
[paths]
documents = "{FIXTURES / 'docs'}"
annotations = "{FIXTURES / 'annotations' / 'full.jsonl'}"
connotation = "{FIXTURES / 'lexicons' / 'connotation.tsv'}"
sentiment = "{FIXTURES / 'lexicons' / 'sentiment.tsv'}"
prior_polarity = "{FIXTURES / 'lexicons' / 'prior_polarity.tsv'}"
model = "{tmp_path / 'model.json'}"
report = "{tmp_path / 'report.json'}"
sequences = "{tmp_path / 'sequences.json'}"
predictions = "{tmp_path / 'predictions.json'}"

[model]
outer_iterations = 1
perceptron_epochs = 25
seed = 0
"""
    path = tmp_path / "config.toml"
    path.write_text(text)
    return path


@pytest.fixture()
def synth_dir(tmp_path, runner):
    """A small generated corpus with its own ready-made config."""
    out = tmp_path / "synth"
    spec_config = tmp_path / "genconfig.toml"
    spec_config.write_text("""
[generator]
num_sequences = 12
noise = 0.2
seed = 0
""")
    result = runner.invoke(main, ["synth", "--config", str(spec_config),
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    return out


class TestExtract:
    def test_fixture_corpus(self, runner, fixture_config, tmp_path):
        result = runner.invoke(main, ["extract", "--config", str(fixture_config)])
        assert result.exit_code == 0, result.output
        payload = json.loads((tmp_path / "sequences.json").read_text())
        assert payload["documents"] == 1
        assert payload["sequences"] == [
            {"doc_id": "tomsawyer-fixture", "pair": [1, 2], "length": 10,
             "doc_positions": list(range(10))}
        ]
        assert payload["config"]["min_cooccurrence"] == 5

    def test_threshold_flag_is_monotone(self, runner, fixture_config, tmp_path):
        result = runner.invoke(main, ["extract", "--config", str(fixture_config),
                                      "--min-cooccur", "2"])
        assert result.exit_code == 0
        more = json.loads((tmp_path / "sequences.json").read_text())["sequences"]
        assert {tuple(s["pair"]) for s in more} == {(1, 2), (1, 3), (2, 3)}

    def test_empty_corpus_dir_errors(self, runner, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        config = tmp_path / "c.toml"
        config.write_text(f'[paths]\ndocuments = "{empty}"\n')
        result = runner.invoke(main, ["extract", "--config", str(config)])
        assert result.exit_code == 1
        err = json.loads(result.output.strip().splitlines()[-1])
        assert "no documents found" in err["message"]

    def test_features_dump(self, runner, fixture_config, tmp_path):
        dump = tmp_path / "features.tsv"
        result = runner.invoke(main, ["extract", "--config", str(fixture_config),
                                      "--features-dump", str(dump)])
        assert result.exit_code == 0
        lines = dump.read_text().strip().splitlines()
        assert lines[0].split("\t")[:3] == ["doc_id", "pair", "seq_index"]
        assert len(lines) == 1 + 10  # header + one row per sentence


class TestTrainPredictEvaluate:
    def test_train_then_predict_then_evaluate(self, runner, fixture_config, tmp_path):
        result = runner.invoke(main, ["train", "--config", str(fixture_config)])
        assert result.exit_code == 0, result.output
        model = json.loads((tmp_path / "model.json").read_text())
        assert model["format_version"] == 1
        assert len(model["weights"]) == 80

        result = runner.invoke(main, ["predict", "--config", str(fixture_config)])
        assert result.exit_code == 0, result.output
        preds = json.loads((tmp_path / "predictions.json").read_text())
        assert len(preds["predictions"]) == 1
        pred = preds["predictions"][0]
        assert set(pred["states"]) <= {1, -1}
        assert len(pred["states"]) == 10

        result = runner.invoke(main, ["evaluate", "--config", str(fixture_config)])
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "report.json").read_text())
        # a single training sequence is fit perfectly by the perceptron
        assert report["summary"]["averaged_f1"] == 1.0
        assert report["summary"]["mean_edit_distance"] == 0.0

    def test_predict_without_model_errors(self, runner, fixture_config):
        result = runner.invoke(main, ["predict", "--config", str(fixture_config)])
        assert result.exit_code == 1

    def test_mismatched_model_version_errors(self, runner, fixture_config, tmp_path):
        runner.invoke(main, ["train", "--config", str(fixture_config)])
        model_path = tmp_path / "model.json"
        doc = json.loads(model_path.read_text())
        doc["format_version"] = 99
        model_path.write_text(json.dumps(doc))
        result = runner.invoke(main, ["predict", "--config", str(fixture_config)])
        assert result.exit_code == 1
        err = json.loads(result.output.strip().splitlines()[-1])
        assert err["error"] == "ModelFormatError"


class TestSynthAndCV:
    def test_synth_layout(self, synth_dir):
        assert (synth_dir / "config.toml").exists()
        assert (synth_dir / "annotations.jsonl").exists()
        docs = list((synth_dir / "documents").glob("*.json"))
        assert len(docs) == 12
        for name in ("connotation.tsv", "sentiment.tsv", "prior_polarity.tsv",
                     "frames.tsv", "stopwords.txt"):
            assert (synth_dir / "lexicons" / name).exists()

    def test_synth_deterministic(self, runner, tmp_path, synth_dir):
        out2 = tmp_path / "synth2"
        config = tmp_path / "genconfig.toml"  # written by the synth_dir fixture
        result = runner.invoke(main, ["synth", "--config", str(config),
                                      "--out", str(out2)])
        assert result.exit_code == 0
        a = sorted((synth_dir / "documents").glob("*.json"))
        b = sorted((out2 / "documents").glob("*.json"))
        assert [p.read_text() for p in a] == [p.read_text() for p in b]
        assert (synth_dir / "annotations.jsonl").read_text() == \
               (out2 / "annotations.jsonl").read_text()

    def test_cv_end_to_end_and_reproducible(self, runner, synth_dir, tmp_path):
        report1 = tmp_path / "r1.json"
        report2 = tmp_path / "r2.json"
        config = synth_dir / "config.toml"
        for report in (report1, report2):
            result = runner.invoke(main, ["cv", "--config", str(config),
                                          "--seed", "5",
                                          "--report", str(report)])
            assert result.exit_code == 0, result.output
        assert report1.read_bytes() == report2.read_bytes()
        payload = json.loads(report1.read_text())
        assert len(payload["per_fold"]) == 5
        assert 0.0 <= payload["summary"]["averaged_f1"] <= 1.0

    def test_cv_worker_count_does_not_change_bytes(self, runner, synth_dir, tmp_path):
        config = synth_dir / "config.toml"
        reports = []
        for workers in ("1", "2"):
            path = tmp_path / f"r{workers}.json"
            result = runner.invoke(main, ["cv", "--config", str(config),
                                          "--seed", "5", "--workers", workers,
                                          "--report", str(path)])
            assert result.exit_code == 0, result.output
            reports.append(path.read_bytes())
        assert reports[0] == reports[1]

import io
import json
import random

import pytest

from bnpolarity.cli import main, parse_config_file, resolve_config
from bnpolarity.corpus import LabeledCorpus, PolarityLabel, Review, load_corpus, save_corpus
from bnpolarity.errors import ConfigError
from bnpolarity.pipeline import Pipeline

POS, NEG = PolarityLabel.POSITIVE, PolarityLabel.NEGATIVE


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_corpus(path, pairs):
    save_corpus(LabeledCorpus(tuple(Review(t, y) for t, y in pairs)), path, "jsonl")
    return str(path)


@pytest.fixture
def synth_path(tmp_path, capsys):
    path = tmp_path / "synth.jsonl"
    assert run(capsys, "synth", "--num", "200", "--seed", "3", "--out", str(path))[0] == 0
    return str(path)


@pytest.fixture
def toy_model(tmp_path, capsys):
    corpus = write_corpus(tmp_path / "toy.jsonl", [("ভাল ভাল বই", POS), ("বাজে বই", NEG)])
    model = tmp_path / "toy" / "model.json"
    code, _, err = run(capsys, "train", "--corpus", corpus, "--split", "1,0,0", "--seed", "0", "--model", str(model))
    assert code == 0, err
    return str(model)


class TestConfig:
    def test_file_parsing(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment\ncorpus = a.jsonl\nseed=4\n\nlr.max_epochs = 20\n", encoding="utf-8")
        values = parse_config_file(path)
        assert values == {"corpus": "a.jsonl", "seed": "4", "lr.max_epochs": "20"}
        config = resolve_config(values)
        assert config.hyperparams.lr.max_epochs == 20
        assert config.hyperparams.sgd.seed == 4

    @pytest.mark.parametrize("values", [{"corpus": "a.jsonl"}, {"seed": "1", "bogus": "x"},
                                        {"seed": "1", "split": "0.5,0.5"}, {"seed": "1", "ngram": "4"},
                                        {"seed": "-1"}, {"seed": "1", "lr.nope": "1"}])
    def test_rejected(self, values):
        with pytest.raises(ConfigError):
            resolve_config(values)

    def test_hash_tracks_settings(self):
        a = resolve_config({"seed": "1"})
        assert a.config_hash == resolve_config({"seed": "1"}).config_hash
        assert a.config_hash != resolve_config({"seed": "2"}).config_hash


class TestStats:
    def test_empty_corpus(self, tmp_path, capsys):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        code, _, err = run(capsys, "stats", "--corpus", str(path))
        assert code == 2 and "empty corpus" in err

    def test_counts(self, synth_path, capsys):
        code, out, _ = run(capsys, "stats", "--corpus", synth_path)
        assert code == 0
        assert json.loads(out)["all"]["num_documents"] == 200

    def test_split_sizes(self, synth_path, capsys):
        code, out, _ = run(capsys, "stats", "--corpus", synth_path, "--split", "0.8,0.1,0.1", "--seed", "1")
        report = json.loads(out)
        assert [report[s]["num_documents"] for s in ("train", "valid", "test")] == [160, 20, 20]

    def test_malformed_line(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"text": "ভাল", "label": "positive"}\n{"text": "x"\n', encoding="utf-8")
        code, _, err = run(capsys, "stats", "--corpus", str(path))
        assert code == 2 and "line 2" in err


class TestSynth:
    def test_label_balance(self, tmp_path, capsys):
        path = tmp_path / "s.jsonl"
        assert run(capsys, "synth", "--num", "100", "--pos-frac", "0.5", "--seed", "7", "--out", str(path))[0] == 0
        assert sum(load_corpus(path).labels) == 50

    def test_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for p in (a, b):
            run(capsys, "synth", "--num", "50", "--seed", "9", "--out", str(p))
        assert a.read_bytes() == b.read_bytes()

    def test_overlapping_lexicons(self, tmp_path, capsys):
        lex = tmp_path / "lex.txt"
        lex.write_text("ভাল\n", encoding="utf-8")
        code, _, _ = run(capsys, "synth", "--num", "10", "--seed", "1", "--out", str(tmp_path / "o.jsonl"),
                         "--positive-lexicon", str(lex), "--negative-lexicon", str(lex))
        assert code == 2


class TestCv:
    def test_external_selection(self, tmp_path, synth_path, capsys):
        scores = tmp_path / "scores.json"
        scores.write_text(json.dumps({"LR": 0.83, "KNN": 0.58, "DT": 0.69, "RF": 0.73, "MNB": 0.88,
                                      "SVM": 0.81, "SGD": 0.77}), encoding="utf-8")
        code, out, _ = run(capsys, "cv", "--corpus", synth_path, "--seed", "0", "--kinds", "",
                           "--external-scores", str(scores), "--select")
        assert code == 0
        assert json.loads(out)["selection"]["1"]["models"] == ["MNB", "LR", "SVM", "SGD"]

    def test_synthetic_mnb(self, synth_path, capsys):
        code, out, _ = run(capsys, "cv", "--corpus", synth_path, "--seed", "0", "--kinds", "MNB")
        assert code == 0
        assert json.loads(out)["scores"]["1"]["MNB"] >= 0.90

    def test_too_many_folds(self, synth_path, capsys):
        code, _, err = run(capsys, "cv", "--corpus", synth_path, "--seed", "0", "--kinds", "MNB", "--folds", "500")
        assert code == 3 and "MNB" in err

    def test_collision(self, tmp_path, synth_path, capsys):
        scores = tmp_path / "scores.json"
        scores.write_text('{"MNB": 0.5}', encoding="utf-8")
        code, _, _ = run(capsys, "cv", "--corpus", synth_path, "--seed", "0", "--kinds", "MNB", "--folds", "3",
                         "--external-scores", str(scores))
        assert code == 2


class TestTrain:
    def test_single_class(self, tmp_path, capsys):
        corpus = write_corpus(tmp_path / "one.jsonl", [("ভাল বই", POS)])
        code, _, err = run(capsys, "train", "--corpus", corpus, "--split", "1,0,0", "--seed", "0",
                           "--output", str(tmp_path / "out"))
        assert code == 3 and "single class" in err

    def test_artifact_round_trip(self, tmp_path, synth_path, capsys):
        out = tmp_path / "out"
        code, summary, _ = run(capsys, "train", "--corpus", synth_path, "--seed", "2", "--output", str(out))
        assert code == 0
        assert json.loads(summary)["vocab_size"] > 0
        pipe = Pipeline.load(out / "model.json")
        copy = Pipeline.from_dict(json.loads(json.dumps(pipe.to_dict())))
        words = list(pipe.tfidf.vocabulary.terms) + ["অচেনা", "abc"]
        rng = random.Random(0)
        texts = [" ".join(rng.choice(words) for _ in range(rng.randint(0, 12))) for _ in range(100)]
        for a, b in zip(pipe.predict_texts(texts), copy.predict_texts(texts)):
            assert a.label == b.label and a.score.hex() == b.score.hex()

    def test_missing_destination(self, synth_path, capsys):
        assert run(capsys, "train", "--corpus", synth_path, "--seed", "0")[0] == 2


class TestEval:
    def test_reference_confusion(self, tmp_path, toy_model, capsys):
        pairs = [("বাজে", NEG)] * 64 + [("ভাল", NEG)] * 25 + [("বাজে", POS)] * 6 + [("ভাল", POS)] * 105
        corpus = write_corpus(tmp_path / "test.jsonl", pairs)
        out = tmp_path / "eval"
        code, _, err = run(capsys, "eval", "--model", toy_model, "--corpus", corpus, "--output", str(out))
        assert code == 0, err
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert report["confusion"] == [[64, 25], [6, 105]]
        assert report["accuracy"] == pytest.approx(0.845)
        assert {"per_class", "macro", "weighted", "auc", "average_precision", "seed", "config_hash"} <= set(report)
        assert (out / "roc.csv").read_text(encoding="utf-8").startswith("threshold,fpr,tpr\n")
        assert (out / "pr.csv").read_text(encoding="utf-8").startswith("threshold,recall,precision\n")

    def test_perfect(self, tmp_path, toy_model, capsys):
        corpus = write_corpus(tmp_path / "test.jsonl", [("ভাল", POS), ("বাজে", NEG)] * 3)
        run(capsys, "eval", "--model", toy_model, "--corpus", corpus, "--output", str(tmp_path))
        report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert report["accuracy"] == 1.0 and report["auc"] == 1.0

    def test_unseen_vocabulary(self, tmp_path, toy_model, capsys):
        corpus = write_corpus(tmp_path / "test.jsonl", [("অচেনা শব্দ", POS), ("নতুন", NEG)])
        run(capsys, "eval", "--model", toy_model, "--corpus", corpus, "--output", str(tmp_path))
        report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert report["confusion"] == [[1, 0], [1, 0]]

    def test_version_mismatch(self, tmp_path, toy_model, capsys):
        data = json.loads(open(toy_model, encoding="utf-8").read())
        data["format_version"] = 99
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(data), encoding="utf-8")
        corpus = write_corpus(tmp_path / "test.jsonl", [("ভাল", POS)])
        code, _, err = run(capsys, "eval", "--model", str(bad), "--corpus", corpus)
        assert code == 4 and "version" in err

    def test_missing_model(self, tmp_path, capsys):
        corpus = write_corpus(tmp_path / "test.jsonl", [("ভাল", POS)])
        assert run(capsys, "eval", "--model", str(tmp_path / "none.json"), "--corpus", corpus)[0] == 4


class TestPredict:
    def test_single_text(self, toy_model, capsys):
        code, out, _ = run(capsys, "predict", "--model", toy_model, "ভাল বই")
        assert code == 0 and out.startswith("positive\t")

    def test_empty_line(self, toy_model, capsys):
        assert run(capsys, "predict", "--model", toy_model, "")[1] == "negative\t0.000000\n"

    def test_stdin(self, toy_model, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO("ভাল\nবাজে\nবই\n"))
        code, out, _ = run(capsys, "predict", "--model", toy_model, "--stdin")
        lines = out.splitlines()
        assert code == 0 and len(lines) == 3
        assert lines[0].startswith("positive") and lines[1].startswith("negative")


class TestCurve:
    def test_rows(self, synth_path, capsys):
        code, out, _ = run(capsys, "curve", "--corpus", synth_path, "--seed", "0")
        rows = out.strip().splitlines()
        assert code == 0 and rows[0] == "fraction,accuracy" and len(rows) == 6
        assert float(rows[-1].split(",")[1]) >= float(rows[1].split(",")[1])

    @pytest.mark.parametrize("fractions", ["0", "0.5,0.2", "1.2", "x"])
    def test_bad_fractions(self, synth_path, capsys, fractions):
        assert run(capsys, "curve", "--corpus", synth_path, "--seed", "0", "--fractions", fractions)[0] == 2


def test_deterministic_reports(tmp_path, synth_path, capsys):
    reports = []
    for name in ("a", "b"):
        out = tmp_path / name
        run(capsys, "train", "--corpus", synth_path, "--seed", "5", "--model", str(out / "model.json"))
        run(capsys, "eval", "--model", str(out / "model.json"), "--corpus", synth_path)
        reports.append((out / "report.json").read_bytes())
    assert reports[0] == reports[1]

"""Command-line interface.

Exit codes: 0 success, 2 input/config error, 3 training/validation error,
4 model-artifact error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from bnpolarity.corpus import (
    LabeledCorpus,
    SplitSpec,
    SyntheticSpec,
    corpus_stats,
    generate_synthetic_corpus,
    load_corpus,
    save_corpus,
    split_corpus,
)
from bnpolarity.errors import ArtifactError, ConfigError, CorpusError, TrainingError
from bnpolarity.evaluation import cross_validate, evaluate, learning_curve, select_top_models
from bnpolarity.features import NgramConfig
from bnpolarity.models import ClassifierKind, Hyperparams
from bnpolarity.pipeline import Pipeline
from bnpolarity.preprocess import default_stopwords, load_stopwords

EXIT_OK, EXIT_INPUT, EXIT_TRAINING, EXIT_ARTIFACT = 0, 2, 3, 4

_RUN_KEYS = ("corpus", "format", "stopwords", "ngram", "classifier", "split", "folds", "seed", "output")
_TFIDF_KEYS = ("tfidf.use_idf", "tfidf.normalize", "tfidf.min_df")


# -- configuration ------------------------------------------------------------


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` file; ``#`` starts a comment line."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}: line {lineno}: expected key=value")
        values[key.strip()] = value.strip()
    return values


def _parse_bool(value: str, key: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_ints(value: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in value.replace("+", ",").split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated integers, got {value!r}") from None


def _parse_floats(value: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {value!r}") from None


@dataclass(frozen=True)
class RunConfig:
    seed: int
    corpus: Path | None = None
    format: str = "jsonl"
    stopwords: Path | None = None
    ngram: NgramConfig = field(default_factory=NgramConfig)
    classifier: ClassifierKind = ClassifierKind.MNB
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    split: SplitSpec = field(default_factory=SplitSpec)
    folds: int = 10
    output: Path | None = None
    explicit: frozenset[str] = frozenset()

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "corpus": None if self.corpus is None else str(self.corpus),
            "format": self.format,
            "stopwords": None if self.stopwords is None else str(self.stopwords),
            "ngram": self.ngram.to_dict(),
            "classifier": self.classifier.value,
            "hyperparams": self.hyperparams.to_dict(),
            "split": [self.split.train_frac, self.split.valid_frac, self.split.test_frac],
            "folds": self.folds,
        }

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def require_corpus(self) -> Path:
        if self.corpus is None:
            raise ConfigError("no corpus given (set 'corpus' in the config or pass --corpus)")
        return self.corpus


def _infer_format(path: str) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".json"):
        return "jsonl"
    if suffix in (".tsv", ".txt"):
        return "tsv"
    raise ConfigError(f"cannot infer corpus format from {path!r}; pass --format jsonl|tsv")


def resolve_config(values: dict[str, str], require_seed: bool = True) -> RunConfig:
    """Turn merged string settings into a validated :class:`RunConfig`."""
    unknown = [k for k in values if k not in _RUN_KEYS and k not in _TFIDF_KEYS and "." not in k]
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if "seed" not in values:
        if require_seed:
            raise ConfigError("a seed is required (set 'seed' in the config or pass --seed)")
        values = {**values, "seed": "0"}
    try:
        seed = int(values["seed"])
        if seed < 0:
            raise ValueError
    except ValueError:
        raise ConfigError(f"seed must be a non-negative integer, got {values['seed']!r}") from None

    corpus = values.get("corpus")
    fmt = values.get("format") or (_infer_format(corpus) if corpus else "jsonl")
    if fmt not in ("jsonl", "tsv"):
        raise ConfigError(f"format must be jsonl or tsv, got {fmt!r}")
    try:
        ngram = NgramConfig(
            _parse_ints(values.get("ngram", "1"), "ngram"),
            use_idf=_parse_bool(values.get("tfidf.use_idf", "true"), "tfidf.use_idf"),
            normalize=_parse_bool(values.get("tfidf.normalize", "false"), "tfidf.normalize"),
            min_df=int(values.get("tfidf.min_df", "1")),
        )
        classifier = ClassifierKind.parse(values.get("classifier", "MNB"))
        overrides = {k: v for k, v in values.items() if "." in k and k not in _TFIDF_KEYS}
        # model randomness follows the run seed unless pinned explicitly
        overrides.setdefault("svm.seed", str(seed))
        overrides.setdefault("sgd.seed", str(seed))
        hp = Hyperparams().with_overrides(overrides)
        fracs = _parse_floats(values.get("split", "0.8,0.1,0.1"), "split")
        if len(fracs) != 3:
            raise ConfigError(f"split needs three fractions, got {values.get('split')!r}")
        split = SplitSpec(*fracs, seed=seed)
        folds = int(values.get("folds", "10"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    stopwords = values.get("stopwords")
    output = values.get("output")
    return RunConfig(
        seed=seed,
        corpus=Path(corpus) if corpus else None,
        format=fmt,
        stopwords=Path(stopwords) if stopwords else None,
        ngram=ngram,
        classifier=classifier,
        hyperparams=hp,
        split=split,
        folds=folds,
        output=Path(output) if output else None,
        explicit=frozenset(values),
    )


def _gather(args: argparse.Namespace) -> dict[str, str]:
    values = parse_config_file(args.config) if getattr(args, "config", None) else {}
    for key in _RUN_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = str(flag)
    for item in getattr(args, "set", None) or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value.strip()
    return values


def _stopwords(config: RunConfig) -> frozenset[str]:
    return default_stopwords() if config.stopwords is None else load_stopwords(config.stopwords)


def _load(config: RunConfig) -> LabeledCorpus:
    return load_corpus(config.require_corpus(), config.format)


def _dump(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _emit(text: str, path: Path | None) -> None:
    sys.stdout.write(text)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _format_score(score: float) -> str:
    text = f"{score:.6f}"
    return "0.000000" if text == "-0.000000" else text


# -- commands -----------------------------------------------------------------


def cmd_stats(args) -> int:
    values = _gather(args)
    has_split = "split" in values
    config = resolve_config(values, require_seed=has_split)
    corpus = _load(config)
    if has_split:
        parts = dict(zip(("train", "valid", "test"), split_corpus(corpus, config.split)))
    else:
        parts = {"all": corpus}
    report = {name: corpus_stats(part).to_dict() for name, part in parts.items()}
    if has_split:
        report["seed"] = config.seed
    _emit(_dump(report), config.output / "stats.json" if config.output else None)
    return EXIT_OK


def _read_lexicon(path: str | None, default: tuple[str, ...]) -> tuple[str, ...]:
    if path is None:
        return default
    return tuple(sorted(load_stopwords(path)))


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        num_reviews=args.num,
        positive_frac=args.pos_frac,
        positive_lexicon=_read_lexicon(args.positive_lexicon, SyntheticSpec.positive_lexicon),
        negative_lexicon=_read_lexicon(args.negative_lexicon, SyntheticSpec.negative_lexicon),
        neutral_lexicon=_read_lexicon(args.neutral_lexicon, SyntheticSpec.neutral_lexicon),
        words_per_review=(args.min_words, args.max_words),
        noise_rate=args.noise,
        sentiment_rate=args.sentiment_rate,
        seed=args.seed,
    )
    try:
        corpus = generate_synthetic_corpus(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, out, "jsonl")
    return EXIT_OK


def _order_label(orders: Sequence[int]) -> str:
    return "+".join(str(o) for o in orders)


def _read_external_scores(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read external scores {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("external scores must be a JSON object mapping model name to score")
    return data


def cmd_cv(args) -> int:
    config = resolve_config(_gather(args))
    if args.kinds is None:
        kinds = [config.classifier] if "classifier" in config.explicit else list(ClassifierKind)
    else:
        try:
            kinds = [ClassifierKind.parse(k) for k in args.kinds.split(",") if k.strip()]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    order_sets = [config.ngram.orders] if args.orders is None else [
        (o,) for o in _parse_ints(args.orders, "--orders")
    ]
    try:
        ngrams = [NgramConfig(orders, config.ngram.use_idf, config.ngram.normalize, config.ngram.min_df)
                  for orders in order_sets]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    scores: dict[str, dict[str, float]] = {_order_label(ng.orders): {} for ng in ngrams}
    if kinds:
        train = split_corpus(_load(config), config.split)[0]
        stops = _stopwords(config)
        for ng in ngrams:
            for kind in kinds:
                try:
                    acc = cross_validate(train, ng, kind, config.hyperparams, config.folds, config.seed, stops)
                except TrainingError as exc:
                    raise TrainingError(f"cell ({kind.value}, {_order_label(ng.orders)}): {exc}") from None
                scores[_order_label(ng.orders)][kind.value] = acc

    if args.external_scores:
        external = _read_external_scores(args.external_scores)
        nested = all(isinstance(v, dict) for v in external.values())
        for label, column in scores.items():
            extra = external.get(label, {}) if nested else external
            for name, value in extra.items():
                if name.upper() in column:
                    raise ConfigError(f"external score for {name!r} collides with a computed cell")
                if not isinstance(value, (int, float)):
                    raise ConfigError(f"external score for {name!r} must be a number")
                column[name] = float(value)

    report: dict[str, Any] = {"seed": config.seed, "config_hash": config.config_hash, "folds": config.folds,
                              "scores": scores}
    if args.select:
        report["selection"] = {}
        for label, column in scores.items():
            if not column:
                continue
            report["selection"][label] = {
                "models": [str(m) for m in _select_quietly(column, args.top_k)],
                "short": len(column) < args.top_k,
            }
    _emit(_dump(report), config.output / "cv.json" if config.output else None)
    return EXIT_OK


def _select_quietly(column: dict[str, float], top_k: int) -> list:
    # shortfall is reported through the "short" field instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return select_top_models(column, top_k)


def cmd_train(args) -> int:
    config = resolve_config(_gather(args))
    train = split_corpus(_load(config), config.split)[0]
    stops = _stopwords(config)
    metadata = {"seed": config.seed, "config_hash": config.config_hash, "config": config.to_dict()}
    pipe = Pipeline.fit(train, config.ngram, config.classifier, config.hyperparams, stops, metadata)
    if args.model:
        model_path = Path(args.model)
    elif config.output:
        model_path = config.output / "model.json"
    else:
        raise ConfigError("no destination for the model (pass --model or --output)")
    model_path.parent.mkdir(parents=True, exist_ok=True)
    pipe.save(model_path)
    n = len(train)
    n_pos = sum(train.labels)
    summary = {
        "classifier": config.classifier.value,
        "vocab_size": pipe.tfidf.dimension,
        "num_train_docs": n,
        "class_priors": {"negative": (n - n_pos) / n, "positive": n_pos / n},
        "model": str(model_path),
        "seed": config.seed,
        "config_hash": config.config_hash,
    }
    sys.stdout.write(_dump(summary))
    return EXIT_OK


def cmd_eval(args) -> int:
    pipe = Pipeline.load(args.model)
    fmt = args.format or _infer_format(args.corpus)
    corpus = load_corpus(args.corpus, fmt)
    preds = pipe.predict_texts(corpus.texts)
    try:
        report = evaluate(corpus.labels, preds)
    except ValueError as exc:
        raise ConfigError(f"cannot evaluate {args.corpus}: {exc}") from None
    out = report.to_dict()
    out["seed"] = pipe.metadata.get("seed")
    out["config_hash"] = pipe.metadata.get("config_hash")
    outdir = Path(args.output) if args.output else Path(args.model).parent
    _emit(_dump(out), outdir / "report.json")
    if report.curves is not None:
        roc, pr = report.curves.roc, report.curves.pr
        (outdir / "roc.csv").write_text(
            "threshold,fpr,tpr\n" + "".join(f"{t!r},{f!r},{r!r}\n" for t, f, r in zip(roc.thresholds, roc.fpr, roc.tpr)),
            encoding="utf-8",
        )
        (outdir / "pr.csv").write_text(
            "threshold,recall,precision\n"
            + "".join(f"{t!r},{r!r},{p!r}\n" for t, r, p in zip(pr.thresholds, pr.recall, pr.precision)),
            encoding="utf-8",
        )
    return EXIT_OK


def cmd_predict(args) -> int:
    pipe = Pipeline.load(args.model)
    if args.stdin:
        texts = [line.rstrip("\r\n") for line in sys.stdin]
    elif args.text is not None:
        texts = [args.text]
    else:
        raise ConfigError("pass review text or --stdin")
    for text in texts:
        pred = pipe.predict_text(text)
        sys.stdout.write(f"{str(pred.label)}\t{_format_score(pred.score)}\n")
    return EXIT_OK


def cmd_curve(args) -> int:
    config = resolve_config(_gather(args))
    fractions = _parse_floats(args.fractions, "--fractions")
    if not fractions or any(not 0.0 < f <= 1.0 for f in fractions):
        raise ConfigError(f"fractions must lie in (0, 1], got {args.fractions!r}")
    if any(b <= a for a, b in zip(fractions, fractions[1:])):
        raise ConfigError("fractions must be strictly increasing")
    train, valid, test = split_corpus(_load(config), config.split)
    heldout = LabeledCorpus(valid.reviews + test.reviews, "heldout")
    if not len(heldout):
        raise ConfigError("split leaves no held-out reviews for the learning curve")
    curve = learning_curve(train, config.ngram, config.classifier, config.hyperparams, fractions,
                           config.seed, _stopwords(config), heldout=heldout)
    _emit(curve.to_csv(), config.output / "learning_curve.csv" if config.output else None)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file; flags override it")
    parser.add_argument("--corpus", help="labeled corpus file")
    parser.add_argument("--format", choices=("jsonl", "tsv"))
    parser.add_argument("--stopwords", help="stopword file (default: bundled Bengali list)")
    parser.add_argument("--ngram", help="n-gram orders, e.g. 1 or 1,2")
    parser.add_argument("--classifier", help="MNB, LR, SVM, SGD or KNN")
    parser.add_argument("--split", help="train,valid,test fractions, e.g. 0.8,0.1,0.1")
    parser.add_argument("--folds", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--output", help="output directory")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="hyperparameter override, e.g. lr.max_epochs=200 (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser("bnpolarity", description="Bengali review sentiment polarity toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="corpus summary statistics")
    _add_run_options(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="write a seeded synthetic corpus as JSONL")
    p.add_argument("--num", type=int, default=400)
    p.add_argument("--pos-frac", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--sentiment-rate", type=float, default=0.3)
    p.add_argument("--min-words", type=int, default=8)
    p.add_argument("--max-words", type=int, default=20)
    p.add_argument("--positive-lexicon")
    p.add_argument("--negative-lexicon")
    p.add_argument("--neutral-lexicon")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cv", help="k-fold cross-validation table")
    _add_run_options(p)
    p.add_argument("--kinds", help="comma-separated classifiers (empty for none)")
    p.add_argument("--orders", help="comma-separated n-gram orders, one cell each")
    p.add_argument("--select", action="store_true", help="also report the top models per column")
    p.add_argument("--top-k", type=int, default=4)
    p.add_argument("--external-scores", help="JSON map of extra model name -> CV score")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("train", help="fit on the train split and write a model artifact")
    _add_run_options(p)
    p.add_argument("--model", help="artifact path (default: OUTPUT/model.json)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a labeled corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=("jsonl", "tsv"))
    p.add_argument("--output", help="directory for report.json, roc.csv, pr.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="classify review text")
    p.add_argument("--model", required=True)
    p.add_argument("text", nargs="?")
    p.add_argument("--stdin", action="store_true", help="read one review per line from stdin")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("curve", help="learning curve over training fractions")
    _add_run_options(p)
    p.add_argument("--fractions", default="0.1,0.25,0.5,0.75,1.0")
    p.set_defaults(func=cmd_curve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARTIFACT
    except TrainingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except (ConfigError, CorpusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

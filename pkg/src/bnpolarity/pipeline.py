"""End-to-end text classifier: stopwords + TF-IDF model + classifier, and its on-disk artifact."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from bnpolarity.corpus import LabeledCorpus
from bnpolarity.errors import ArtifactError, TrainingError
from bnpolarity.features import FeatureVector, NgramConfig, TfidfModel, fit_tfidf, vectorize
from bnpolarity.models import ClassifierKind, Hyperparams, Prediction, fit, model_from_dict, model_to_dict
from bnpolarity.preprocess import preprocess_review

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class Pipeline:
    stopwords: frozenset[str]
    tfidf: TfidfModel
    model: Any
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def fit(
        cls,
        corpus: LabeledCorpus,
        ngram: NgramConfig,
        kind: ClassifierKind | str,
        hp: Hyperparams = Hyperparams(),
        stopwords: Iterable[str] = frozenset(),
        metadata: dict[str, Any] | None = None,
    ) -> "Pipeline":
        stops = frozenset(stopwords)
        docs = [preprocess_review(text, stops) for text in corpus.texts]
        return cls.fit_tokens(docs, corpus.labels, ngram, kind, hp, stops, metadata)

    @classmethod
    def fit_tokens(cls, docs: Sequence[Sequence[str]], labels, ngram: NgramConfig, kind, hp: Hyperparams,
                   stopwords: frozenset[str] = frozenset(), metadata: dict[str, Any] | None = None) -> "Pipeline":
        if not docs:
            raise TrainingError("no training documents")
        tfidf = fit_tfidf(docs, ngram)
        X = [vectorize(tfidf, doc) for doc in docs]
        return cls(stopwords, tfidf, fit(kind, X, labels, hp), dict(metadata or {}))

    def features(self, text: str) -> FeatureVector:
        return vectorize(self.tfidf, preprocess_review(text, self.stopwords))

    def predict_text(self, text: str) -> Prediction:
        return self.model.predict(self.features(text))

    def predict_texts(self, texts: Iterable[str]) -> list[Prediction]:
        return [self.predict_text(t) for t in texts]

    def to_dict(self) -> dict[str, Any]:
        return {
            "format_version": FORMAT_VERSION,
            "tfidf": self.tfidf.to_dict(),
            "classifier": model_to_dict(self.model),
            "stopwords": sorted(self.stopwords),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Pipeline":
        if not isinstance(data, dict) or "format_version" not in data:
            raise ArtifactError("not a model artifact (missing format_version)")
        if data["format_version"] != FORMAT_VERSION:
            raise ArtifactError(
                f"unsupported artifact version {data['format_version']!r} (this build reads {FORMAT_VERSION})"
            )
        try:
            tfidf = TfidfModel.from_dict(data["tfidf"])
            model = model_from_dict(data["classifier"])
            stops = frozenset(data["stopwords"])
            metadata = dict(data.get("metadata", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise ArtifactError(f"corrupt model artifact: {exc}") from None
        if model.dimension != tfidf.dimension:
            raise ArtifactError(
                f"classifier dimension {model.dimension} does not match vocabulary size {tfidf.dimension}"
            )
        return cls(stops, tfidf, model, metadata)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False, indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Pipeline":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ArtifactError(f"cannot read model artifact {path}: {exc}") from None
        return cls.from_dict(data)

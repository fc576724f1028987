"""N-gram vocabularies and sparse TF-IDF vectors.

A term's weight in a document is its raw n-gram count times
``ln(N / df)``, where ``N`` is the number of training documents and ``df``
the number of training documents containing the term. There is no IDF
smoothing, so a term present in every training document weighs zero and
is dropped from the sparse vector.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "NGRAM_JOINER",
    "NgramConfig",
    "Vocabulary",
    "FeatureVector",
    "TfidfModel",
    "extract_ngrams",
    "fit_tfidf",
    "vectorize",
    "vectorize_corpus",
]

NGRAM_JOINER = " "


@dataclass(frozen=True)
class NgramConfig:
    """Which n-gram orders to extract and how to weight them.

    When several orders are given their terms share one index space.
    ``use_idf=False`` yields raw counts; ``normalize=True`` scales each
    vector to unit L2 norm.
    """

    orders: tuple[int, ...] = (1,)
    use_idf: bool = True
    normalize: bool = False
    min_df: int = 1

    def __post_init__(self):
        orders = tuple(sorted(set(int(n) for n in self.orders)))
        if not orders or any(n not in (1, 2, 3) for n in orders):
            raise ValueError(f"n-gram orders must be a non-empty subset of {{1, 2, 3}}, got {self.orders}")
        if self.min_df < 1:
            raise ValueError("min_df must be at least 1")
        object.__setattr__(self, "orders", orders)

    def to_dict(self) -> dict:
        return {"orders": list(self.orders), "use_idf": self.use_idf, "normalize": self.normalize, "min_df": self.min_df}

    @classmethod
    def from_dict(cls, data: dict) -> "NgramConfig":
        return cls(tuple(data["orders"]), bool(data["use_idf"]), bool(data["normalize"]), int(data["min_df"]))


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_frequency: tuple[int, ...]
    num_train_docs: int
    term_to_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "doc_frequency", tuple(self.doc_frequency))
        object.__setattr__(self, "term_to_index", {t: i for i, t in enumerate(self.terms)})
        if len(self.term_to_index) != len(self.terms):
            raise ValueError("vocabulary terms must be unique")
        if len(self.doc_frequency) != len(self.terms):
            raise ValueError("doc_frequency length must match the number of terms")
        if any(not 1 <= df <= self.num_train_docs for df in self.doc_frequency):
            raise ValueError("document frequencies must lie in [1, num_train_docs]")

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_index

    def index(self, term: str) -> int:
        return self.term_to_index[term]


@dataclass(frozen=True)
class FeatureVector:
    """Sparse non-negative weights keyed by vocabulary index."""

    entries: dict[int, float]
    dimension: int

    def __post_init__(self):
        for i, v in self.entries.items():
            if not 0 <= i < self.dimension:
                raise ValueError(f"index {i} outside dimension {self.dimension}")
            if v == 0.0 or not math.isfinite(v):
                raise ValueError(f"stored weights must be finite and non-zero, got {v!r} at {i}")

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return sorted(self.entries.items())

    def dot(self, other: "FeatureVector") -> float:
        small, large = (self, other) if len(self) <= len(other) else (other, self)
        return math.fsum(v * large.entries[i] for i, v in small.items() if i in large.entries)

    def norm(self) -> float:
        return math.sqrt(math.fsum(v * v for _, v in self.items()))

    def scaled(self, factor: float) -> "FeatureVector":
        return FeatureVector({i: v * factor for i, v in self.entries.items()}, self.dimension)

    def to_dense(self) -> list[float]:
        dense = [0.0] * self.dimension
        for i, v in self.entries.items():
            dense[i] = v
        return dense


def extract_ngrams(tokens: Sequence[str], n: int) -> list[str]:
    """All contiguous length-``n`` windows of ``tokens``, space-joined.

    >>> extract_ngrams(["a", "b", "c"], 2)
    ['a b', 'b c']
    """
    if n not in (1, 2, 3):
        raise ValueError(f"n-gram order must be 1, 2 or 3, got {n}")
    return [NGRAM_JOINER.join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def _doc_ngrams(tokens: Sequence[str], orders: Iterable[int]) -> list[str]:
    grams: list[str] = []
    for n in orders:
        grams.extend(extract_ngrams(tokens, n))
    return grams


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: Vocabulary
    config: NgramConfig

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    def idf(self, index: int) -> float:
        if not self.config.use_idf:
            return 1.0
        return math.log(self.vocabulary.num_train_docs / self.vocabulary.doc_frequency[index])

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "num_train_docs": self.vocabulary.num_train_docs,
            "terms": list(self.vocabulary.terms),
            "doc_frequency": list(self.vocabulary.doc_frequency),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TfidfModel":
        config = NgramConfig.from_dict(data["config"])
        vocab = Vocabulary(tuple(data["terms"]), tuple(int(d) for d in data["doc_frequency"]), int(data["num_train_docs"]))
        for term in vocab.terms:
            if term.count(NGRAM_JOINER) + 1 not in config.orders:
                raise ValueError(f"term {term!r} does not match configured orders {config.orders}")
        return cls(vocab, config)


def fit_tfidf(train_docs: Sequence[Sequence[str]], config: NgramConfig = NgramConfig()) -> TfidfModel:
    """Build the vocabulary and document frequencies from training documents.

    Terms are indexed in code-point order so the layout is reproducible.
    """
    if not train_docs:
        raise ValueError("cannot fit TF-IDF on an empty document list")
    df: Counter[str] = Counter()
    for tokens in train_docs:
        df.update(set(_doc_ngrams(tokens, config.orders)))
    terms = sorted(t for t, c in df.items() if c >= config.min_df)
    vocab = Vocabulary(tuple(terms), tuple(df[t] for t in terms), len(train_docs))
    return TfidfModel(vocab, config)


def vectorize(model: TfidfModel, doc: Sequence[str]) -> FeatureVector:
    index = model.vocabulary.term_to_index
    counts = Counter(g for g in _doc_ngrams(doc, model.config.orders) if g in index)
    entries = {}
    for term, tf in counts.items():
        i = index[term]
        weight = tf * model.idf(i)
        if weight != 0.0:
            entries[i] = weight
    if model.config.normalize and entries:
        norm = math.sqrt(math.fsum(v * v for _, v in sorted(entries.items())))
        entries = {i: v / norm for i, v in entries.items()}
    return FeatureVector(entries, model.dimension)


def vectorize_corpus(model: TfidfModel, docs: Iterable[Sequence[str]]) -> list[FeatureVector]:
    return [vectorize(model, doc) for doc in docs]

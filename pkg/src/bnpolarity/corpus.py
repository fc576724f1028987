"""Labeled review corpora: loading, saving, splitting, statistics, synthesis."""

from __future__ import annotations

import enum
import json
import math
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from bnpolarity.errors import CorpusError, EmptyCorpusError

__all__ = [
    "PolarityLabel",
    "Review",
    "LabeledCorpus",
    "SplitSpec",
    "CorpusStats",
    "SyntheticSpec",
    "load_corpus",
    "save_corpus",
    "split_corpus",
    "corpus_stats",
    "generate_synthetic_corpus",
]


class PolarityLabel(enum.IntEnum):
    NEGATIVE = 0
    POSITIVE = 1

    @classmethod
    def parse(cls, value: str) -> "PolarityLabel":
        """Parse ``"positive"``/``"negative"`` case-insensitively."""
        try:
            return cls[value.strip().upper()]
        except (KeyError, AttributeError):
            raise ValueError(f"unknown label {value!r}") from None

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Review:
    text: str
    label: PolarityLabel

    def __post_init__(self):
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValueError("review text must be non-empty")
        object.__setattr__(self, "label", PolarityLabel(self.label))


@dataclass(frozen=True)
class LabeledCorpus:
    reviews: tuple[Review, ...] = ()
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "reviews", tuple(self.reviews))

    def __len__(self) -> int:
        return len(self.reviews)

    def __iter__(self) -> Iterator[Review]:
        return iter(self.reviews)

    def __getitem__(self, i):
        return self.reviews[i]

    @property
    def texts(self) -> list[str]:
        return [r.text for r in self.reviews]

    @property
    def labels(self) -> list[PolarityLabel]:
        return [r.label for r in self.reviews]

    def subset(self, indices: Sequence[int], source: str | None = None) -> "LabeledCorpus":
        return LabeledCorpus(tuple(self.reviews[i] for i in indices), self.source if source is None else source)


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.8
    valid_frac: float = 0.1
    test_frac: float = 0.1
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train_frac, self.valid_frac, self.test_frac)
        if any(not 0.0 <= f <= 1.0 for f in fracs):
            raise ValueError(f"split fractions must lie in [0, 1], got {fracs}")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {sum(fracs)!r}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class CorpusStats:
    num_documents: int = 0
    num_words: int = 0
    num_unique_words: int = 0
    size_bytes: int = 0
    num_sentences: int = 0

    def to_dict(self) -> dict[str, int]:
        return {
            "num_documents": self.num_documents,
            "num_words": self.num_words,
            "num_unique_words": self.num_unique_words,
            "size_bytes": self.size_bytes,
            "num_sentences": self.num_sentences,
        }


_POSITIVE_WORDS = (
    "ভালো", "অসাধারণ", "চমৎকার", "সুন্দর", "দারুণ", "মুগ্ধ", "প্রিয়", "আনন্দ",
    "উপভোগ্য", "সেরা", "অনবদ্য", "প্রশংসনীয়", "মনোমুগ্ধকর", "হৃদয়স্পর্শী", "সার্থক",
    "রোমাঞ্চকর", "শিক্ষণীয়", "প্রাণবন্ত", "সাবলীল", "অনন্য",
)
_NEGATIVE_WORDS = (
    "বাজে", "খারাপ", "বিরক্তিকর", "অখাদ্য", "হতাশ", "দুর্বল", "একঘেয়ে", "জঘন্য",
    "ফালতু", "অপ্রয়োজনীয়", "ক্লান্তিকর", "নিম্নমানের", "ব্যর্থ", "অসম্পূর্ণ", "বিভ্রান্তিকর",
    "অগোছালো", "নিরস", "ভুলভাল", "অতিরঞ্জিত", "হতাশাজনক",
)
_NEUTRAL_WORDS = (
    "বই", "লেখক", "গল্প", "উপন্যাস", "চরিত্র", "কাহিনী", "পাতা", "অধ্যায়", "প্রকাশনী",
    "লেখা", "পড়া", "শেষ", "শুরু", "প্লট", "ভাষা", "বর্ণনা", "সময়", "পাঠক", "অনুবাদ",
    "কবিতা", "ছবি", "প্রচ্ছদ", "মূল্য", "সংস্করণ", "পর্ব", "ঘটনা", "সমাপ্তি", "সংলাপ",
    "রহস্য", "ইতিহাস",
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the planted-signal corpus generator.

    Each word slot of a review is a sentiment slot with probability
    ``sentiment_rate`` (at least one per review), otherwise a neutral word.
    A sentiment slot draws from the review's own lexicon, or from the
    opposite one with probability ``noise_rate``.
    """

    num_reviews: int = 400
    positive_frac: float = 0.5
    positive_lexicon: tuple[str, ...] = _POSITIVE_WORDS
    negative_lexicon: tuple[str, ...] = _NEGATIVE_WORDS
    neutral_lexicon: tuple[str, ...] = _NEUTRAL_WORDS
    words_per_review: tuple[int, int] = (8, 20)
    noise_rate: float = 0.05
    sentiment_rate: float = 0.3
    seed: int = 0

    def __post_init__(self):
        for name in ("positive_lexicon", "negative_lexicon", "neutral_lexicon"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "words_per_review", tuple(self.words_per_review))

    def validate(self) -> None:
        if self.num_reviews < 1:
            raise ValueError("num_reviews must be at least 1")
        if not 0.0 < self.positive_frac < 1.0:
            raise ValueError("positive_frac must lie in (0, 1)")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must lie in [0, 1]")
        if not 0.0 <= self.sentiment_rate <= 1.0:
            raise ValueError("sentiment_rate must lie in [0, 1]")
        lo, hi = self.words_per_review
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid words_per_review range {self.words_per_review}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        lexicons = {
            "positive": set(self.positive_lexicon),
            "negative": set(self.negative_lexicon),
            "neutral": set(self.neutral_lexicon),
        }
        for name, words in lexicons.items():
            if not words:
                raise ValueError(f"{name} lexicon is empty")
            if any(not w or any(c.isspace() for c in w) for w in words):
                raise ValueError(f"{name} lexicon contains an empty or whitespace-bearing word")
        names = list(lexicons)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                common = lexicons[a] & lexicons[b]
                if common:
                    raise ValueError(f"{a} and {b} lexicons overlap: {sorted(common)[:5]}")


def _iter_lines(path: Path) -> Iterator[tuple[int, str]]:
    try:
        text = path.read_bytes().decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise CorpusError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    if not text.strip():
        raise EmptyCorpusError(f"{path}: empty corpus")
    # split on "\n" only: JSON strings may legally carry U+2028 and friends
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if line.strip():
            yield lineno, line


def _parse_label(value, lineno: int) -> PolarityLabel:
    if not isinstance(value, str):
        raise CorpusError(f"label must be a string, got {value!r}", line=lineno)
    try:
        return PolarityLabel.parse(value)
    except ValueError:
        raise CorpusError(f"unknown label {value!r}", line=lineno) from None


def _make_review(text, label: PolarityLabel, lineno: int) -> Review:
    if not isinstance(text, str) or not text.strip():
        raise CorpusError("review text is missing or empty", line=lineno)
    return Review(text, label)


def load_corpus(path: str | Path, format: str = "jsonl") -> LabeledCorpus:
    """Read a labeled corpus from a JSONL or TSV file.

    Raises:
        EmptyCorpusError: the file holds no records.
        CorpusError: invalid UTF-8, a malformed record or an unknown label;
            the message names the offending line.
    """
    path = Path(path)
    if format not in ("jsonl", "tsv"):
        raise ValueError(f"unsupported corpus format {format!r}")
    try:
        lines = list(_iter_lines(path))
    except OSError as exc:
        raise CorpusError(f"{path}: {exc.strerror or exc}") from None

    reviews = []
    for lineno, line in lines:
        if format == "jsonl":
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON ({exc.msg})", line=lineno) from None
            if not isinstance(record, dict) or "text" not in record or "label" not in record:
                raise CorpusError("record must be an object with 'text' and 'label'", line=lineno)
            label = _parse_label(record["label"], lineno)
            reviews.append(_make_review(record["text"], label, lineno))
        else:
            fields = line.split("\t")
            if len(fields) != 2:
                raise CorpusError(f"expected 'text<TAB>label', found {len(fields)} field(s)", line=lineno)
            label = _parse_label(fields[1], lineno)
            reviews.append(_make_review(fields[0], label, lineno))
    return LabeledCorpus(tuple(reviews), source=str(path))


def save_corpus(corpus: LabeledCorpus, path: str | Path, format: str = "jsonl") -> None:
    lines = []
    for review in corpus:
        if format == "jsonl":
            lines.append(json.dumps({"text": review.text, "label": str(review.label)}, ensure_ascii=False))
        elif format == "tsv":
            if "\t" in review.text or "\n" in review.text:
                raise ValueError("TSV text may not contain tabs or newlines")
            lines.append(f"{review.text}\t{review.label}")
        else:
            raise ValueError(f"unsupported corpus format {format!r}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def split_corpus(corpus: LabeledCorpus, spec: SplitSpec) -> tuple[LabeledCorpus, LabeledCorpus, LabeledCorpus]:
    """Shuffle with ``spec.seed`` and cut into train/valid/test.

    Sizes are ``floor(n * train_frac)``, ``floor(n * valid_frac)`` and the
    remainder, so the parts always partition the corpus. The split is not
    stratified.
    """
    n = len(corpus)
    order = list(range(n))
    random.Random(spec.seed).shuffle(order)
    n_train = math.floor(n * spec.train_frac)
    n_valid = min(math.floor(n * spec.valid_frac), n - n_train)
    cuts = (order[:n_train], order[n_train:n_train + n_valid], order[n_train + n_valid:])
    return tuple(corpus.subset(part) for part in cuts)  # type: ignore[return-value]


_SENTENCE_END = re.compile(r"[।?!]+")


def _count_sentences(text: str) -> int:
    return sum(1 for segment in _SENTENCE_END.split(text) if segment.strip())


def corpus_stats(corpus: LabeledCorpus) -> CorpusStats:
    """Summary counts over the raw (unpreprocessed) review texts.

    Words are whitespace-delimited tokens, with the sentence terminators
    ``।``, ``?``, ``!`` acting as delimiters too. A sentence is a run of content
    ended by one or more of ``।``, ``?``, ``!`` or by the end of the text.
    """
    num_words = 0
    unique: set[str] = set()
    sentences = 0
    size = 0
    for review in corpus:
        tokens = _SENTENCE_END.sub(" ", review.text).split()
        num_words += len(tokens)
        unique.update(tokens)
        sentences += _count_sentences(review.text)
        size += len(review.text.encode("utf-8"))
    return CorpusStats(len(corpus), num_words, len(unique), size, sentences)


def generate_synthetic_corpus(spec: SyntheticSpec) -> LabeledCorpus:
    """Generate a seeded corpus with a planted lexical sentiment signal."""
    spec.validate()
    rng = random.Random(spec.seed)
    n_pos = math.floor(spec.num_reviews * spec.positive_frac + 0.5)
    labels = [PolarityLabel.POSITIVE] * n_pos + [PolarityLabel.NEGATIVE] * (spec.num_reviews - n_pos)
    rng.shuffle(labels)

    lo, hi = spec.words_per_review
    reviews = []
    for label in labels:
        own, other = (
            (spec.positive_lexicon, spec.negative_lexicon)
            if label is PolarityLabel.POSITIVE
            else (spec.negative_lexicon, spec.positive_lexicon)
        )
        length = rng.randint(lo, hi)
        slots = [rng.random() < spec.sentiment_rate for _ in range(length)]
        if not any(slots):
            slots[rng.randrange(length)] = True
        words = []
        for is_sentiment in slots:
            if is_sentiment:
                lexicon = other if rng.random() < spec.noise_rate else own
            else:
                lexicon = spec.neutral_lexicon
            words.append(rng.choice(lexicon))
        # break into sentences of up to 6 words, each ended by a danda
        sentences = [" ".join(words[i:i + 6]) + "।" for i in range(0, len(words), 6)]
        reviews.append(Review(" ".join(sentences), label))
    return LabeledCorpus(tuple(reviews), source=f"synthetic(seed={spec.seed})")

"""Cross-validation, model selection, classification metrics and curves."""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from bnpolarity.corpus import LabeledCorpus, PolarityLabel, SplitSpec, split_corpus
from bnpolarity.errors import TrainingError
from bnpolarity.features import NgramConfig, TfidfModel, vectorize
from bnpolarity.models import CANONICAL_ORDER, ClassifierKind, Hyperparams, Prediction
from bnpolarity.pipeline import Pipeline
from bnpolarity.preprocess import preprocess_review

__all__ = [
    "FoldAssignment",
    "FoldResult",
    "CvScoreTable",
    "ClassMetrics",
    "EvalReport",
    "RocCurve",
    "PrCurve",
    "CurveData",
    "LearningCurve",
    "make_folds",
    "cv_folds",
    "cross_validate",
    "select_top_models",
    "evaluate",
    "roc_auc",
    "pr_ap",
    "learning_curve",
]

NEG, POS = PolarityLabel.NEGATIVE, PolarityLabel.POSITIVE


# -- cross-validation ---------------------------------------------------------


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: tuple[int, ...]
    k: int
    seed: int

    def test_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.fold_of) if f == fold]

    def train_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.fold_of) if f != fold]


def make_folds(labels: Sequence[int], k: int, seed: int = 0) -> FoldAssignment:
    """Stratified fold assignment.

    Each class is shuffled with ``seed`` and dealt round-robin across folds;
    the dealing position carries over from one class to the next, so fold
    sizes differ by at most one as well.
    """
    n = len(labels)
    if k < 2:
        raise TrainingError(f"need at least 2 folds, got {k}")
    if n < k:
        raise TrainingError(f"cannot make {k} folds from {n} reviews")
    rng = random.Random(seed)
    fold_of = [0] * n
    position = 0
    for cls in (NEG, POS):
        members = [i for i, c in enumerate(labels) if int(c) == cls]
        rng.shuffle(members)
        for j, i in enumerate(members):
            fold_of[i] = (position + j) % k
        position = (position + len(members)) % k
    return FoldAssignment(tuple(fold_of), k, seed)


@dataclass(frozen=True, eq=False)
class FoldResult:
    fold: int
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]
    tfidf: TfidfModel
    model: object
    accuracy: float


def cv_folds(
    corpus: LabeledCorpus,
    ngram: NgramConfig,
    kind: ClassifierKind | str,
    hp: Hyperparams = Hyperparams(),
    k: int = 10,
    seed: int = 0,
    stopwords: Iterable[str] = frozenset(),
) -> Iterator[FoldResult]:
    """Yield one result per fold; TF-IDF and classifier see only the k-1 training folds."""
    stops = frozenset(stopwords)
    labels = corpus.labels
    folds = make_folds(labels, k, seed)
    docs = [preprocess_review(text, stops) for text in corpus.texts]
    for fold in range(k):
        train_idx = folds.train_indices(fold)
        test_idx = folds.test_indices(fold)
        pipe = Pipeline.fit_tokens([docs[i] for i in train_idx], [labels[i] for i in train_idx], ngram, kind, hp, stops)
        correct = sum(
            pipe.model.predict(vectorize(pipe.tfidf, docs[i])).label == labels[i] for i in test_idx
        )
        yield FoldResult(fold, tuple(train_idx), tuple(test_idx), pipe.tfidf, pipe.model, correct / len(test_idx))


def cross_validate(
    corpus: LabeledCorpus,
    ngram: NgramConfig,
    kind: ClassifierKind | str,
    hp: Hyperparams = Hyperparams(),
    k: int = 10,
    seed: int = 0,
    stopwords: Iterable[str] = frozenset(),
) -> float:
    """Unweighted mean held-out accuracy over ``k`` stratified folds."""
    accuracies = [r.accuracy for r in cv_folds(corpus, ngram, kind, hp, k, seed, stopwords)]
    return math.fsum(accuracies) / len(accuracies)


@dataclass
class CvScoreTable:
    """Mean CV accuracy per (classifier name, n-gram order) cell."""

    entries: dict[tuple[str, int], float]

    def column(self, order: int) -> dict[str, float]:
        return {name: acc for (name, o), acc in self.entries.items() if o == order}


def _selection_key(item: tuple[str, float]) -> tuple:
    name, score = item
    try:
        rank = CANONICAL_ORDER.index(ClassifierKind.parse(name))
        return (-score, rank, "")
    except ValueError:
        return (-score, len(CANONICAL_ORDER), name)


def select_top_models(scores: Mapping[str, float], top_k: int = 4) -> list[str]:
    """Names of the ``top_k`` best-scoring models.

    Scores are ranked in descending order. Ties go to
    canonical order LR, KNN, MNB, SVM, SGD, then external names
    alphabetically. Fewer than ``top_k`` entries emits a ``UserWarning``.
    """
    if not scores:
        raise ValueError("no scores to select from")
    if len(scores) < top_k:
        warnings.warn(f"only {len(scores)} models scored, fewer than top_k={top_k}", UserWarning, stacklevel=2)
    ranked = sorted(((str(name), float(s)) for name, s in scores.items()), key=_selection_key)
    out: list[str] = []
    for name, _ in ranked[:top_k]:
        try:
            out.append(ClassifierKind.parse(name))
        except ValueError:
            out.append(name)
    return out


# -- metrics ------------------------------------------------------------------


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "support": self.support}


@dataclass(frozen=True)
class RocCurve:
    thresholds: tuple[float, ...]
    fpr: tuple[float, ...]
    tpr: tuple[float, ...]
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr, self.tpr))


@dataclass(frozen=True)
class PrCurve:
    thresholds: tuple[float, ...]
    recall: tuple[float, ...]
    precision: tuple[float, ...]
    average_precision: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.recall, self.precision))


@dataclass(frozen=True)
class CurveData:
    roc: RocCurve
    pr: PrCurve

    @property
    def auc(self) -> float:
        return self.roc.auc

    @property
    def average_precision(self) -> float:
        return self.pr.average_precision


@dataclass(frozen=True)
class EvalReport:
    confusion: tuple[tuple[int, int], tuple[int, int]]
    per_class: dict[PolarityLabel, ClassMetrics]
    accuracy: float
    macro: ClassMetrics
    weighted: ClassMetrics
    curves: CurveData | None = None

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class": {str(c): m.to_dict() for c, m in sorted(self.per_class.items())},
            "macro": self.macro.to_dict(),
            "weighted": self.weighted.to_dict(),
            "confusion": [list(row) for row in self.confusion],
            "auc": None if self.curves is None else self.curves.auc,
            "average_precision": None if self.curves is None else self.curves.average_precision,
        }


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def confusion_matrix(y_true: Sequence[int], y_pred: Sequence[int]) -> tuple[tuple[int, int], tuple[int, int]]:
    counts = [[0, 0], [0, 0]]
    for a, p in zip(y_true, y_pred):
        counts[int(a)][int(p)] += 1
    return (counts[0][0], counts[0][1]), (counts[1][0], counts[1][1])


def metrics_from_confusion(confusion, curves: CurveData | None = None) -> EvalReport:
    """Per-class, macro and support-weighted metrics from a 2x2 matrix (rows actual, columns predicted)."""
    total = sum(map(sum, confusion))
    if total == 0:
        raise ValueError("empty confusion matrix")
    if sum(confusion[POS]) == 0:
        raise ValueError("positive-class recall undefined: no actual positives")
    per_class = {}
    for c in (NEG, POS):
        tp = confusion[c][c]
        predicted = confusion[0][c] + confusion[1][c]
        support = sum(confusion[c])
        p, r = _ratio(tp, predicted), _ratio(tp, support)
        per_class[c] = ClassMetrics(p, r, _f1(p, r), support)

    def average(weights: dict) -> ClassMetrics:
        norm = sum(weights.values())
        return ClassMetrics(
            *(sum(weights[c] * getattr(per_class[c], attr) for c in per_class) / norm for attr in ("precision", "recall", "f1")),
            total,
        )

    return EvalReport(
        confusion=tuple(tuple(row) for row in confusion),
        per_class=per_class,
        accuracy=(confusion[0][0] + confusion[1][1]) / total,
        macro=average({c: 1 for c in per_class}),
        weighted=average({c: per_class[c].support for c in per_class}),
        curves=curves,
    )


def evaluate(y_true: Sequence[int], preds: Sequence[Prediction]) -> EvalReport:
    """Confusion-matrix metrics, plus ROC/PR curves when both classes occur."""
    if len(y_true) != len(preds):
        raise ValueError(f"{len(y_true)} labels but {len(preds)} predictions")
    if not preds:
        raise ValueError("nothing to evaluate")
    confusion = confusion_matrix(y_true, [p.label for p in preds])
    curves = None
    if len({int(y) for y in y_true}) == 2:
        scores = [p.score for p in preds]
        curves = CurveData(roc_auc(y_true, scores), pr_ap(y_true, scores))
    return metrics_from_confusion(confusion, curves)


def _threshold_counts(y_true: Sequence[int], scores: Sequence[float]) -> list[tuple[float, int, int]]:
    """Cumulative (threshold, TP, FP) at each distinct score, descending."""
    if len(y_true) != len(scores):
        raise ValueError(f"{len(y_true)} labels but {len(scores)} scores")
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    steps = []
    tp = fp = 0
    for pos, i in enumerate(order):
        if int(y_true[i]) == POS:
            tp += 1
        else:
            fp += 1
        if pos + 1 == len(order) or scores[order[pos + 1]] != scores[i]:
            steps.append((float(scores[i]), tp, fp))
    return steps


def roc_auc(y_true: Sequence[int], scores: Sequence[float]) -> RocCurve:
    """ROC points from a descending threshold sweep and trapezoidal AUC.

    Tied scores form one threshold step, which counts a tied
    positive/negative pair as half concordant.
    """
    n_pos = sum(1 for y in y_true if int(y) == POS)
    n_neg = len(y_true) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC AUC needs both classes in y_true")
    thresholds, fpr, tpr = [math.inf], [0.0], [0.0]
    area2 = 0  # twice the area, in units of 1/(n_pos*n_neg)
    prev_tp = prev_fp = 0
    for threshold, tp, fp in _threshold_counts(y_true, scores):
        area2 += (fp - prev_fp) * (tp + prev_tp)
        prev_tp, prev_fp = tp, fp
        thresholds.append(threshold)
        fpr.append(fp / n_neg)
        tpr.append(tp / n_pos)
    return RocCurve(tuple(thresholds), tuple(fpr), tuple(tpr), area2 / (2 * n_pos * n_neg))


def pr_ap(y_true: Sequence[int], scores: Sequence[float]) -> PrCurve:
    """Precision/recall at each descending threshold; AP = sum of (R_i - R_{i-1}) * P_i."""
    n_pos = sum(1 for y in y_true if int(y) == POS)
    if n_pos == 0:
        raise ValueError("average precision needs at least one positive")
    thresholds, recall, precision = [], [], []
    ap = 0.0
    prev_r = 0.0
    for threshold, tp, fp in _threshold_counts(y_true, scores):
        r, p = tp / n_pos, tp / (tp + fp)
        ap += (r - prev_r) * p
        prev_r = r
        thresholds.append(threshold)
        recall.append(r)
        precision.append(p)
    return PrCurve(tuple(thresholds), tuple(recall), tuple(precision), ap)


# -- learning curve -----------------------------------------------------------


@dataclass(frozen=True)
class LearningCurve:
    points: tuple[tuple[float, float], ...]

    def to_csv(self) -> str:
        return "fraction,accuracy\n" + "".join(f"{f!r},{a!r}\n" for f, a in self.points)


def learning_curve(
    corpus: LabeledCorpus,
    ngram: NgramConfig,
    kind: ClassifierKind | str,
    hp: Hyperparams = Hyperparams(),
    fractions: Sequence[float] = (0.1, 0.25, 0.5, 0.75, 1.0),
    seed: int = 0,
    stopwords: Iterable[str] = frozenset(),
    heldout: LabeledCorpus | None = None,
    holdout_frac: float = 0.2,
) -> LearningCurve:
    """Held-out accuracy when training on growing prefixes of the training data.

    Without an explicit ``heldout`` corpus, a seeded ``holdout_frac`` slice of
    ``corpus`` is held out. Fraction ``f`` trains on the first
    ``ceil(f * n_train)`` reviews of the seeded shuffle.
    """
    fractions = [float(f) for f in fractions]
    for f in fractions:
        if not 0.0 < f <= 1.0:
            raise ValueError(f"training fraction must lie in (0, 1], got {f}")
    if any(b <= a for a, b in zip(fractions, fractions[1:])):
        raise ValueError("training fractions must be strictly increasing")
    if not fractions:
        return LearningCurve(())
    if heldout is None:
        train, _, heldout = split_corpus(corpus, SplitSpec(1.0 - holdout_frac, 0.0, holdout_frac, seed))
    else:
        order = list(range(len(corpus)))
        random.Random(seed).shuffle(order)
        train = corpus.subset(order)
    if not len(heldout):
        raise ValueError("held-out split is empty")
    stops = frozenset(stopwords)
    held_docs = [preprocess_review(t, stops) for t in heldout.texts]
    held_labels = heldout.labels
    train_docs = [preprocess_review(t, stops) for t in train.texts]
    points = []
    for f in fractions:
        m = math.ceil(f * len(train))
        pipe = Pipeline.fit_tokens(train_docs[:m], train.labels[:m], ngram, kind, hp, stops)
        correct = sum(pipe.model.predict(vectorize(pipe.tfidf, d)).label == y for d, y in zip(held_docs, held_labels))
        points.append((f, correct / len(held_docs)))
    return LearningCurve(tuple(points))

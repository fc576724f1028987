"""Five polarity classifiers sharing one fit/predict contract.

All models emit a real-valued decision score; the label is positive
exactly when the score is strictly greater than zero, so a zero score
(no evidence either way) resolves to negative.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.special import expit

from bnpolarity.corpus import PolarityLabel
from bnpolarity.errors import TrainingError
from bnpolarity.features import FeatureVector

__all__ = [
    "ClassifierKind",
    "CANONICAL_ORDER",
    "MNBParams",
    "LRParams",
    "SVMParams",
    "SGDParams",
    "KNNParams",
    "Hyperparams",
    "Prediction",
    "MultinomialNB",
    "LinearModel",
    "KNNClassifier",
    "fit_mnb",
    "fit_lr",
    "fit_linear_svm",
    "fit_sgd",
    "make_knn",
    "fit",
    "predict",
    "logistic_objective",
    "model_to_dict",
    "model_from_dict",
]


class ClassifierKind(str, enum.Enum):
    MNB = "MNB"
    LR = "LR"
    SVM = "SVM"
    SGD = "SGD"
    KNN = "KNN"

    @classmethod
    def parse(cls, name: str) -> "ClassifierKind":
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise ValueError(f"unknown classifier {name!r}; expected one of {[k.value for k in cls]}") from None

    def __str__(self) -> str:
        return self.value


# Tie-break order used by model selection.
CANONICAL_ORDER = (ClassifierKind.LR, ClassifierKind.KNN, ClassifierKind.MNB, ClassifierKind.SVM, ClassifierKind.SGD)


@dataclass(frozen=True)
class MNBParams:
    alpha: float = 1.0


@dataclass(frozen=True)
class LRParams:
    learning_rate: float = 0.1
    l2_lambda: float = 1e-4
    max_epochs: int = 500
    tolerance: float = 1e-6


@dataclass(frozen=True)
class SVMParams:
    l2_lambda: float = 1e-4
    epochs: int = 50
    seed: int = 0


@dataclass(frozen=True)
class SGDParams:
    """Per-sample SGD settings.

    ``schedule`` is one of ``pegasos`` (step ``1 / (l2_lambda * t)``),
    ``invscaling`` (``learning_rate / sqrt(t)``) or ``constant``.
    """

    loss: str = "hinge"
    schedule: str = "invscaling"
    learning_rate: float = 0.1
    l2_lambda: float = 1e-4
    epochs: int = 50
    seed: int = 0


@dataclass(frozen=True)
class KNNParams:
    k: int = 5


_PARSERS = {"float": float, "int": int, "str": str}
_SECTIONS = {"mnb": MNBParams, "lr": LRParams, "svm": SVMParams, "sgd": SGDParams, "knn": KNNParams}


@dataclass(frozen=True)
class Hyperparams:
    mnb: MNBParams = field(default_factory=MNBParams)
    lr: LRParams = field(default_factory=LRParams)
    svm: SVMParams = field(default_factory=SVMParams)
    sgd: SGDParams = field(default_factory=SGDParams)
    knn: KNNParams = field(default_factory=KNNParams)

    def __post_init__(self):
        if not self.mnb.alpha > 0:
            raise ValueError("mnb.alpha must be > 0")
        for name, value in (
            ("lr.learning_rate", self.lr.learning_rate),
            ("lr.l2_lambda", self.lr.l2_lambda),
            ("lr.tolerance", self.lr.tolerance),
            ("svm.l2_lambda", self.svm.l2_lambda),
            ("sgd.learning_rate", self.sgd.learning_rate),
            ("sgd.l2_lambda", self.sgd.l2_lambda),
        ):
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        for name, value in (("lr.max_epochs", self.lr.max_epochs), ("svm.epochs", self.svm.epochs),
                            ("sgd.epochs", self.sgd.epochs), ("knn.k", self.knn.k)):
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value!r}")
        if self.sgd.loss not in ("hinge", "logistic"):
            raise ValueError(f"sgd.loss must be 'hinge' or 'logistic', got {self.sgd.loss!r}")
        if self.sgd.schedule not in ("pegasos", "invscaling", "constant"):
            raise ValueError(f"unknown sgd.schedule {self.sgd.schedule!r}")

    def to_dict(self) -> dict[str, dict[str, Any]]:
        return {name: asdict(getattr(self, name)) for name in _SECTIONS}

    @classmethod
    def from_dict(cls, data: Mapping[str, Mapping[str, Any]]) -> "Hyperparams":
        return cls(**{name: _SECTIONS[name](**data.get(name, {})) for name in _SECTIONS})

    def with_overrides(self, overrides: Mapping[str, str]) -> "Hyperparams":
        """Apply flat ``section.field -> string`` overrides, e.g. ``{"lr.max_epochs": "200"}``."""
        sections = {name: getattr(self, name) for name in _SECTIONS}
        for key, raw in overrides.items():
            section, _, name = key.partition(".")
            if section not in sections:
                raise ValueError(f"unknown hyperparameter section in {key!r}")
            types = {f.name: f.type for f in fields(sections[section])}
            if name not in types:
                raise ValueError(f"unknown hyperparameter {key!r}")
            try:
                value = _PARSERS[str(types[name])](raw)
            except ValueError:
                raise ValueError(f"invalid value {raw!r} for {key}") from None
            sections[section] = replace(sections[section], **{name: value})
        return Hyperparams(**sections)


@dataclass(frozen=True)
class Prediction:
    label: PolarityLabel
    score: float

    @classmethod
    def from_score(cls, score: float) -> "Prediction":
        return cls(PolarityLabel.POSITIVE if score > 0 else PolarityLabel.NEGATIVE, score)


class _Classifier:
    kind: ClassifierKind
    dimension: int

    def decision(self, x: FeatureVector) -> float:
        raise NotImplementedError

    def predict(self, x: FeatureVector) -> Prediction:
        if x.dimension != self.dimension:
            raise ValueError(f"feature dimension {x.dimension} does not match model dimension {self.dimension}")
        return Prediction.from_score(self.decision(x))


@dataclass(frozen=True, eq=False)
class MultinomialNB(_Classifier):
    """Log class priors ``(negative, positive)`` and a ``2 x V`` table of
    per-class log term likelihoods."""

    log_prior: tuple[float, float]
    log_likelihood: np.ndarray
    kind: ClassifierKind = field(default=ClassifierKind.MNB, init=False)

    @property
    def dimension(self) -> int:
        return self.log_likelihood.shape[1]

    def decision(self, x: FeatureVector) -> float:
        ll = self.log_likelihood
        score = self.log_prior[1] - self.log_prior[0]
        for i, v in x.items():
            score += v * (ll[1, i] - ll[0, i])
        return float(score)

    def posterior(self, x: FeatureVector) -> float:
        """P(positive | x)."""
        return float(expit(self.decision(x)))


@dataclass(frozen=True, eq=False)
class LinearModel(_Classifier):
    kind: ClassifierKind
    weights: np.ndarray
    bias: float

    @property
    def dimension(self) -> int:
        return self.weights.shape[0]

    def decision(self, x: FeatureVector) -> float:
        w = self.weights
        score = 0.0
        for i, v in x.items():
            score += w[i] * v
        return float(score + self.bias)


@dataclass(frozen=True, eq=False)
class KNNClassifier(_Classifier):
    k: int
    vectors: tuple[FeatureVector, ...]
    labels: tuple[PolarityLabel, ...]
    dimension: int
    kind: ClassifierKind = field(default=ClassifierKind.KNN, init=False)
    norms: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "norms", tuple(v.norm() for v in self.vectors))

    def neighbors(self, x: FeatureVector) -> list[int]:
        """Indices of the ``k`` most cosine-similar training vectors, lower index first on ties."""
        qn = x.norm()
        sims = []
        for j, (v, vn) in enumerate(zip(self.vectors, self.norms)):
            sim = x.dot(v) / (qn * vn) if qn > 0 and vn > 0 else 0.0
            sims.append((-sim, j))
        sims.sort()
        return [j for _, j in sims[: self.k]]

    def decision(self, x: FeatureVector) -> float:
        nearest = self.neighbors(x)
        positive = sum(1 for j in nearest if self.labels[j] == PolarityLabel.POSITIVE)
        return 2.0 * positive / len(nearest) - 1.0


# -- fitting ------------------------------------------------------------------


def _check_training_set(X: Sequence[FeatureVector], y: Sequence[int], need_both: bool = True) -> tuple[int, np.ndarray]:
    if len(X) != len(y):
        raise ValueError(f"{len(X)} feature vectors but {len(y)} labels")
    if not X:
        raise TrainingError("empty training set")
    dims = {x.dimension for x in X}
    if len(dims) != 1:
        raise ValueError(f"inconsistent feature dimensions {sorted(dims)}")
    labels = np.array([int(PolarityLabel(v)) for v in y], dtype=np.int64)
    if need_both and len(set(labels.tolist())) < 2:
        raise TrainingError("training set contains a single class")
    return dims.pop(), labels


def _to_csr(X: Sequence[FeatureVector], dimension: int) -> sparse.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for x in X:
        for i, v in x.items():
            indices.append(i)
            data.append(v)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(X), dimension),
    )


def fit_mnb(X: Sequence[FeatureVector], y: Sequence[int], hp: Hyperparams = Hyperparams()) -> MultinomialNB:
    """Multinomial naive Bayes with additive smoothing.

    Feature weights act as fractional term counts: the likelihood of term
    ``w`` under class ``c`` is ``(alpha + S_cw) / (alpha * V + S_c)`` with
    ``S_cw`` the summed weight of ``w`` over class-``c`` documents.
    """
    alpha = hp.mnb.alpha
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    dim, labels = _check_training_set(X, y)
    counts = np.zeros((2, dim))
    for x, c in zip(X, labels):
        for i, v in x.items():
            counts[c, i] += v
    n = len(labels)
    class_counts = np.bincount(labels, minlength=2)
    log_prior = (math.log(class_counts[0] / n), math.log(class_counts[1] / n))
    smoothed = counts + alpha
    log_likelihood = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    return MultinomialNB(log_prior, log_likelihood)


def logistic_objective(w: np.ndarray, b: float, X, y_signed: np.ndarray, l2_lambda: float):
    """Mean logistic loss plus ``l2_lambda/2 * ||w||^2`` and its gradient.

    Returns ``(loss, grad_w, grad_b)``; the bias is not regularized.
    """
    margins = y_signed * (X @ w + b)
    n = X.shape[0]
    loss = float(np.logaddexp(0.0, -margins).sum() / n + 0.5 * l2_lambda * (w @ w))
    coef = -y_signed * expit(-margins) / n
    grad_w = X.T @ coef + l2_lambda * w
    grad_b = float(coef.sum())
    return loss, np.asarray(grad_w).ravel(), grad_b


def fit_lr(X: Sequence[FeatureVector], y: Sequence[int], hp: Hyperparams = Hyperparams()) -> LinearModel:
    """L2-regularized logistic regression by full-batch gradient descent from zero."""
    dim, labels = _check_training_set(X, y)
    A = _to_csr(X, dim)
    ys = 2.0 * labels - 1.0
    p = hp.lr
    w = np.zeros(dim)
    b = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(p.max_epochs):
            loss, gw, gb = logistic_objective(w, b, A, ys, p.l2_lambda)
            if not math.isfinite(loss):
                raise TrainingError("logistic regression diverged (non-finite loss)")
            if math.sqrt(float(gw @ gw) + gb * gb) < p.tolerance:
                break
            w = w - p.learning_rate * gw
            b = b - p.learning_rate * gb
    if not (np.all(np.isfinite(w)) and math.isfinite(b)):
        raise TrainingError("logistic regression diverged (non-finite weights)")
    return LinearModel(ClassifierKind.LR, w, float(b))


def _sgd(A: sparse.csr_matrix, ys: np.ndarray, loss: str, schedule: str, eta0: float,
         l2_lambda: float, epochs: int, seed: int) -> tuple[np.ndarray, float]:
    # The bias acts as an extra feature fixed at 1: it is shrunk by the L2
    # step like every weight, which keeps 1/(lambda*t) steps from blowing it up.
    n, dim = A.shape
    w = np.zeros(dim)
    b = 0.0
    rng = random.Random(seed)
    order = list(range(n))
    t = 0
    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            t += 1
            if schedule == "pegasos":
                eta = 1.0 / (l2_lambda * t)
            elif schedule == "invscaling":
                eta = eta0 / math.sqrt(t)
            else:
                eta = eta0
            lo, hi = A.indptr[i], A.indptr[i + 1]
            idx = A.indices[lo:hi]
            vals = A.data[lo:hi]
            margin = ys[i] * (float(w[idx] @ vals) + b)
            shrink = 1.0 - eta * l2_lambda
            w *= shrink
            b *= shrink
            if loss == "hinge":
                g = 1.0 if margin < 1.0 else 0.0
            else:
                g = float(expit(-margin))
            if g:
                step = eta * ys[i] * g
                w[idx] += step * vals
                b += step
        if not (math.isfinite(b) and np.all(np.isfinite(w))):
            raise TrainingError("SGD diverged (non-finite weights)")
    return w, float(b)


def fit_linear_svm(X: Sequence[FeatureVector], y: Sequence[int], hp: Hyperparams = Hyperparams()) -> LinearModel:
    """Linear SVM by Pegasos: per-sample hinge sub-gradient steps of size ``1/(lambda*t)``."""
    dim, labels = _check_training_set(X, y)
    p = hp.svm
    w, b = _sgd(_to_csr(X, dim), 2.0 * labels - 1.0, "hinge", "pegasos", 1.0, p.l2_lambda, p.epochs, p.seed)
    return LinearModel(ClassifierKind.SVM, w, b)


def fit_sgd(X: Sequence[FeatureVector], y: Sequence[int], hp: Hyperparams = Hyperparams()) -> LinearModel:
    dim, labels = _check_training_set(X, y)
    p = hp.sgd
    with np.errstate(over="ignore", invalid="ignore"):
        w, b = _sgd(_to_csr(X, dim), 2.0 * labels - 1.0, p.loss, p.schedule, p.learning_rate,
                    p.l2_lambda, p.epochs, p.seed)
    return LinearModel(ClassifierKind.SGD, w, b)


def make_knn(X: Sequence[FeatureVector], y: Sequence[int], hp: Hyperparams = Hyperparams()) -> KNNClassifier:
    dim, labels = _check_training_set(X, y, need_both=False)
    if hp.knn.k > len(X):
        raise TrainingError(f"k={hp.knn.k} exceeds the {len(X)} training vectors")
    return KNNClassifier(hp.knn.k, tuple(X), tuple(PolarityLabel(int(c)) for c in labels), dim)


_FITTERS = {
    ClassifierKind.MNB: fit_mnb,
    ClassifierKind.LR: fit_lr,
    ClassifierKind.SVM: fit_linear_svm,
    ClassifierKind.SGD: fit_sgd,
    ClassifierKind.KNN: make_knn,
}


def fit(kind: ClassifierKind | str, X: Sequence[FeatureVector], y: Sequence[int], hp: Hyperparams = Hyperparams()):
    kind = ClassifierKind.parse(kind) if isinstance(kind, str) and not isinstance(kind, ClassifierKind) else kind
    return _FITTERS[kind](X, y, hp)


def predict(model: _Classifier, x: FeatureVector) -> Prediction:
    return model.predict(x)


def predict_all(model: _Classifier, X: Iterable[FeatureVector]) -> list[Prediction]:
    return [model.predict(x) for x in X]


# -- serialization ------------------------------------------------------------


def _vector_to_list(x: FeatureVector) -> list[list]:
    return [[i, v] for i, v in x.items()]


def model_to_dict(model: _Classifier) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": model.kind.value, "dimension": model.dimension}
    if isinstance(model, MultinomialNB):
        out["log_prior"] = list(model.log_prior)
        out["log_likelihood"] = model.log_likelihood.tolist()
    elif isinstance(model, LinearModel):
        out["weights"] = model.weights.tolist()
        out["bias"] = model.bias
    elif isinstance(model, KNNClassifier):
        out["k"] = model.k
        out["vectors"] = [_vector_to_list(v) for v in model.vectors]
        out["labels"] = [int(c) for c in model.labels]
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return out


def model_from_dict(data: Mapping[str, Any]) -> _Classifier:
    kind = ClassifierKind.parse(data["kind"])
    dim = int(data["dimension"])
    if kind is ClassifierKind.MNB:
        ll = np.array(data["log_likelihood"], dtype=np.float64).reshape(2, -1)
        model: _Classifier = MultinomialNB(tuple(float(v) for v in data["log_prior"]), ll)
    elif kind is ClassifierKind.KNN:
        vectors = tuple(FeatureVector({int(i): float(v) for i, v in pairs}, dim) for pairs in data["vectors"])
        model = KNNClassifier(int(data["k"]), vectors, tuple(PolarityLabel(int(c)) for c in data["labels"]), dim)
    else:
        model = LinearModel(kind, np.array(data["weights"], dtype=np.float64), float(data["bias"]))
    if model.dimension != dim:
        raise ValueError(f"stored dimension {dim} does not match parameters ({model.dimension})")
    return model

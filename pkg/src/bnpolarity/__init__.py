"""Sentiment polarity detection for Bengali book reviews.

The pipeline is: load a labeled corpus, clean and tokenize each review,
build n-gram TF-IDF vectors, train one of five classifiers, and evaluate
with cross-validation, confusion-matrix metrics and ROC/PR curves.
"""

from bnpolarity.corpus import (
    LabeledCorpus,
    PolarityLabel,
    Review,
    SplitSpec,
    SyntheticSpec,
    corpus_stats,
    generate_synthetic_corpus,
    load_corpus,
    save_corpus,
    split_corpus,
)
from bnpolarity.errors import (
    ArtifactError,
    ConfigError,
    CorpusError,
    EmptyCorpusError,
    PolarityError,
    TrainingError,
)
from bnpolarity.evaluation import (
    cross_validate,
    evaluate,
    learning_curve,
    make_folds,
    pr_ap,
    roc_auc,
    select_top_models,
)
from bnpolarity.features import FeatureVector, NgramConfig, TfidfModel, fit_tfidf, vectorize, vectorize_corpus
from bnpolarity.models import ClassifierKind, Hyperparams, Prediction, fit, predict
from bnpolarity.pipeline import Pipeline
from bnpolarity.preprocess import default_stopwords, preprocess_review

__version__ = "0.1.0"

__all__ = [
    "ArtifactError",
    "ClassifierKind",
    "ConfigError",
    "CorpusError",
    "EmptyCorpusError",
    "FeatureVector",
    "Hyperparams",
    "LabeledCorpus",
    "Pipeline",
    "NgramConfig",
    "PolarityError",
    "PolarityLabel",
    "Prediction",
    "Review",
    "SplitSpec",
    "SyntheticSpec",
    "TfidfModel",
    "TrainingError",
    "corpus_stats",
    "cross_validate",
    "default_stopwords",
    "evaluate",
    "fit",
    "fit_tfidf",
    "generate_synthetic_corpus",
    "learning_curve",
    "load_corpus",
    "make_folds",
    "pr_ap",
    "predict",
    "preprocess_review",
    "roc_auc",
    "save_corpus",
    "select_top_models",
    "split_corpus",
    "vectorize",
    "vectorize_corpus",
]

"""Pre-posting moderation toolkit: predict tweet deletion and the reason why.

The pipeline loads a corpus, normalizes text, vectorizes it with TF-IDF,
trains a baseline/SVM/forest per experimental setting, evaluates with
weighted metrics, and serves a three-stage warn-before-posting cascade over
HTTP. Everything is seeded and reproducible.
"""

from .bundle import ModelBundle, TrainingMetadata, load_bundle, save_bundle
from .cascade import CascadeBundle, CheckResult, check, load_cascade
from .corpus import Corpus, SplitSpec, TweetRecord, load_corpus, save_corpus, stratified_split
from .errors import (
    BundleChecksumError,
    BundleFormatError,
    BundleVersionError,
    CorpusFormatError,
    DataError,
    ModelError,
    PredeleteError,
    UsageError,
)
from .evaluation import EvalReport, evaluate, fleiss_kappa
from .experiments import Setting, label_map_for
from .features import Vocabulary, fit_vocabulary, vectorize, vectorize_text
from .models import (
    ForestHyperparams,
    ForestModel,
    LabelMap,
    LinearSvmModel,
    MajorityModel,
    Prediction,
    SvmHyperparams,
    predict,
    train_forest,
    train_majority,
    train_svm,
)
from .textprep import DEFAULT_CONFIG, NormalizationConfig, normalize, tokenize

__version__ = "0.1.0"

__all__ = [
    "BundleChecksumError",
    "BundleFormatError",
    "BundleVersionError",
    "CascadeBundle",
    "CheckResult",
    "Corpus",
    "CorpusFormatError",
    "DataError",
    "DEFAULT_CONFIG",
    "EvalReport",
    "ForestHyperparams",
    "ForestModel",
    "LabelMap",
    "LinearSvmModel",
    "MajorityModel",
    "ModelBundle",
    "ModelError",
    "NormalizationConfig",
    "Prediction",
    "PredeleteError",
    "Setting",
    "SplitSpec",
    "SvmHyperparams",
    "TrainingMetadata",
    "TweetRecord",
    "UsageError",
    "Vocabulary",
    "check",
    "evaluate",
    "fit_vocabulary",
    "fleiss_kappa",
    "label_map_for",
    "load_bundle",
    "load_cascade",
    "load_corpus",
    "normalize",
    "predict",
    "save_bundle",
    "save_corpus",
    "stratified_split",
    "tokenize",
    "train_forest",
    "train_majority",
    "train_svm",
    "vectorize",
    "vectorize_text",
]

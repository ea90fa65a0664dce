"""Stylometric attribution toolkit.

Document-level linguistic features, token-predictability channel
aggregation, a deterministic random forest, exact tree Shapley
attributions, and an evaluation harness, behind one CLI.
"""

from ._backend import BACKEND_NAME, available_backends
from .channels import (
    AGG_STATS,
    MAX_POSITIONS,
    ChannelSequence,
    aggregate,
    aggregate_matrix,
    align_external,
    concat_features,
    load_channels,
    load_external_columns,
)
from .corpus import (
    Corpus,
    Document,
    corpus_from_documents,
    load_corpus,
    split_train_validation,
    write_corpus,
)
from .errors import DataError
from .evaluation import EvalReport, confusion_matrix, evaluate, macro_f1
from .forest import (
    Forest,
    ForestConfig,
    Tree,
    forest_from_json,
    forest_to_json,
    load_model,
    predict,
    predict_proba,
    save_model,
    train,
)
from .matrix import FeatureMatrix, read_feature_matrix, write_feature_matrix
from .pipeline import (
    ExperimentConfig,
    assemble_features,
    corpus_features,
    load_experiment_config,
    run_experiment,
)
from .shapley import (
    Explanation,
    ImportanceReport,
    importance_report,
    shap_forest,
    shap_matrix,
    shap_tree,
)
from .stylometry import (
    FEATURE_NAMES,
    MarkerLexicon,
    default_lexicon,
    extract_stylo,
    load_lexicon,
)
from .tokenizer import TokenizedText, syllable_count, tokenize

__version__ = "0.1.0"

__all__ = [
    "AGG_STATS",
    "BACKEND_NAME",
    "ChannelSequence",
    "Corpus",
    "DataError",
    "Document",
    "EvalReport",
    "Explanation",
    "ExperimentConfig",
    "FEATURE_NAMES",
    "FeatureMatrix",
    "Forest",
    "ForestConfig",
    "ImportanceReport",
    "MAX_POSITIONS",
    "MarkerLexicon",
    "TokenizedText",
    "Tree",
    "aggregate",
    "aggregate_matrix",
    "align_external",
    "assemble_features",
    "available_backends",
    "concat_features",
    "confusion_matrix",
    "corpus_features",
    "corpus_from_documents",
    "default_lexicon",
    "evaluate",
    "extract_stylo",
    "forest_from_json",
    "forest_to_json",
    "importance_report",
    "load_channels",
    "load_corpus",
    "load_experiment_config",
    "load_external_columns",
    "load_lexicon",
    "load_model",
    "macro_f1",
    "predict",
    "predict_proba",
    "read_feature_matrix",
    "run_experiment",
    "save_model",
    "shap_forest",
    "shap_matrix",
    "shap_tree",
    "split_train_validation",
    "syllable_count",
    "tokenize",
    "train",
    "write_corpus",
    "write_feature_matrix",
]

"""Candidate disambiguation: rule matchers, pair features, classifiers, calibration."""
from .calibration import (
    PRF,
    binary_prf,
    calibrate_threshold,
    cross_val_scores,
    prf_at_threshold,
    select_threshold,
    strict_threshold,
)
from .classifiers import MODELS, LinearSvcModel, LogRegModel, RandomForestModel
from .features import FeatureVector, PairFeaturizer, featurize
from .linking import (
    ML_MODELS,
    RULE_MODELS,
    ElLabeledPair,
    EntityLinker,
    LinkDecision,
    disambiguate,
    evaluate_pairs,
    mention_from_text,
    read_pairs,
    split_by_product,
    train_linker,
    write_pairs,
)
from .rules import TypeMapper, exact_match, sub_match
from .similarity import CharTrigramEmbedder, WordVectorEmbedder, cosine, jaro, jaro_winkler

__all__ = [
    "PRF", "binary_prf", "calibrate_threshold", "cross_val_scores", "prf_at_threshold",
    "select_threshold", "strict_threshold", "MODELS", "LinearSvcModel", "LogRegModel",
    "RandomForestModel", "FeatureVector", "PairFeaturizer", "featurize", "ML_MODELS",
    "RULE_MODELS", "ElLabeledPair", "EntityLinker", "LinkDecision", "disambiguate",
    "evaluate_pairs", "mention_from_text", "read_pairs", "split_by_product", "train_linker",
    "write_pairs", "TypeMapper", "exact_match", "sub_match", "CharTrigramEmbedder",
    "WordVectorEmbedder", "cosine", "jaro", "jaro_winkler",
]

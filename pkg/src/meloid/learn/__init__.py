"""Mining, features, regression trees and recommendation for induct arguments."""

from meloid.learn.evaluate import Metrics, evaluate_model, random_hit_rate
from meloid.learn.features import (
    ASSERTION_IDS,
    CATALOG_HASH,
    CATALOG_TEXT,
    FeatureVector,
    Triple,
    extract_features,
)
from meloid.learn.mining import DataRecord, MiningConfig, active_mine, read_jsonl, write_jsonl
from meloid.learn.recommend import Recommendation, RankedVariant, recommend
from meloid.learn.tree import Leaf, ModelError, RegressionTree, Split, TreeParams, predict, train_tree

__all__ = [
    "ASSERTION_IDS",
    "CATALOG_HASH",
    "CATALOG_TEXT",
    "DataRecord",
    "FeatureVector",
    "Leaf",
    "Metrics",
    "MiningConfig",
    "ModelError",
    "RankedVariant",
    "Recommendation",
    "RegressionTree",
    "Split",
    "TreeParams",
    "Triple",
    "active_mine",
    "evaluate_model",
    "extract_features",
    "predict",
    "random_hit_rate",
    "read_jsonl",
    "recommend",
    "train_tree",
    "write_jsonl",
]

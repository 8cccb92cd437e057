"""Fairness metrics, fairness-aware estimators and the experiment harness."""

from ._fairlens import (
    ConfigError,
    FairlensError,
    InfeasibleError,
    IntegrityError,
    MissingInputError,
    ModelFormatError,
    ParameterError,
    ParseError,
    ShapeError,
    UndefinedMetricError,
    ValidationError,
    auc,
    consistency,
    load_german_credit,
    max_mean_difference,
    mean_difference,
    normalized_mean_difference,
    pearson_r,
    predict,
    relabel_count,
    reweigh,
    run_cli,
    situation_test_score,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]

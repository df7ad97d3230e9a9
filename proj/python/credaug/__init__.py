"""Minority oversampling (SMOTE, Borderline-SMOTE, ADASYN), class-weighted
gradient boosting, and evaluation metrics for imbalanced credit data."""

from ._credaug import (
    CredaugError,
    GBDTModel,
    adasyn,
    auc_roc,
    borderline_smote,
    bootstrap_compare,
    gini,
    js_divergence,
    knn,
    ks_statistic,
    ks_two_sample,
    run_cli,
    set_num_threads,
    smote,
    train_gbdt,
    wasserstein_1d,
)

__all__ = [
    "CredaugError",
    "GBDTModel",
    "adasyn",
    "auc_roc",
    "borderline_smote",
    "bootstrap_compare",
    "gini",
    "js_divergence",
    "knn",
    "ks_statistic",
    "ks_two_sample",
    "run_cli",
    "set_num_threads",
    "smote",
    "train_gbdt",
    "wasserstein_1d",
]

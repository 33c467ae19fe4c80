"""Classifier training: scaling, rebalancing, five model kinds, evaluation."""

from .io import load_model, save_model
from .knn import KnnClassifier
from .linear import LogisticRegressionOvR, RbfSvc
from .metrics import (EvaluationReport, binary_auc, binary_metrics,
                      confusion_matrix, evaluate, ovr_auc)
from .resample import smote_enn
from .scaling import StandardScaler
from .search import default_grid, grid_search, stratified_folds
from .trees import GradientBoosting, RandomForest

KINDS = ("random_forest", "gbt", "svc", "logistic", "knn")

_REGISTRY = {
    "random_forest": RandomForest,
    "gbt": GradientBoosting,
    "svc": RbfSvc,
    "logistic": LogisticRegressionOvR,
    "knn": KnnClassifier,
}


def make_model(kind: str, params: dict | None = None, seed: int = 0,
               n_classes: int = 4):
    try:
        cls = _REGISTRY[kind]
    except KeyError:
        raise ValueError(f"unknown classifier kind {kind!r}") from None
    return cls(seed=seed, n_classes=n_classes, **(params or {}))


def fit(kind: str, X, y, params: dict | None = None, seed: int = 0,
        n_classes: int = 4):
    model = make_model(kind, params, seed=seed, n_classes=n_classes)
    model.fit(X, y)
    return model


__all__ = [
    "KINDS", "make_model", "fit", "StandardScaler", "smote_enn",
    "RandomForest", "GradientBoosting", "RbfSvc", "LogisticRegressionOvR",
    "KnnClassifier", "EvaluationReport", "evaluate", "confusion_matrix",
    "binary_metrics", "binary_auc", "ovr_auc", "grid_search",
    "stratified_folds", "default_grid", "save_model", "load_model",
]

"""Stratified cross-validated grid search selecting on weighted F1."""

from __future__ import annotations

import numpy as np

from .metrics import confusion_matrix, weighted_scores


def stratified_folds(y: np.ndarray, folds: int, seed: int = 0) -> np.ndarray:
    """Fold id per row: per-class shuffle then round-robin assignment."""
    y = np.asarray(y, np.int64)
    rng = np.random.default_rng(seed)
    out = np.empty(y.shape[0], np.int64)
    for c in np.unique(y):
        idx = np.nonzero(y == c)[0]
        if idx.shape[0] < folds:
            raise ValueError(
                f"class {int(c)} has {idx.shape[0]} rows < {folds} folds")
        idx = idx[rng.permutation(idx.shape[0])]
        out[idx] = np.arange(idx.shape[0]) % folds
    return out


def grid_search(kind: str, X: np.ndarray, y: np.ndarray, grid: list[dict],
                folds: int = 5, seed: int = 0, n_classes: int = 4):
    """Best grid point by mean CV weighted F1; ties keep the earlier point.

    Returns (best_params, results) where results holds the mean score per
    grid point in grid order.
    """
    from . import fit as fit_model

    if not grid:
        raise ValueError("empty hyperparameter grid")
    X = np.asarray(X, np.float64)
    y = np.asarray(y, np.int64)
    fold_id = stratified_folds(y, folds, seed)
    best_params = None
    best_score = -np.inf
    results = []
    for params in grid:
        scores = []
        for f in range(folds):
            tr = fold_id != f
            va = ~tr
            model = fit_model(kind, X[tr], y[tr], params=params, seed=seed,
                              n_classes=n_classes)
            cm = confusion_matrix(y[va], model.predict(X[va]), n_classes)
            scores.append(weighted_scores(cm)[3])
        mean = float(np.mean(scores))
        results.append({"params": params, "mean_f1": mean})
        if mean > best_score:
            best_score = mean
            best_params = params
    return best_params, results


def default_grid(kind: str, k_features: int) -> list[dict]:
    """Small conventional grids; desk-scale friendly."""
    if kind == "random_forest":
        return [{"n_trees": t, "max_depth": d}
                for t in (100, 300) for d in (None, 12)]
    if kind == "gbt":
        return [{"rounds": r, "learning_rate": lr, "max_depth": d}
                for r in (100, 300) for lr in (0.1, 0.3) for d in (3, 6)]
    if kind == "svc":
        return [{"C": c, "gamma": g}
                for c in (1.0, 10.0) for g in ("auto", "scale")]
    if kind == "logistic":
        return [{"l2": l2} for l2 in (0.01, 1.0)]
    if kind == "knn":
        return [{"k": k} for k in (3, 5, 11)]
    raise ValueError(f"unknown classifier kind {kind!r}")

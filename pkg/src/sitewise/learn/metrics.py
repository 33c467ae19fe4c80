"""Confusion-matrix metrics and one-vs-rest AUC.

Multiclass precision/recall/F1 use support-weighted averaging, which makes
accuracy equal weighted recall by construction. AUC uses the rank statistic
with ties counted half, averaged over the classes present in the test set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def confusion_matrix(y_true, y_pred, n_classes: int = 4) -> np.ndarray:
    """(C, C) counts; rows are true classes, columns predictions."""
    cm = np.zeros((n_classes, n_classes), np.int64)
    for t, p in zip(np.asarray(y_true, np.int64), np.asarray(y_pred, np.int64)):
        cm[t, p] += 1
    return cm


def binary_metrics(tp: float, fp: float, fn: float, tn: float):
    """(accuracy, precision, recall, f1) for one positive class."""
    total = tp + tn + fp + fn
    accuracy = (tp + tn) / total if total else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return accuracy, precision, recall, f1


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.shape[0])
    i = 0
    while i < scores.shape[0]:
        j = i
        while j + 1 < scores.shape[0] and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def binary_auc(labels: np.ndarray, scores: np.ndarray) -> float:
    """Mann-Whitney AUC: rank statistic with ties counted half."""
    labels = np.asarray(labels).astype(bool)
    scores = np.asarray(scores, np.float64)
    n_pos = int(labels.sum())
    n_neg = labels.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("binary AUC needs both classes present")
    ranks = _average_ranks(scores)
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0)
                 / (n_pos * n_neg))


def ovr_auc(y_true: np.ndarray, proba: np.ndarray,
            n_classes: int = 4) -> tuple[float, np.ndarray]:
    """Mean one-vs-rest AUC; classes absent from y_true are left nan."""
    y_true = np.asarray(y_true, np.int64)
    per_class = np.full(n_classes, np.nan)
    for c in range(n_classes):
        pos = y_true == c
        if 0 < pos.sum() < y_true.shape[0]:
            per_class[c] = binary_auc(pos, proba[:, c])
    defined = ~np.isnan(per_class)
    if not defined.any():
        raise ValueError("no class with both positives and negatives")
    return float(per_class[defined].mean()), per_class


@dataclass
class EvaluationReport:
    confusion: np.ndarray
    accuracy: float
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    per_class_accuracy: np.ndarray  # recall per class; nan where absent
    auc_ovr: float
    per_class_auc: np.ndarray
    n_test: int

    def to_dict(self) -> dict:
        def clean(arr):
            return [None if np.isnan(v) else float(v) for v in arr]

        return {"confusion": self.confusion.tolist(),
                "accuracy": self.accuracy,
                "precision_weighted": self.precision_weighted,
                "recall_weighted": self.recall_weighted,
                "f1_weighted": self.f1_weighted,
                "per_class_accuracy": clean(self.per_class_accuracy),
                "auc_ovr": self.auc_ovr,
                "per_class_auc": clean(self.per_class_auc),
                "n_test": self.n_test}

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        def arr(vals):
            return np.array([np.nan if v is None else v for v in vals])

        return cls(confusion=np.asarray(d["confusion"], np.int64),
                   accuracy=d["accuracy"],
                   precision_weighted=d["precision_weighted"],
                   recall_weighted=d["recall_weighted"],
                   f1_weighted=d["f1_weighted"],
                   per_class_accuracy=arr(d["per_class_accuracy"]),
                   auc_ovr=d["auc_ovr"],
                   per_class_auc=arr(d["per_class_auc"]),
                   n_test=d["n_test"])


def weighted_scores(cm: np.ndarray):
    """(accuracy, weighted precision, weighted recall, weighted F1)."""
    n = cm.sum()
    if n == 0:
        raise ValueError("empty test set")
    support = cm.sum(axis=1)
    predicted = cm.sum(axis=0)
    tp = np.diag(cm).astype(np.float64)
    accuracy = tp.sum() / n
    precision = np.zeros(cm.shape[0])
    recall = np.zeros(cm.shape[0])
    f1 = np.zeros(cm.shape[0])
    for c in range(cm.shape[0]):
        precision[c] = tp[c] / predicted[c] if predicted[c] else 0.0
        recall[c] = tp[c] / support[c] if support[c] else 0.0
        denom = precision[c] + recall[c]
        f1[c] = 2 * precision[c] * recall[c] / denom if denom else 0.0
    w = support / n
    return (float(accuracy), float((w * precision).sum()),
            float((w * recall).sum()), float((w * f1).sum()))


def evaluate(model, X_test: np.ndarray, y_test: np.ndarray) -> EvaluationReport:
    y_test = np.asarray(y_test, np.int64)
    if y_test.shape[0] == 0:
        raise ValueError("empty test set")
    n_classes = model.n_classes
    pred = model.predict(X_test)
    proba = model.predict_proba(X_test)
    cm = confusion_matrix(y_test, pred, n_classes)
    accuracy, precision_w, recall_w, f1_w = weighted_scores(cm)
    support = cm.sum(axis=1)
    per_class = np.full(n_classes, np.nan)
    for c in range(n_classes):
        if support[c]:
            per_class[c] = cm[c, c] / support[c]
    auc, per_auc = ovr_auc(y_test, proba, n_classes)
    return EvaluationReport(confusion=cm, accuracy=accuracy,
                            precision_weighted=precision_w,
                            recall_weighted=recall_w, f1_weighted=f1_w,
                            per_class_accuracy=per_class, auc_ovr=auc,
                            per_class_auc=per_auc, n_test=int(y_test.shape[0]))

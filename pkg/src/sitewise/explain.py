"""Exact Shapley attribution and the feature-selection battery.

The value function marginalizes interventionally over a background sample:
f(S) is the mean class probability over background rows with the explained
row's values substituted on S. Coalitions are enumerated exactly up to
K = 12 features; a seeded antithetic permutation estimator covers larger K.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .overlay import WeightVector

MAX_EXACT_FEATURES = 12


# ---------------------------------------------------------------------------
# Core Shapley machinery over coalition value tables
# ---------------------------------------------------------------------------

def coalition_weights(k: int) -> np.ndarray:
    """w[s] = s! (k - s - 1)! / k! for coalition sizes s = 0..k-1."""
    kf = math.factorial(k)
    return np.array([math.factorial(s) * math.factorial(k - s - 1) / kf
                     for s in range(k)])


def shapley_from_values(values: np.ndarray, k: int) -> np.ndarray:
    """Shapley vector from a (2^k,) table indexed by coalition bitmask."""
    if values.shape[0] != 1 << k:
        raise ValueError("value table must have 2^k entries")
    w = coalition_weights(k)
    sizes = np.array([bin(m).count("1") for m in range(1 << k)])
    phi = np.zeros(k)
    for i in range(k):
        bit = 1 << i
        without = np.nonzero((np.arange(1 << k) & bit) == 0)[0]
        gains = values[without | bit] - values[without]
        phi[i] = float((w[sizes[without]] * gains).sum())
    return phi


def shapley_permutation_oracle(value_fn, k: int) -> np.ndarray:
    """Mean marginal contribution over all k! orderings (test oracle)."""
    from itertools import permutations

    phi = np.zeros(k)
    count = 0
    for perm in permutations(range(k)):
        mask = 0
        prev = value_fn(mask)
        for i in perm:
            mask |= 1 << i
            cur = value_fn(mask)
            phi[i] += cur - prev
            prev = cur
        count += 1
    return phi / count


@dataclass
class ShapleyReport:
    feature_names: tuple[str, ...]
    classes: tuple[int, ...]
    sample_ids: np.ndarray        # (n,)
    values: np.ndarray            # (n, K, n_classes)
    base_values: np.ndarray       # (n_classes,) f(empty set)
    full_values: np.ndarray       # (n, n_classes) f(all features)

    def mean_abs(self) -> np.ndarray:
        """Per-feature mean |phi| over samples and classes."""
        return np.abs(self.values).mean(axis=(0, 2))

    def save(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_id", "class",
                        *self.feature_names, "base_value"])
            for i in range(self.values.shape[0]):
                for ci, c in enumerate(self.classes):
                    w.writerow([int(self.sample_ids[i]), int(c),
                                *(repr(float(v)) for v in self.values[i, :, ci]),
                                repr(float(self.base_values[ci]))])


def _coalition_value_table(model, x_row: np.ndarray, background: np.ndarray,
                           classes) -> np.ndarray:
    """(2^K, n_classes) interventional values for one explained row."""
    k = x_row.shape[0]
    n_bg = background.shape[0]
    n_masks = 1 << k
    # one background copy per coalition; coalition columns take the row's values
    hybrid = np.tile(background[None, :, :], (n_masks, 1, 1))
    for m in range(n_masks):
        for i in range(k):
            if m & (1 << i):
                hybrid[m, :, i] = x_row[i]
    proba = model.predict_proba(hybrid.reshape(n_masks * n_bg, k))
    proba = proba.reshape(n_masks, n_bg, -1)
    return proba.mean(axis=1)[:, list(classes)]


def exact_shapley(model, X_explain: np.ndarray, background: np.ndarray,
                  class_index: int | None = None,
                  sample_ids: np.ndarray | None = None,
                  feature_names=None) -> ShapleyReport:
    """Exact coalition-enumeration Shapley values for each explained row."""
    X_explain = np.atleast_2d(np.asarray(X_explain, np.float64))
    background = np.atleast_2d(np.asarray(background, np.float64))
    if background.shape[0] == 0:
        raise ValueError("background sample must be non-empty")
    k = X_explain.shape[1]
    if k > MAX_EXACT_FEATURES:
        raise ValueError(
            f"K={k} exceeds the exact enumeration limit "
            f"({MAX_EXACT_FEATURES}); subsample features or use "
            f"sampled_shapley")
    classes = (tuple(range(model.n_classes)) if class_index is None
               else (class_index,))
    n = X_explain.shape[0]
    values = np.empty((n, k, len(classes)))
    full = np.empty((n, len(classes)))
    base = None
    for i in range(n):
        table = _coalition_value_table(model, X_explain[i], background,
                                       classes)
        if base is None:
            base = table[0].copy()
        full[i] = table[-1]
        for ci in range(len(classes)):
            values[i, :, ci] = shapley_from_values(table[:, ci], k)
    if sample_ids is None:
        sample_ids = np.arange(n, dtype=np.int64)
    if feature_names is None:
        feature_names = tuple(f"f{j}" for j in range(k))
    return ShapleyReport(feature_names=tuple(feature_names), classes=classes,
                         sample_ids=np.asarray(sample_ids),
                         values=values, base_values=base, full_values=full)


def sampled_shapley(model, X_explain: np.ndarray, background: np.ndarray,
                    class_index: int, n_permutations: int = 128,
                    seed: int = 0):
    """Antithetic permutation-sampling estimate with standard errors."""
    X_explain = np.atleast_2d(np.asarray(X_explain, np.float64))
    background = np.atleast_2d(np.asarray(background, np.float64))
    k = X_explain.shape[1]
    rng = np.random.default_rng(seed)
    n = X_explain.shape[0]
    phi = np.zeros((n, k))
    phi_sq = np.zeros((n, k))
    draws = 0
    for _ in range(n_permutations // 2):
        perm = rng.permutation(k)
        for p in (perm, perm[::-1]):
            draws += 1
            for i in range(n):
                row = background.copy()
                prev = model.predict_proba(row)[:, class_index].mean()
                for j in p:
                    row[:, j] = X_explain[i, j]
                    cur = model.predict_proba(row)[:, class_index].mean()
                    phi[i, j] += cur - prev
                    phi_sq[i, j] += (cur - prev) ** 2
                    prev = cur
    mean = phi / draws
    var = phi_sq / draws - mean ** 2
    stderr = np.sqrt(np.maximum(var, 0.0) / draws)
    return mean, stderr


# ---------------------------------------------------------------------------
# SHAP-to-weight renormalization
# ---------------------------------------------------------------------------

def shap_to_weights(report: ShapleyReport, names=None) -> WeightVector:
    """Mean |phi| over samples and classes, normalized to sum to one."""
    names = tuple(names) if names is not None else report.feature_names
    mean_abs = report.mean_abs()
    total = mean_abs.sum()
    if total <= 0.0:
        raise ValueError("all attributions are zero; cannot form weights")
    return WeightVector(names, mean_abs / total)


def average_weights(vectors) -> WeightVector:
    """Cross-model average of per-model weight vectors."""
    vectors = list(vectors)
    names = vectors[0].names
    acc = np.zeros(len(names))
    for v in vectors:
        if v.names != names:
            raise ValueError("weight vectors disagree on criteria order")
        acc += v.weights
    return WeightVector(names, acc / len(vectors))


# ---------------------------------------------------------------------------
# Collinearity diagnostics
# ---------------------------------------------------------------------------

@dataclass
class CollinearityReport:
    feature_names: tuple[str, ...]
    correlation: np.ndarray   # (K, K) Pearson r
    vif: np.ndarray           # (K,) inf flags perfect collinearity
    tolerance: np.ndarray     # (K,) = 1 / VIF

    def save(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["feature", "vif", "tolerance",
                        *self.feature_names])
            for i, name in enumerate(self.feature_names):
                w.writerow([name, repr(float(self.vif[i])),
                            repr(float(self.tolerance[i])),
                            *(repr(float(v)) for v in self.correlation[i])])


def collinearity(features: np.ndarray, names=None) -> CollinearityReport:
    X = np.asarray(features, np.float64)
    n, k = X.shape
    if n < k + 2:
        raise ValueError(f"need at least K+2={k + 2} rows, got {n}")
    sd = X.std(axis=0)
    if (sd == 0).any():
        bad = int(np.nonzero(sd == 0)[0][0])
        raise ValueError(f"feature column {bad} is constant")
    corr = np.corrcoef(X, rowvar=False)
    vif = np.empty(k)
    tol = np.empty(k)
    for i in range(k):
        others = np.delete(X, i, axis=1)
        design = np.column_stack([np.ones(n), others])
        target = X[:, i]
        coef, *_ = np.linalg.lstsq(design, target, rcond=None)
        resid = target - design @ coef
        sst = ((target - target.mean()) ** 2).sum()
        r2 = 1.0 - (resid ** 2).sum() / sst
        one_minus = 1.0 - r2
        if one_minus < 1e-12:
            vif[i] = np.inf
            tol[i] = 0.0
        else:
            vif[i] = 1.0 / one_minus
            tol[i] = one_minus
    if names is None:
        names = tuple(f"f{j}" for j in range(k))
    return CollinearityReport(tuple(names), corr, vif, tol)


# ---------------------------------------------------------------------------
# Importance scores and pruning
# ---------------------------------------------------------------------------

def model_importance(model, X_test: np.ndarray, y_test: np.ndarray,
                     seed: int = 0, n_shuffles: int = 10) -> np.ndarray:
    """Per-feature scores: impurity decrease for trees, mean |coefficient|
    for the linear model, permutation importance otherwise."""
    if model.kind in ("random_forest", "gbt"):
        return model.importances_.copy()
    if model.kind == "logistic":
        scores = np.abs(model.coef_).mean(axis=0)
        total = scores.sum()
        return scores / total if total > 0 else scores
    return permutation_importance(model, X_test, y_test, seed=seed,
                                  n_shuffles=n_shuffles)


def permutation_importance(model, X: np.ndarray, y: np.ndarray, seed: int = 0,
                           n_shuffles: int = 10) -> np.ndarray:
    X = np.asarray(X, np.float64)
    y = np.asarray(y, np.int64)
    rng = np.random.default_rng(seed)
    base = (model.predict(X) == y).mean()
    k = X.shape[1]
    drops = np.zeros(k)
    for j in range(k):
        acc = 0.0
        for _ in range(n_shuffles):
            Xp = X.copy()
            Xp[:, j] = Xp[rng.permutation(X.shape[0]), j]
            acc += (model.predict(Xp) == y).mean()
        drops[j] = base - acc / n_shuffles
    return drops


def prune_features(importances: dict[str, np.ndarray], names,
                   threshold_frac: float = 0.25):
    """Drop features whose mean normalized importance falls below
    threshold_frac of the uniform share 1/K.

    Returns (retained names, dropped names, mean normalized scores).
    """
    names = tuple(names)
    k = len(names)
    rows = []
    for kind, scores in importances.items():
        s = np.maximum(np.asarray(scores, np.float64), 0.0)
        total = s.sum()
        rows.append(s / total if total > 0 else np.full(k, 1.0 / k))
    mean = np.mean(rows, axis=0)
    cutoff = threshold_frac / k
    keep = mean >= cutoff
    if not keep.any():
        raise ValueError("pruning policy would drop every feature")
    retained = tuple(n for n, kp in zip(names, keep) if kp)
    dropped = tuple(n for n, kp in zip(names, keep) if not kp)
    return retained, dropped, mean

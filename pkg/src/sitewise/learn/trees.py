"""Tree ensembles: bagged CART forests and Newton-step boosted trees.

The forest predicts by majority vote over per-tree class predictions; its
probabilities average the leaf class frequencies. Boosting fits one
regression tree per class per round against the softmax cross-entropy
gradient, with L2-regularized leaf values.
"""

from __future__ import annotations

import math

import numpy as np

from .. import _kernels


class _TreeArrays:
    __slots__ = ("feature", "threshold", "left", "right", "stats")

    def __init__(self, feature, threshold, left, right, stats):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.stats = stats

    def apply(self, X: np.ndarray) -> np.ndarray:
        return _kernels.tree_apply(self.feature, self.threshold, self.left,
                                   self.right, X)

    def to_state(self) -> dict:
        return {"feature": self.feature.tolist(),
                "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "stats": self.stats.tolist()}

    @classmethod
    def from_state(cls, s: dict) -> "_TreeArrays":
        return cls(np.asarray(s["feature"], np.int64),
                   np.asarray(s["threshold"], np.float64),
                   np.asarray(s["left"], np.int64),
                   np.asarray(s["right"], np.int64),
                   np.asarray(s["stats"], np.float64))


def _grow_classification_tree(X, y, rows, n_classes, max_depth, min_leaf,
                              mtry, feat_order, imp):
    m = rows.shape[0]
    max_nodes = 2 * m + 1
    feature = np.empty(max_nodes, np.int64)
    threshold = np.empty(max_nodes, np.float64)
    left = np.empty(max_nodes, np.int64)
    right = np.empty(max_nodes, np.int64)
    counts = np.empty((max_nodes, n_classes), np.float64)
    depth = -1 if max_depth is None else int(max_depth)
    n_nodes = _kernels.grow_gini(X, y, rows, n_classes, depth, min_leaf,
                                 mtry, feat_order, feature, threshold, left,
                                 right, counts, imp)
    return _TreeArrays(feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
                       left[:n_nodes].copy(), right[:n_nodes].copy(),
                       counts[:n_nodes].copy())


class RandomForest:
    """Bagged depth-limited CART trees with per-split feature subsampling."""

    kind = "random_forest"

    def __init__(self, n_trees: int = 200, max_depth: int | None = None,
                 max_features: str | int = "sqrt", min_leaf: int = 1,
                 n_classes: int = 4, seed: int = 0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.max_features = max_features
        self.min_leaf = min_leaf
        self.n_classes = n_classes
        self.seed = seed
        self.trees_: list[_TreeArrays] = []
        self.importances_ = None

    def get_params(self) -> dict:
        return {"n_trees": self.n_trees, "max_depth": self.max_depth,
                "max_features": self.max_features, "min_leaf": self.min_leaf}

    def _mtry(self, k: int) -> int:
        if self.max_features == "sqrt":
            return max(1, int(round(math.sqrt(k))))
        return max(1, min(int(self.max_features), k))

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForest":
        X = np.ascontiguousarray(X, np.float64)
        y = np.asarray(y, np.int64)
        n, k = X.shape
        mtry = self._mtry(k)
        rng = np.random.default_rng(self.seed)
        base = np.tile(np.arange(k, dtype=np.int32), (2 * n + 1, 1))
        # all randomness is drawn up front, so the thread count cannot
        # change the fitted forest
        draws = [(rng.integers(0, n, n), rng.permuted(base, axis=1))
                 for _ in range(self.n_trees)]
        imps = [np.zeros(k) for _ in range(self.n_trees)]

        def grow(t):
            rows, feat_order = draws[t]
            return _grow_classification_tree(
                X, y, rows, self.n_classes, self.max_depth, self.min_leaf,
                mtry, feat_order, imps[t])

        threads = _kernels.worker_threads()
        if threads > 1 and self.n_trees > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                self.trees_ = list(pool.map(grow, range(self.n_trees)))
        else:
            self.trees_ = [grow(t) for t in range(self.n_trees)]
        imp = np.sum(imps, axis=0)
        total = imp.sum()
        self.importances_ = imp / total if total > 0 else imp
        return self

    def _tree_votes(self, X: np.ndarray) -> np.ndarray:
        """(n_trees, n_rows) per-tree class predictions."""
        votes = np.empty((len(self.trees_), X.shape[0]), np.int64)
        for t, tree in enumerate(self.trees_):
            leaves = tree.apply(X)
            votes[t] = np.argmax(tree.stats[leaves], axis=1)
        return votes

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, np.float64)
        votes = self._tree_votes(X)
        out = np.empty(X.shape[0], np.int64)
        for i in range(X.shape[0]):
            out[i] = np.argmax(np.bincount(votes[:, i],
                                           minlength=self.n_classes))
        return out

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, np.float64)
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees_:
            leaf_counts = tree.stats[tree.apply(X)]
            acc += leaf_counts / leaf_counts.sum(axis=1, keepdims=True)
        return acc / len(self.trees_)

    def to_state(self) -> dict:
        return {"params": self.get_params(), "seed": self.seed,
                "n_classes": self.n_classes,
                "trees": [t.to_state() for t in self.trees_],
                "importances": self.importances_.tolist()}

    @classmethod
    def from_state(cls, s: dict) -> "RandomForest":
        model = cls(seed=s["seed"], n_classes=s["n_classes"], **s["params"])
        model.trees_ = [_TreeArrays.from_state(t) for t in s["trees"]]
        model.importances_ = np.asarray(s["importances"], np.float64)
        return model


def _softmax(F: np.ndarray) -> np.ndarray:
    z = F - F.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class GradientBoosting:
    """Stagewise additive trees minimizing softmax cross-entropy."""

    kind = "gbt"

    def __init__(self, rounds: int = 150, learning_rate: float = 0.1,
                 max_depth: int = 3, reg_lambda: float = 1.0,
                 min_leaf: int = 1, n_classes: int = 4, seed: int = 0):
        self.rounds = rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.min_leaf = min_leaf
        self.n_classes = n_classes
        self.seed = seed
        self.base_score_ = None
        self.trees_: list[list[_TreeArrays]] = []
        self.importances_ = None

    def get_params(self) -> dict:
        return {"rounds": self.rounds, "learning_rate": self.learning_rate,
                "max_depth": self.max_depth, "reg_lambda": self.reg_lambda,
                "min_leaf": self.min_leaf}

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GradientBoosting":
        X = np.ascontiguousarray(X, np.float64)
        y = np.asarray(y, np.int64)
        n, k = X.shape
        C = self.n_classes
        onehot = np.zeros((n, C))
        onehot[np.arange(n), y] = 1.0
        prior = onehot.mean(axis=0)
        self.base_score_ = np.log(np.maximum(prior, 1e-12))
        F = np.tile(self.base_score_, (n, 1))
        imp = np.zeros(k)
        max_nodes = 2 * n + 1
        self.trees_ = []
        for _ in range(self.rounds):
            P = _softmax(F)
            round_trees = []
            for c in range(C):
                g = P[:, c] - onehot[:, c]
                h = P[:, c] * (1.0 - P[:, c])
                feature = np.empty(max_nodes, np.int64)
                threshold = np.empty(max_nodes, np.float64)
                left = np.empty(max_nodes, np.int64)
                right = np.empty(max_nodes, np.int64)
                value = np.empty(max_nodes, np.float64)
                n_nodes = _kernels.grow_newton(
                    X, g, h, self.reg_lambda, self.max_depth, self.min_leaf,
                    1e-12, feature, threshold, left, right, value, imp)
                tree = _TreeArrays(feature[:n_nodes].copy(),
                                   threshold[:n_nodes].copy(),
                                   left[:n_nodes].copy(),
                                   right[:n_nodes].copy(),
                                   value[:n_nodes].copy())
                F[:, c] += self.learning_rate * tree.stats[tree.apply(X)]
                round_trees.append(tree)
            self.trees_.append(round_trees)
        total = imp.sum()
        self.importances_ = imp / total if total > 0 else imp
        return self

    def _raw(self, X: np.ndarray) -> np.ndarray:
        F = np.tile(self.base_score_, (X.shape[0], 1))
        for round_trees in self.trees_:
            for c, tree in enumerate(round_trees):
                F[:, c] += self.learning_rate * tree.stats[tree.apply(X)]
        return F

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _softmax(self._raw(np.ascontiguousarray(X, np.float64)))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_state(self) -> dict:
        return {"params": self.get_params(), "seed": self.seed,
                "n_classes": self.n_classes,
                "base_score": self.base_score_.tolist(),
                "trees": [[t.to_state() for t in rt] for rt in self.trees_],
                "importances": self.importances_.tolist()}

    @classmethod
    def from_state(cls, s: dict) -> "GradientBoosting":
        model = cls(seed=s["seed"], n_classes=s["n_classes"], **s["params"])
        model.base_score_ = np.asarray(s["base_score"], np.float64)
        model.trees_ = [[_TreeArrays.from_state(t) for t in rt]
                        for rt in s["trees"]]
        model.importances_ = np.asarray(s["importances"], np.float64)
        return model

"""K-nearest-neighbors classifier over stored exemplars."""

from __future__ import annotations

import numpy as np


class KnnClassifier:
    """Mode of the k nearest training labels.

    Vote ties break toward the class with the smaller summed neighbor
    distance, then the smaller class index. Neighbor order itself is made
    deterministic by a stable sort on distance (train index breaks exact
    distance ties).
    """

    kind = "knn"

    def __init__(self, k: int = 5, n_classes: int = 4, seed: int = 0):
        self.k = k
        self.n_classes = n_classes
        self.seed = seed
        self.X_ = None
        self.y_ = None

    def get_params(self) -> dict:
        return {"k": self.k}

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnClassifier":
        X = np.asarray(X, np.float64)
        if self.k > X.shape[0]:
            raise ValueError(f"k={self.k} exceeds {X.shape[0]} training rows")
        self.X_ = X
        self.y_ = np.asarray(y, np.int64)
        return self

    def _neighbors(self, X: np.ndarray):
        """(m, k) neighbor indices and distances, processed in row blocks.

        argpartition narrows to the k smallest, then a local sort by
        (distance, train index) fixes a deterministic order.
        """
        m = X.shape[0]
        n = self.X_.shape[0]
        idx = np.empty((m, self.k), np.int64)
        dist = np.empty((m, self.k))
        block = 256
        xx = (self.X_ * self.X_).sum(axis=1)[None, :]
        for lo in range(0, m, block):
            hi = min(lo + block, m)
            q = X[lo:hi]
            d2 = (q * q).sum(axis=1)[:, None] + xx - 2.0 * q @ self.X_.T
            np.maximum(d2, 0.0, out=d2)
            if self.k < n:
                part = np.argpartition(d2, self.k - 1, axis=1)[:, :self.k]
            else:
                part = np.tile(np.arange(n), (hi - lo, 1))
            pd = np.take_along_axis(d2, part, axis=1)
            for i in range(hi - lo):
                local = np.lexsort((part[i], pd[i]))
                idx[lo + i] = part[i][local]
                dist[lo + i] = pd[i][local]
        return idx, np.sqrt(dist)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, np.float64)
        idx, dist = self._neighbors(X)
        out = np.empty(X.shape[0], np.int64)
        for i in range(X.shape[0]):
            labels = self.y_[idx[i]]
            votes = np.bincount(labels, minlength=self.n_classes)
            top = votes.max()
            tied = np.nonzero(votes == top)[0]
            if tied.shape[0] == 1:
                out[i] = tied[0]
                continue
            sums = np.array([dist[i][labels == c].sum() for c in tied])
            out[i] = tied[np.argmin(sums)]
        return out

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, np.float64)
        idx, _ = self._neighbors(X)
        out = np.empty((X.shape[0], self.n_classes))
        for i in range(X.shape[0]):
            out[i] = np.bincount(self.y_[idx[i]],
                                 minlength=self.n_classes) / self.k
        return out

    def to_state(self) -> dict:
        return {"params": self.get_params(), "seed": self.seed,
                "n_classes": self.n_classes, "X": self.X_.tolist(),
                "y": self.y_.tolist()}

    @classmethod
    def from_state(cls, s: dict) -> "KnnClassifier":
        model = cls(seed=s["seed"], n_classes=s["n_classes"], **s["params"])
        model.X_ = np.asarray(s["X"], np.float64)
        model.y_ = np.asarray(s["y"], np.int64)
        return model

"""One-vs-rest linear and kernel classifiers.

Logistic regression trains each binary sigmoid model by full-batch gradient
descent with L2 penalty. The SVC solves one box-constrained dual per class
by cyclic coordinate ascent with the bias folded into an RBF-plus-one
kernel; probabilities are a softmax over decision values (uncalibrated).
"""

from __future__ import annotations

import numpy as np

from .. import _kernels


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    aa = (A * A).sum(axis=1)[:, None]
    bb = (B * B).sum(axis=1)[None, :]
    d2 = aa + bb - 2.0 * A @ B.T
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma * d2)


class LogisticRegressionOvR:
    kind = "logistic"

    def __init__(self, l2: float = 0.01, lr: float = 0.3, iters: int = 600,
                 n_classes: int = 4, seed: int = 0):
        self.l2 = l2
        self.lr = lr
        self.iters = iters
        self.n_classes = n_classes
        self.seed = seed
        self.coef_ = None       # (C, K)
        self.intercept_ = None  # (C,)

    def get_params(self) -> dict:
        return {"l2": self.l2, "lr": self.lr, "iters": self.iters}

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LogisticRegressionOvR":
        X = np.asarray(X, np.float64)
        y = np.asarray(y, np.int64)
        n, k = X.shape
        self.coef_ = np.zeros((self.n_classes, k))
        self.intercept_ = np.zeros(self.n_classes)
        for c in range(self.n_classes):
            t = (y == c).astype(np.float64)
            w = np.zeros(k)
            b = 0.0
            for _ in range(self.iters):
                p = 1.0 / (1.0 + np.exp(-(X @ w + b)))
                err = p - t
                grad_w = X.T @ err / n + self.l2 * w
                grad_b = err.mean()
                w -= self.lr * grad_w
                b -= self.lr * grad_b
            self.coef_[c] = w
            self.intercept_[c] = b
        return self

    def ovr_probabilities(self, X: np.ndarray) -> np.ndarray:
        """Per-class raw sigmoid outputs (columns do not sum to 1)."""
        z = np.asarray(X, np.float64) @ self.coef_.T + self.intercept_
        return 1.0 / (1.0 + np.exp(-z))

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        p = self.ovr_probabilities(X)
        return p / p.sum(axis=1, keepdims=True)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.ovr_probabilities(X), axis=1)

    def to_state(self) -> dict:
        return {"params": self.get_params(), "seed": self.seed,
                "n_classes": self.n_classes, "coef": self.coef_.tolist(),
                "intercept": self.intercept_.tolist()}

    @classmethod
    def from_state(cls, s: dict) -> "LogisticRegressionOvR":
        model = cls(seed=s["seed"], n_classes=s["n_classes"], **s["params"])
        model.coef_ = np.asarray(s["coef"], np.float64)
        model.intercept_ = np.asarray(s["intercept"], np.float64)
        return model


class RbfSvc:
    kind = "svc"

    def __init__(self, C: float = 1.0, gamma: str | float = "scale",
                 epochs: int = 60, tol: float = 1e-6, n_classes: int = 4,
                 seed: int = 0):
        self.C = C
        self.gamma = gamma
        self.epochs = epochs
        self.tol = tol
        self.n_classes = n_classes
        self.seed = seed
        self.gamma_ = None
        self.X_ = None
        self.dual_ = None  # (C, n) alpha_i * y_i per class

    def get_params(self) -> dict:
        return {"C": self.C, "gamma": self.gamma, "epochs": self.epochs,
                "tol": self.tol}

    def _resolve_gamma(self, X: np.ndarray) -> float:
        if isinstance(self.gamma, (int, float)):
            return float(self.gamma)
        k = X.shape[1]
        if self.gamma == "auto":
            return 1.0 / k
        if self.gamma == "scale":
            var = X.var()
            return 1.0 / (k * var) if var > 0 else 1.0 / k
        raise ValueError(f"unknown gamma {self.gamma!r}")

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RbfSvc":
        X = np.ascontiguousarray(X, np.float64)
        y = np.asarray(y, np.int64)
        self.gamma_ = self._resolve_gamma(X)
        K = rbf_kernel(X, X, self.gamma_) + 1.0  # +1 folds in the bias
        dual = np.zeros((self.n_classes, X.shape[0]))
        for c in range(self.n_classes):
            t = np.where(y == c, 1.0, -1.0)
            alpha = _kernels.svc_dual(K, t, self.C, self.epochs, self.tol)
            dual[c] = np.asarray(alpha) * t
        # zero-coefficient rows contribute nothing; keep support vectors only
        sv = np.any(dual != 0.0, axis=0)
        self.X_ = X[sv].copy()
        self.dual_ = dual[:, sv].copy()
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        G = rbf_kernel(np.ascontiguousarray(X, np.float64), self.X_,
                       self.gamma_) + 1.0
        return G @ self.dual_.T

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        d = self.decision_function(X)
        z = d - d.max(axis=1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=1, keepdims=True)

    def to_state(self) -> dict:
        return {"params": self.get_params(), "seed": self.seed,
                "n_classes": self.n_classes, "gamma_value": self.gamma_,
                "X": self.X_.tolist(), "dual": self.dual_.tolist()}

    @classmethod
    def from_state(cls, s: dict) -> "RbfSvc":
        model = cls(seed=s["seed"], n_classes=s["n_classes"], **s["params"])
        model.gamma_ = float(s["gamma_value"])
        model.X_ = np.asarray(s["X"], np.float64)
        model.dual_ = np.asarray(s["dual"], np.float64)
        return model

"""Standard scaling fitted on training rows only."""

from __future__ import annotations

import numpy as np


class StandardScaler:
    """Column-wise (x - mean) / sd with parameters from the fit split.

    Constant columns scale by 1 so they pass through centered instead of
    dividing by zero.
    """

    def __init__(self):
        self.mean_ = None
        self.scale_ = None

    def fit(self, X: np.ndarray) -> "StandardScaler":
        X = np.asarray(X, np.float64)
        self.mean_ = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0.0] = 1.0
        self.scale_ = sd
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if self.mean_ is None:
            raise ValueError("scaler is not fitted")
        return (np.asarray(X, np.float64) - self.mean_) / self.scale_

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        return self.fit(X).transform(X)

    def to_state(self) -> dict:
        return {"mean": self.mean_.tolist(), "scale": self.scale_.tolist()}

    @classmethod
    def from_state(cls, state: dict) -> "StandardScaler":
        sc = cls()
        sc.mean_ = np.asarray(state["mean"], np.float64)
        sc.scale_ = np.asarray(state["scale"], np.float64)
        return sc

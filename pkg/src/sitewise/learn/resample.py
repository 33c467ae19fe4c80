"""SMOTE oversampling followed by edited-nearest-neighbor cleaning.

SMOTE lifts every minority class up to the majority count with synthetic
points x + lam * (x_nn - x) interpolated toward same-class neighbors. ENN
then drops any row whose label disagrees with a strict majority of its
k nearest neighbors (ties keep the row). Apply to the training split only.
"""

from __future__ import annotations

import numpy as np


def _block_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    aa = (A * A).sum(axis=1)[:, None]
    bb = (B * B).sum(axis=1)[None, :]
    d2 = aa + bb - 2.0 * A @ B.T
    np.maximum(d2, 0.0, out=d2)
    return d2


def _same_class_neighbors(Xc: np.ndarray, k: int) -> np.ndarray:
    """(n_c, k) indices of each row's k nearest same-class neighbors."""
    d2 = _block_distances(Xc, Xc)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, :k]


def smote(X: np.ndarray, y: np.ndarray, k_smote: int = 5, seed: int = 0):
    """Oversample every minority class up to the majority class count."""
    X = np.asarray(X, np.float64)
    y = np.asarray(y, np.int64)
    classes, counts = np.unique(y, return_counts=True)
    for c, n_c in zip(classes, counts):
        if n_c < 2:
            raise ValueError(f"class {int(c)} has fewer than 2 rows")
    target = counts.max()
    rng = np.random.default_rng(seed)
    new_X = [X]
    new_y = [y]
    for c, n_c in zip(classes, counts):
        need = int(target - n_c)
        if need == 0:
            continue
        rows = np.nonzero(y == c)[0]
        Xc = X[rows]
        k_eff = min(k_smote, n_c - 1)
        nn = _same_class_neighbors(Xc, k_eff)
        base = rng.integers(0, n_c, need)
        pick = rng.integers(0, k_eff, need)
        lam = rng.random(need)
        anchor = Xc[base]
        neighbor = Xc[nn[base, pick]]
        new_X.append(anchor + lam[:, None] * (neighbor - anchor))
        new_y.append(np.full(need, c, np.int64))
    return np.concatenate(new_X), np.concatenate(new_y)


def enn_filter(X: np.ndarray, y: np.ndarray, k_enn: int = 3,
               n_classes: int = 4) -> np.ndarray:
    """Keep-mask: drop rows out-voted by a strict neighbor majority."""
    n = X.shape[0]
    keep = np.ones(n, bool)
    block = 512
    k = min(k_enn, n - 1)
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        d2 = _block_distances(X[lo:hi], X)
        for i in range(hi - lo):
            d2[i, lo + i] = np.inf
        part = np.argpartition(d2, k - 1, axis=1)[:, :k]
        for i in range(hi - lo):
            votes = np.bincount(y[part[i]], minlength=n_classes)
            top = votes.max()
            winners = np.nonzero(votes == top)[0]
            if winners.shape[0] == 1 and winners[0] != y[lo + i]:
                keep[lo + i] = False
    return keep


def smote_enn(X: np.ndarray, y: np.ndarray, k_smote: int = 5, k_enn: int = 3,
              seed: int = 0, n_classes: int = 4):
    Xs, ys = smote(X, y, k_smote=k_smote, seed=seed)
    keep = enn_filter(Xs, ys, k_enn=k_enn, n_classes=n_classes)
    return Xs[keep], ys[keep]

"""Weighted-sum suitability rasters, four-class breaks, and point sampling.

Class conventions everywhere: 0 = not suitable, 1 = somewhat suitable,
2 = suitable, 3 = highly suitable. Ties at a break go to the lower class;
the top interval is closed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .criteria import CriteriaSet
from .geocore import RasterLayer

CLASS_NAMES = ("not", "somewhat", "suitable", "highly")
N_CLASSES = 4

TRAIN, TEST, UNSPLIT = 0, 1, -1
_SPLIT_TAGS = {TRAIN: "train", TEST: "test", UNSPLIT: ""}
_SPLIT_CODES = {v: k for k, v in _SPLIT_TAGS.items()}


@dataclass(frozen=True)
class WeightVector:
    names: tuple[str, ...]
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        w = np.asarray(self.weights, np.float64)
        if w.shape != (len(self.names),):
            raise ValueError("one weight per criterion required")
        if (w < 0).any():
            raise ValueError("weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1 (got {w.sum()!r})")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def equal(cls, names) -> "WeightVector":
        names = tuple(names)
        return cls(names, np.full(len(names), 1.0 / len(names)))

    @classmethod
    def from_mapping(cls, names, mapping) -> "WeightVector":
        return cls(tuple(names), np.array([mapping[n] for n in names]))

    def as_dict(self) -> dict[str, float]:
        return {n: float(w) for n, w in zip(self.names, self.weights)}

    def save(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["criterion", "weight"])
            for name, wt in zip(self.names, self.weights):
                w.writerow([name, repr(float(wt))])

    @classmethod
    def load(cls, path: str | Path) -> "WeightVector":
        names, weights = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                names.append(row["criterion"])
                weights.append(float(row["weight"]))
        return cls(tuple(names), np.array(weights))


@dataclass(frozen=True)
class SuitabilityMap:
    score: RasterLayer
    klass: RasterLayer | None = None
    breaks: tuple[float, float, float] | None = None
    method: str | None = None  # "equal" | "jenks"

    def classified(self) -> "SuitabilityMap":
        if self.klass is None:
            raise ValueError("map has no class raster; call classify_map first")
        return self


@dataclass(frozen=True)
class SampleSet:
    ids: np.ndarray          # (n,) int
    x: np.ndarray            # (n,) cell-center x
    y: np.ndarray            # (n,) cell-center y
    rows: np.ndarray         # (n,) raster row
    cols: np.ndarray         # (n,) raster col
    names: tuple[str, ...]
    features: np.ndarray     # (n, K)
    score: np.ndarray        # (n,)
    label: np.ndarray        # (n,) int in {0..3}
    split: np.ndarray        # (n,) int8: 0 train, 1 test, -1 unassigned

    @property
    def n(self) -> int:
        return int(self.ids.shape[0])

    def subset(self, mask: np.ndarray) -> "SampleSet":
        return SampleSet(self.ids[mask], self.x[mask], self.y[mask],
                         self.rows[mask], self.cols[mask], self.names,
                         self.features[mask], self.score[mask],
                         self.label[mask], self.split[mask])

    def train(self) -> "SampleSet":
        return self.subset(self.split == TRAIN)

    def test(self) -> "SampleSet":
        return self.subset(self.split == TEST)

    def save(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["id", "x", "y", *self.names, "score", "label", "split"])
            for i in range(self.n):
                w.writerow([int(self.ids[i]), repr(float(self.x[i])),
                            repr(float(self.y[i])),
                            *(repr(float(v)) for v in self.features[i]),
                            repr(float(self.score[i])), int(self.label[i]),
                            _SPLIT_TAGS[int(self.split[i])]])

    @classmethod
    def load(cls, path: str | Path, header=None) -> "SampleSet":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            head = next(reader)
            names = tuple(head[3:-3])
            rows = list(reader)
        n = len(rows)
        ids = np.empty(n, np.int64)
        xs = np.empty(n)
        ys = np.empty(n)
        feats = np.empty((n, len(names)))
        score = np.empty(n)
        label = np.empty(n, np.int64)
        split = np.empty(n, np.int8)
        for i, row in enumerate(rows):
            ids[i] = int(row[0])
            xs[i] = float(row[1])
            ys[i] = float(row[2])
            feats[i] = [float(v) for v in row[3:-3]]
            score[i] = float(row[-3])
            label[i] = int(row[-2])
            split[i] = _SPLIT_CODES[row[-1]]
        if header is not None:
            rr = np.empty(n, np.int64)
            cc = np.empty(n, np.int64)
            for i in range(n):
                rc = header.point_to_cell(xs[i], ys[i])
                rr[i], cc[i] = rc
        else:
            rr = np.full(n, -1, np.int64)
            cc = np.full(n, -1, np.int64)
        return cls(ids, xs, ys, rr, cc, names, feats, score, label, split)


# ---------------------------------------------------------------------------
# Weighted sum (cell-wise linear overlay)
# ---------------------------------------------------------------------------

def weighted_sum(criteria: CriteriaSet, w: WeightVector) -> SuitabilityMap:
    if w.names != criteria.names:
        raise ValueError(
            f"weight order {w.names} does not match criteria {criteria.names}")
    hdr = criteria.header
    acc = np.zeros((hdr.nrows, hdr.ncols))
    nodata = np.zeros((hdr.nrows, hdr.ncols), bool)
    for wt, layer in zip(w.weights, criteria.layers):
        nodata |= layer.nodata_mask()
        acc += wt * layer.cells
    acc[nodata] = hdr.nodata
    return SuitabilityMap(score=RasterLayer("score", hdr, acc))


# ---------------------------------------------------------------------------
# Breaks
# ---------------------------------------------------------------------------

def equal_interval_breaks(scores, full_range: tuple[float, float] | None = None):
    """Three breaks splitting [min, max] into four equal intervals."""
    scores = np.asarray(scores, np.float64)
    if full_range is not None:
        lo, hi = full_range
    else:
        if scores.size < 2:
            raise ValueError("need at least two scores")
        lo, hi = float(scores.min()), float(scores.max())
    if hi <= lo:
        raise ValueError("zero score range")
    step = (hi - lo) / 4.0
    return (lo + step, lo + 2 * step, lo + 3 * step)


def jenks_breaks(scores, n_classes: int = N_CLASSES):
    """Exact Fisher-Jenks natural breaks (upper value of each lower class)."""
    breaks, _ = jenks_partition(scores, n_classes)
    return breaks


def jenks_partition(scores, n_classes: int = N_CLASSES):
    """Breaks plus the optimal within-class sum of squared deviations."""
    values = np.sort(np.asarray(scores, np.float64))
    if np.unique(values).size < n_classes:
        raise ValueError(
            f"need >= {n_classes} distinct values for {n_classes} classes")
    bounds, objective = _kernels.jenks_dp(values, n_classes)
    breaks = tuple(float(values[b]) for b in np.asarray(bounds))
    return breaks, float(objective)


def classify_values(values: np.ndarray, breaks) -> np.ndarray:
    b1, b2, b3 = breaks
    return np.where(values <= b1, 0,
                    np.where(values <= b2, 1, np.where(values <= b3, 2, 3)))


def classify_map(m: SuitabilityMap, breaks, method: str) -> SuitabilityMap:
    score = m.score
    klass = classify_values(score.cells, breaks).astype(np.float64)
    klass[score.nodata_mask()] = score.header.nodata
    return SuitabilityMap(score=score,
                          klass=RasterLayer("class", score.header, klass),
                          breaks=tuple(float(b) for b in breaks),
                          method=method)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_points(m: SuitabilityMap, criteria: CriteriaSet, n: int, seed: int,
                  breaks=None, method: str = "equal") -> SampleSet:
    """Draw n distinct non-nodata cells uniformly; label with the breaks.

    When breaks is None, equal-interval breaks are computed from the sampled
    scores themselves.
    """
    score = m.score
    live_r, live_c = np.nonzero(~score.nodata_mask())
    if n > live_r.shape[0]:
        raise ValueError(f"requested {n} samples but only "
                         f"{live_r.shape[0]} non-nodata cells exist")
    rng = np.random.default_rng(seed)
    pick = rng.choice(live_r.shape[0], size=n, replace=False)
    rows = live_r[pick]
    cols = live_c[pick]
    return _build_samples(m, criteria, rows, cols, breaks, method)


def _build_samples(m, criteria, rows, cols, breaks, method) -> SampleSet:
    score_vals = m.score.cells[rows, cols]
    if breaks is None:
        breaks = equal_interval_breaks(score_vals)
    labels = classify_values(score_vals, breaks)
    hdr = m.score.header
    xs = hdr.xll + (cols + 0.5) * hdr.cellsize
    ys = hdr.yll + (hdr.nrows - rows - 0.5) * hdr.cellsize
    n = rows.shape[0]
    return SampleSet(ids=np.arange(n, dtype=np.int64), x=xs, y=ys,
                     rows=rows.astype(np.int64), cols=cols.astype(np.int64),
                     names=criteria.names,
                     features=criteria.features_at(rows, cols),
                     score=score_vals, label=labels.astype(np.int64),
                     split=np.full(n, UNSPLIT, np.int8))


def top_up(m: SuitabilityMap, criteria: CriteriaSet, samples: SampleSet,
           n_extra: int, seed: int) -> SampleSet:
    """Draw extra points aimed at the under-represented classes.

    Labels of unsampled cells are provisionally read with the existing
    breaks; extra draws come from cells of every class below the current
    maximum class count. The merged set is relabeled with its own breaks.
    """
    if n_extra <= 0:
        return samples
    score = m.score
    breaks = equal_interval_breaks(samples.score)
    counts = np.bincount(samples.label, minlength=N_CLASSES)
    lagging = np.nonzero(counts < counts.max())[0]
    if lagging.size == 0:
        return samples

    live = ~score.nodata_mask()
    taken = np.zeros_like(live)
    taken[samples.rows, samples.cols] = True
    cand_r, cand_c = np.nonzero(live & ~taken)
    cand_labels = classify_values(score.cells[cand_r, cand_c], breaks)
    pool = np.isin(cand_labels, lagging)
    pool_idx = np.nonzero(pool)[0]
    rng = np.random.default_rng(seed)
    take = min(n_extra, pool_idx.shape[0])
    pick = rng.choice(pool_idx.shape[0], size=take, replace=False)
    rows = np.concatenate([samples.rows, cand_r[pool_idx[pick]]])
    cols = np.concatenate([samples.cols, cand_c[pool_idx[pick]]])
    return _build_samples(m, criteria, rows, cols, None, "equal")


def relabel(samples: SampleSet, breaks) -> SampleSet:
    labels = classify_values(samples.score, breaks).astype(np.int64)
    return replace(samples, label=labels)


def split(samples: SampleSet, train_frac: float = 0.8, seed: int = 0) -> SampleSet:
    """Stratified train/test split; per-class train fraction within one row."""
    if samples.n < 5:
        raise ValueError("need at least 5 rows to split")
    rng = np.random.default_rng(seed)
    tags = np.full(samples.n, UNSPLIT, np.int8)
    for c in np.unique(samples.label):
        idx = np.nonzero(samples.label == c)[0]
        if idx.shape[0] < 2:
            raise ValueError(f"class {int(c)} has fewer than 2 rows")
        idx = idx[rng.permutation(idx.shape[0])]
        n_train = int(round(train_frac * idx.shape[0]))
        n_train = min(max(n_train, 1), idx.shape[0] - 1)
        tags[idx[:n_train]] = TRAIN
        tags[idx[n_train:]] = TEST
    return replace(samples, split=tags)

"""Normalized per-criterion suitability rasters.

Raw layers become [0,1] rasters through one of three routes: an exact
Euclidean distance transform followed by band reclassification, a direct
band reclassification, or continuous min-max normalization. Band scores use
the fixed four-step ladder {1.0, 2/3, 1/3, 0.0}.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .geocore import GridHeader, RasterLayer

BAND_SCORES = (1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0)  # highly, suitable, somewhat, not

LOWER_IS_BETTER = "lower"
HIGHER_IS_BETTER = "higher"

# Canonical criterion order and normalization directions for the stock
# seven-criterion setup (distance layers fall, rate layers rise except
# precipitation).
CANONICAL_CRITERIA = (
    ("road_distance", LOWER_IS_BETTER),
    ("rail_distance", LOWER_IS_BETTER),
    ("urban_distance", LOWER_IS_BETTER),
    ("unemployment_rate", HIGHER_IS_BETTER),
    ("market_revenue", HIGHER_IS_BETTER),
    ("sdr", HIGHER_IS_BETTER),
    ("precipitation", LOWER_IS_BETTER),
)


@dataclass(frozen=True)
class BandRule:
    criterion: str
    direction: str
    breakpoints: tuple[float, float, float]

    def __post_init__(self):
        if self.direction not in (LOWER_IS_BETTER, HIGHER_IS_BETTER):
            raise ValueError(f"unknown direction {self.direction!r}")
        b1, b2, b3 = self.breakpoints
        if not (b1 < b2 < b3):
            raise ValueError("breakpoints must be strictly ascending")


@dataclass(frozen=True)
class ContinuousRule:
    criterion: str
    direction: str

    def __post_init__(self):
        if self.direction not in (LOWER_IS_BETTER, HIGHER_IS_BETTER):
            raise ValueError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class CriteriaSet:
    names: tuple[str, ...]
    layers: tuple[RasterLayer, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(self.names) != len(self.layers) or not self.names:
            raise ValueError("criteria set needs one layer per name, K >= 1")
        hdr = self.layers[0].header
        for layer in self.layers[1:]:
            if layer.header != hdr:
                raise ValueError("criteria layers must share one grid header")
        for name, layer in zip(self.names, self.layers):
            live = layer.cells[layer.cells != hdr.nodata]
            if live.size and (live.min() < -1e-12 or live.max() > 1 + 1e-12):
                raise ValueError(f"criterion {name!r} has values outside [0,1]")

    @property
    def header(self) -> GridHeader:
        return self.layers[0].header

    @property
    def k(self) -> int:
        return len(self.names)

    def layer(self, name: str) -> RasterLayer:
        return self.layers[self.names.index(name)]

    def replace_layer(self, name: str, layer: RasterLayer) -> "CriteriaSet":
        i = self.names.index(name)
        layers = list(self.layers)
        layers[i] = layer
        return CriteriaSet(self.names, tuple(layers))

    def features_at(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """(n, K) feature matrix read from the layers at the given cells."""
        out = np.empty((rows.shape[0], self.k))
        for j, layer in enumerate(self.layers):
            out[:, j] = layer.cells[rows, cols]
        return out


def distance_transform(mask: RasterLayer) -> RasterLayer:
    """Exact Euclidean distance (in distance units) to the nearest 1-cell."""
    src = mask.cells == 1.0
    if not src.any():
        raise ValueError("distance transform needs at least one source cell")
    d = np.sqrt(_kernels.edt_sq(src.astype(np.uint8)))
    return RasterLayer(f"{mask.name}_dist", mask.header,
                       d * mask.header.cellsize)


def reclassify(raw: RasterLayer, rule: BandRule) -> RasterLayer:
    """Band reclassification; intervals half-open at their upper breakpoints.

    lower-is-better: v <= b1 -> 1.0; b1 < v <= b2 -> 2/3; b2 < v <= b3 -> 1/3;
    v > b3 -> 0.0. Mirrored for higher-is-better. nodata passes through.
    """
    b1, b2, b3 = rule.breakpoints
    v = raw.cells
    band = np.where(v <= b1, 0, np.where(v <= b2, 1, np.where(v <= b3, 2, 3)))
    scores = np.asarray(BAND_SCORES)
    if rule.direction == HIGHER_IS_BETTER:
        scores = scores[::-1]
    out = scores[band]
    nodata = raw.nodata_mask()
    out[nodata] = raw.header.nodata
    return RasterLayer(rule.criterion, raw.header, out)


def reclassify_categories(raw: RasterLayer, category_band: dict[int, int]) -> RasterLayer:
    """Map integer category codes to bands 0..3 (0 = highly suitable)."""
    out = np.full_like(raw.cells, raw.header.nodata)
    scores = np.asarray(BAND_SCORES)
    live = ~raw.nodata_mask()
    codes = raw.cells[live].astype(np.int64)
    bands = np.empty(codes.shape[0], np.int64)
    for i, code in enumerate(codes):
        try:
            bands[i] = category_band[int(code)]
        except KeyError:
            raise ValueError(f"category code {int(code)} has no band") from None
    out[live] = scores[bands]
    return RasterLayer(raw.name, raw.header, out)


def normalize_continuous(raw: RasterLayer, direction: str,
                         name: str | None = None) -> RasterLayer:
    """Min-max rescale to [0,1]; inverted when lower-is-better."""
    if direction not in (LOWER_IS_BETTER, HIGHER_IS_BETTER):
        raise ValueError(f"unknown direction {direction!r}")
    live = ~raw.nodata_mask()
    vals = raw.cells[live]
    if vals.size < 2:
        raise ValueError("normalize_continuous needs >= 2 non-nodata cells")
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        raise ValueError(f"zero spread in layer {raw.name!r}")
    out = np.full_like(raw.cells, raw.header.nodata)
    scaled = (raw.cells[live] - lo) / (hi - lo)
    if direction == LOWER_IS_BETTER:
        scaled = 1.0 - scaled
    out[live] = scaled
    return RasterLayer(name or raw.name, raw.header, out)


# ---------------------------------------------------------------------------
# Criteria configuration file: one criterion per line,
#   criterion,direction,method,b1,b2,b3   (breakpoints blank for continuous)
# ---------------------------------------------------------------------------

def load_rules(path: str | Path) -> list[BandRule | ContinuousRule]:
    rules: list[BandRule | ContinuousRule] = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if parts[0] == "criterion":
            continue  # header row
        if len(parts) != 6:
            raise ValueError(f"criteria config line {line_no}: "
                             f"expected 6 comma-separated fields")
        name, direction, method = parts[0], parts[1], parts[2]
        if method == "band":
            rules.append(BandRule(name, direction,
                                  (float(parts[3]), float(parts[4]),
                                   float(parts[5]))))
        elif method == "continuous":
            rules.append(ContinuousRule(name, direction))
        else:
            raise ValueError(f"criteria config line {line_no}: "
                             f"unknown method {method!r}")
    if not rules:
        raise ValueError("criteria config defines no criteria")
    return rules


def save_rules(rules, path: str | Path) -> None:
    lines = ["criterion,direction,method,b1,b2,b3"]
    for rule in rules:
        if isinstance(rule, BandRule):
            b1, b2, b3 = rule.breakpoints
            lines.append(f"{rule.criterion},{rule.direction},band,"
                         f"{b1!r},{b2!r},{b3!r}")
        else:
            lines.append(f"{rule.criterion},{rule.direction},continuous,,,")
    Path(path).write_text("\n".join(lines) + "\n")


def build_criteria(raw_layers: dict[str, RasterLayer], rules) -> CriteriaSet:
    """Apply each rule to its raw layer, in rule order."""
    names = []
    layers = []
    for rule in rules:
        try:
            raw = raw_layers[rule.criterion]
        except KeyError:
            raise ValueError(f"no raw layer for criterion "
                             f"{rule.criterion!r}") from None
        if isinstance(rule, BandRule):
            layers.append(reclassify(raw, rule))
        else:
            layers.append(normalize_continuous(raw, rule.direction,
                                               name=rule.criterion))
        names.append(rule.criterion)
    return CriteriaSet(tuple(names), tuple(layers))

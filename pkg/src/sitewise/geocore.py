"""Raster and region data model plus file ingestion.

Rasters are ESRI-style ASCII grids stored north-to-south (row 0 is the top
row). Tabular region inputs are plain CSV files with mandatory headers; see
the schema constants below.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

import numpy as np

NODATA_DEFAULT = -9999.0

COUNTY_COLUMNS = ["id", "name", "supply_tons", "precip_inches",
                  "unemployment_rate", "market_revenue"]
FACILITY_COLUMNS = ["id", "x", "y", "demand_tons_per_year", "status"]
CANDIDATE_COLUMNS = ["id", "x", "y"]


class GridFormatError(ValueError):
    """Malformed ASCII grid file."""


@dataclass(frozen=True)
class GridHeader:
    ncols: int
    nrows: int
    xll: float
    yll: float
    cellsize: float
    nodata: float = NODATA_DEFAULT

    def __post_init__(self):
        if self.ncols <= 0 or self.nrows <= 0:
            raise ValueError("grid dimensions must be positive")
        if self.cellsize <= 0:
            raise ValueError("cellsize must be positive")

    @property
    def width(self) -> float:
        return self.ncols * self.cellsize

    @property
    def height(self) -> float:
        return self.nrows * self.cellsize

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (self.xll + (col + 0.5) * self.cellsize,
                self.yll + (self.nrows - row - 0.5) * self.cellsize)

    def point_to_cell(self, x: float, y: float) -> tuple[int, int] | None:
        """Cell containing (x, y); half-open on the east/north edges."""
        col = math.floor((x - self.xll) / self.cellsize)
        row = self.nrows - 1 - math.floor((y - self.yll) / self.cellsize)
        if 0 <= row < self.nrows and 0 <= col < self.ncols:
            return row, col
        return None

    def contains_point(self, x: float, y: float) -> bool:
        return (self.xll <= x <= self.xll + self.width
                and self.yll <= y <= self.yll + self.height)


@dataclass(frozen=True)
class RasterLayer:
    name: str
    header: GridHeader
    cells: np.ndarray  # (nrows, ncols) float64; row 0 = north

    def __post_init__(self):
        arr = np.ascontiguousarray(self.cells, dtype=np.float64)
        if arr.shape != (self.header.nrows, self.header.ncols):
            raise ValueError(
                f"cell array shape {arr.shape} does not match header "
                f"({self.header.nrows}, {self.header.ncols})")
        live = arr[arr != self.header.nodata]
        if live.size and not np.all(np.isfinite(live)):
            raise ValueError("non-nodata cells must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "cells", arr)

    @property
    def ncols(self) -> int:
        return self.header.ncols

    @property
    def nrows(self) -> int:
        return self.header.nrows

    @property
    def nodata(self) -> float:
        return self.header.nodata

    def nodata_mask(self) -> np.ndarray:
        return self.cells == self.header.nodata

    def with_cells(self, cells: np.ndarray, name: str | None = None) -> "RasterLayer":
        return RasterLayer(name or self.name, self.header, cells)

    def value_at(self, x: float, y: float) -> float | None:
        rc = self.header.point_to_cell(x, y)
        if rc is None:
            return None
        return float(self.cells[rc])


@dataclass(frozen=True)
class County:
    id: int
    name: str
    supply_tons: float
    precip_inches: float = 0.0
    unemployment_rate: float = 0.0
    market_revenue: float = 0.0
    mask_rows: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    mask_cols: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))

    def __post_init__(self):
        if self.supply_tons < 0:
            raise ValueError("supply_tons must be non-negative")
        object.__setattr__(self, "mask_rows",
                           np.asarray(self.mask_rows, np.int64))
        object.__setattr__(self, "mask_cols",
                           np.asarray(self.mask_cols, np.int64))

    @property
    def n_cells(self) -> int:
        return int(self.mask_rows.shape[0])

    def cell_mask(self) -> set[tuple[int, int]]:
        return set(zip(self.mask_rows.tolist(), self.mask_cols.tolist()))


@dataclass(frozen=True)
class Facility:
    id: int
    x: float
    y: float
    demand_tons_per_year: float
    status: str = "existing"  # existing | hypothetical

    def __post_init__(self):
        if self.demand_tons_per_year < 0:
            raise ValueError("demand must be non-negative")
        if self.status not in ("existing", "hypothetical"):
            raise ValueError(f"unknown facility status {self.status!r}")


@dataclass(frozen=True)
class CandidateSite:
    id: int
    x: float
    y: float
    score: float | None = None
    class_label: int | None = None

    def __post_init__(self):
        if self.score is not None and not 0.0 <= self.score <= 1.0:
            raise ValueError("score must lie in [0, 1]")
        if self.class_label is not None and self.class_label not in (0, 1, 2, 3):
            raise ValueError("class_label must be in {0,1,2,3}")


@dataclass(frozen=True)
class RegionModel:
    header: GridHeader
    counties: tuple[County, ...]
    facilities: tuple[Facility, ...]
    candidates: tuple[CandidateSite, ...]
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "counties", tuple(self.counties))
        object.__setattr__(self, "facilities", tuple(self.facilities))
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if self.radius <= 0:
            raise ValueError("procurement radius must be positive")
        for fac in self.facilities:
            if not self.header.contains_point(fac.x, fac.y):
                raise ValueError(
                    f"facility {fac.id} lies outside the region bounding box")
        seen: set[tuple[int, int]] = set()
        for county in self.counties:
            cells = county.cell_mask()
            overlap = seen & cells
            if overlap:
                raise ValueError(
                    f"county {county.id} mask overlaps another county "
                    f"(e.g. cell {next(iter(overlap))})")
            seen |= cells

    @cached_property
    def county_id_grid(self) -> np.ndarray:
        """int32 grid of county ids, -1 outside every county mask."""
        grid = np.full((self.header.nrows, self.header.ncols), -1, np.int32)
        for i, county in enumerate(self.counties):
            grid[county.mask_rows, county.mask_cols] = i
        grid.flags.writeable = False
        return grid

    @cached_property
    def county_index(self) -> dict[int, int]:
        return {c.id: i for i, c in enumerate(self.counties)}

    def existing_facilities(self) -> tuple[Facility, ...]:
        return tuple(f for f in self.facilities if f.status == "existing")

    def with_facilities(self, facilities) -> "RegionModel":
        return replace(self, facilities=tuple(facilities))


# ---------------------------------------------------------------------------
# ASCII grid I/O
# ---------------------------------------------------------------------------

_HEADER_KEYS = ["ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                "NODATA_value"]


def _fmt(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def load_raster(path: str | Path) -> RasterLayer:
    """Parse an ASCII grid; errors carry the 1-based offending line number."""
    path = Path(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    header: dict[str, float] = {}
    for i, key in enumerate(_HEADER_KEYS):
        if i >= len(lines):
            raise GridFormatError(f"{path.name}: missing header line {i + 1}")
        parts = lines[i].split()
        if len(parts) != 2 or parts[0].lower() != key.lower():
            raise GridFormatError(
                f"{path.name}: malformed header at line {i + 1}: "
                f"expected '{key} <value>'")
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise GridFormatError(
                f"{path.name}: non-numeric header value at line {i + 1}") from None
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    hdr = GridHeader(ncols=ncols, nrows=nrows, xll=header["xllcorner"],
                     yll=header["yllcorner"], cellsize=header["cellsize"],
                     nodata=header["NODATA_value"])
    n_header = len(_HEADER_KEYS)
    rows = []
    for r in range(nrows):
        line_no = n_header + r + 1
        if n_header + r >= len(lines):
            raise GridFormatError(
                f"{path.name}: cell-count mismatch at line {line_no}: "
                f"expected {nrows} data rows, found {r}")
        tokens = lines[n_header + r].split()
        if len(tokens) != ncols:
            raise GridFormatError(
                f"{path.name}: cell-count mismatch at line {line_no}: "
                f"expected {ncols} cells, found {len(tokens)}")
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            raise GridFormatError(
                f"{path.name}: non-numeric token at line {line_no}") from None
    return RasterLayer(path.stem, hdr, np.array(rows, np.float64))


def save_raster(layer: RasterLayer, path: str | Path) -> None:
    h = layer.header
    out = [f"ncols {h.ncols}", f"nrows {h.nrows}",
           f"xllcorner {_fmt(h.xll)}", f"yllcorner {_fmt(h.yll)}",
           f"cellsize {_fmt(h.cellsize)}", f"NODATA_value {_fmt(h.nodata)}"]
    for r in range(h.nrows):
        out.append(" ".join(_fmt(v) for v in layer.cells[r]))
    Path(path).write_text("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# Tabular I/O
# ---------------------------------------------------------------------------

def _read_csv(path: Path, columns: list[str]) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames) != columns:
            raise ValueError(
                f"{path.name}: expected header {','.join(columns)}, "
                f"got {','.join(reader.fieldnames or [])}")
        return list(reader)


def load_counties(path: str | Path) -> list[County]:
    rows = _read_csv(Path(path), COUNTY_COLUMNS)
    return [County(id=int(r["id"]), name=r["name"],
                   supply_tons=float(r["supply_tons"]),
                   precip_inches=float(r["precip_inches"]),
                   unemployment_rate=float(r["unemployment_rate"]),
                   market_revenue=float(r["market_revenue"]))
            for r in rows]


def save_counties(counties, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COUNTY_COLUMNS)
        for c in counties:
            w.writerow([c.id, c.name, _fmt(c.supply_tons),
                        _fmt(c.precip_inches), _fmt(c.unemployment_rate),
                        _fmt(c.market_revenue)])


def load_facilities(path: str | Path) -> list[Facility]:
    rows = _read_csv(Path(path), FACILITY_COLUMNS)
    return [Facility(id=int(r["id"]), x=float(r["x"]), y=float(r["y"]),
                     demand_tons_per_year=float(r["demand_tons_per_year"]),
                     status=r["status"])
            for r in rows]


def save_facilities(facilities, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FACILITY_COLUMNS)
        for f in facilities:
            w.writerow([f.id, _fmt(f.x), _fmt(f.y),
                        _fmt(f.demand_tons_per_year), f.status])


def load_candidates(path: str | Path) -> list[CandidateSite]:
    rows = _read_csv(Path(path), CANDIDATE_COLUMNS)
    return [CandidateSite(id=int(r["id"]), x=float(r["x"]), y=float(r["y"]))
            for r in rows]


def save_candidates(candidates, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CANDIDATE_COLUMNS)
        for c in candidates:
            w.writerow([c.id, _fmt(c.x), _fmt(c.y)])


def counties_from_mask_raster(mask: RasterLayer, counties) -> list[County]:
    """Attach cell masks from a county-id raster to bare county records."""
    out = []
    for county in counties:
        rows, cols = np.nonzero(mask.cells == county.id)
        out.append(replace(county, mask_rows=rows.astype(np.int64),
                           mask_cols=cols.astype(np.int64)))
    return out


def county_mask_raster(region: RegionModel) -> RasterLayer:
    grid = np.full((region.header.nrows, region.header.ncols),
                   region.header.nodata)
    for county in region.counties:
        grid[county.mask_rows, county.mask_cols] = county.id
    return RasterLayer("county_mask", region.header, grid)


# ---------------------------------------------------------------------------
# Tabular-to-raster burning
# ---------------------------------------------------------------------------

def burn_table(region: RegionModel, column: str) -> RasterLayer:
    """Burn a county attribute into a county-constant raster.

    Cells outside every county mask are nodata. Counties with empty masks
    contribute nothing (a warning is emitted).
    """
    if column not in ("supply_tons", "precip_inches", "unemployment_rate",
                      "market_revenue"):
        raise ValueError(f"unknown county attribute {column!r}")
    grid = np.full((region.header.nrows, region.header.ncols),
                   region.header.nodata)
    for county in region.counties:
        if county.n_cells == 0:
            warnings.warn(f"county {county.id} ({county.name}) has an empty "
                          f"mask; no cells burned", stacklevel=2)
            continue
        grid[county.mask_rows, county.mask_cols] = getattr(county, column)
    return RasterLayer(column, region.header, grid)

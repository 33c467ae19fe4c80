"""Supply-Demand Ratio under hypothetical facility entry.

Each facility sources within a fixed procurement radius; its demand is
allocated across counties proportionally to the share of in-region cells
inside that radius. A county's SDR divides its supply by allocated existing
demand plus the demand share of a hypothetical entrant placed at the county
centroid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .geocore import Facility, RasterLayer, RegionModel

SDR_TABLE_COLUMNS = ["county_id", "supply", "existing_demand_allocated",
                     "d_new", "sdr", "defined"]


@dataclass(frozen=True)
class DemandAllocation:
    facility_ids: tuple[int, ...]
    county_ids: tuple[int, ...]
    matrix: np.ndarray           # (n_facilities, n_counties) tons/year
    uncovered: tuple[int, ...]   # facility ids whose radius hits no in-region cell

    def row_for(self, facility_id: int) -> np.ndarray:
        return self.matrix[self.facility_ids.index(facility_id)]


@dataclass(frozen=True)
class SdrTable:
    county_ids: tuple[int, ...]
    supply: np.ndarray
    existing_demand: np.ndarray
    d_new_share: np.ndarray
    sdr: np.ndarray              # nan where undefined
    defined: np.ndarray          # bool


def _facility_shares(region: RegionModel, x: float, y: float) -> tuple[np.ndarray, int]:
    ids = region.county_id_grid
    h = region.header
    counts, total = _kernels.radius_counts(
        ids, x, y, region.radius, h.xll, h.yll, h.cellsize, len(region.counties))
    return np.asarray(counts, np.int64), int(total)


def allocate_demand(region: RegionModel,
                    facilities=None) -> DemandAllocation:
    """Proportional radius-based allocation D_ij for every facility."""
    if region.radius <= 0:
        raise ValueError("procurement radius must be positive")
    if facilities is None:
        facilities = region.facilities
    n_c = len(region.counties)
    matrix = np.zeros((len(facilities), n_c))
    uncovered = []
    for i, fac in enumerate(facilities):
        counts, total = _facility_shares(region, fac.x, fac.y)
        if total == 0:
            uncovered.append(fac.id)
            continue
        matrix[i] = fac.demand_tons_per_year * counts / total
    return DemandAllocation(
        facility_ids=tuple(f.id for f in facilities),
        county_ids=tuple(c.id for c in region.counties),
        matrix=matrix,
        uncovered=tuple(uncovered))


def county_centroid_cell(county) -> tuple[int, int]:
    """In-mask cell nearest the mean of the mask coordinates."""
    if county.n_cells == 0:
        raise ValueError(f"county {county.id} has an empty mask")
    mr = county.mask_rows.mean()
    mc = county.mask_cols.mean()
    d2 = (county.mask_rows - mr) ** 2 + (county.mask_cols - mc) ** 2
    j = int(np.argmin(d2))
    return int(county.mask_rows[j]), int(county.mask_cols[j])


def default_d_new(region: RegionModel) -> float:
    demands = [f.demand_tons_per_year for f in region.facilities]
    return float(np.mean(demands)) if demands else 0.0


def compute_sdr(region: RegionModel, d_new: float | None = None,
                allocation: DemandAllocation | None = None,
                new_alloc: str = "radius") -> SdrTable:
    """Per-county SDR with an independent hypothetical entrant per county.

    new_alloc picks how the entrant's demand maps to its host county:
    "radius" allocates by the same proportional rule and keeps the host
    county's share; "whole" assigns all of d_new to the host county.
    """
    if d_new is None:
        d_new = default_d_new(region)
    if d_new < 0:
        raise ValueError("d_new must be non-negative")
    if new_alloc not in ("radius", "whole"):
        raise ValueError(f"unknown new_alloc mode {new_alloc!r}")
    if allocation is None:
        allocation = allocate_demand(region)

    n_c = len(region.counties)
    existing = allocation.matrix.sum(axis=0) if allocation.matrix.size else np.zeros(n_c)
    supply = np.array([c.supply_tons for c in region.counties])
    d_new_share = np.empty(n_c)
    for j, county in enumerate(region.counties):
        if new_alloc == "whole" or d_new == 0.0:
            d_new_share[j] = d_new
            continue
        r, c = county_centroid_cell(county)
        cx, cy = region.header.cell_center(r, c)
        counts, total = _facility_shares(region, cx, cy)
        d_new_share[j] = d_new * counts[j] / total if total else 0.0

    denom = existing + d_new_share
    defined = denom > 0
    sdr = np.full(n_c, np.nan)
    sdr[defined] = supply[defined] / denom[defined]
    return SdrTable(county_ids=tuple(c.id for c in region.counties),
                    supply=supply, existing_demand=existing,
                    d_new_share=d_new_share, sdr=sdr, defined=defined)


def sdr_raster(table: SdrTable, region: RegionModel) -> RasterLayer:
    """County-constant SDR raster; undefined counties become nodata."""
    grid = np.full((region.header.nrows, region.header.ncols),
                   region.header.nodata)
    for j, county in enumerate(region.counties):
        value = table.sdr[j] if table.defined[j] else region.header.nodata
        grid[county.mask_rows, county.mask_cols] = value
    return RasterLayer("sdr", region.header, grid)


def save_sdr_table(table: SdrTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SDR_TABLE_COLUMNS)
        for j, cid in enumerate(table.county_ids):
            sdr = repr(float(table.sdr[j])) if table.defined[j] else ""
            w.writerow([cid, repr(float(table.supply[j])),
                        repr(float(table.existing_demand[j])),
                        repr(float(table.d_new_share[j])), sdr,
                        "true" if table.defined[j] else "false"])


def hypothetical_facility(region: RegionModel, x: float, y: float,
                          demand: float, fid: int | None = None) -> Facility:
    if fid is None:
        taken = [f.id for f in region.facilities]
        fid = (max(taken) + 1) if taken else 1
    return Facility(id=fid, x=x, y=y, demand_tons_per_year=demand,
                    status="hypothetical")

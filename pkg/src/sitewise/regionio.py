"""Region directory layout: the on-disk bundle every pipeline run consumes.

A region directory holds counties.csv, facilities.csv, candidates.csv, a
county_mask raster, 0/1 source masks for the proximity layers, an optional
planted ground-truth raster, and a criteria config. build_raw_layers turns
the bundle into the raw (unnormalized) criterion rasters, including the SDR
layer derived from the current facility set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import criteria as crit
from . import geocore, sdr
from .geocore import GridHeader, RasterLayer, RegionModel

MASK_FILES = {
    "road_distance": "roads_mask.asc",
    "rail_distance": "rail_mask.asc",
    "urban_distance": "urban_mask.asc",
}

# rate criteria: raster file if present, else burned from the county column
RATE_FILES = {
    "unemployment_rate": "unemployment_rate.asc",
    "market_revenue": "market_revenue.asc",
    "precipitation": "precipitation.asc",
}

_RATE_COLUMNS = {
    "unemployment_rate": "unemployment_rate",
    "market_revenue": "market_revenue",
    "precipitation": "precip_inches",
}


@dataclass(frozen=True)
class RegionBundle:
    region: RegionModel
    masks: dict[str, RasterLayer]          # criterion name -> 0/1 source mask
    rules: list
    ground_truth: RasterLayer | None
    meta: dict
    rate_layers: dict[str, RasterLayer] | None = None


def save_region(bundle: RegionBundle, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    region = bundle.region
    h = region.header
    meta = dict(bundle.meta)
    meta.update(ncols=h.ncols, nrows=h.nrows, xll=h.xll, yll=h.yll,
                cellsize=h.cellsize, nodata=h.nodata, radius=region.radius)
    (out / "region.json").write_text(json.dumps(meta, indent=2,
                                                sort_keys=True) + "\n")
    geocore.save_counties(region.counties, out / "counties.csv")
    geocore.save_facilities(region.facilities, out / "facilities.csv")
    geocore.save_candidates(region.candidates, out / "candidates.csv")
    geocore.save_raster(geocore.county_mask_raster(region),
                        out / "county_mask.asc")
    for name, fname in MASK_FILES.items():
        if name in bundle.masks:
            geocore.save_raster(bundle.masks[name], out / fname)
    for name, fname in RATE_FILES.items():
        if bundle.rate_layers and name in bundle.rate_layers:
            geocore.save_raster(bundle.rate_layers[name], out / fname)
    if bundle.ground_truth is not None:
        geocore.save_raster(bundle.ground_truth, out / "ground_truth.asc")
    crit.save_rules(bundle.rules, out / "criteria.cfg")


def load_region(region_dir: str | Path) -> RegionBundle:
    d = Path(region_dir)
    meta = json.loads((d / "region.json").read_text())
    header = GridHeader(ncols=int(meta["ncols"]), nrows=int(meta["nrows"]),
                        xll=float(meta["xll"]), yll=float(meta["yll"]),
                        cellsize=float(meta["cellsize"]),
                        nodata=float(meta["nodata"]))
    counties = geocore.load_counties(d / "counties.csv")
    mask = geocore.load_raster(d / "county_mask.asc")
    counties = geocore.counties_from_mask_raster(mask, counties)
    facilities = geocore.load_facilities(d / "facilities.csv")
    candidates = geocore.load_candidates(d / "candidates.csv")
    region = RegionModel(header=header, counties=tuple(counties),
                         facilities=tuple(facilities),
                         candidates=tuple(candidates),
                         radius=float(meta["radius"]))
    masks = {}
    for name, fname in MASK_FILES.items():
        p = d / fname
        if p.exists():
            masks[name] = geocore.load_raster(p)
    rate_layers = {}
    for name, fname in RATE_FILES.items():
        p = d / fname
        if p.exists():
            rate_layers[name] = geocore.load_raster(p)
    rules = crit.load_rules(d / "criteria.cfg")
    gt_path = d / "ground_truth.asc"
    truth = geocore.load_raster(gt_path) if gt_path.exists() else None
    return RegionBundle(region=region, masks=masks, rules=rules,
                        ground_truth=truth, meta=meta,
                        rate_layers=rate_layers or None)


def build_raw_layers(region: RegionModel, masks: dict[str, RasterLayer],
                     rate_layers: dict[str, RasterLayer] | None = None,
                     d_new: float | None = None,
                     new_alloc: str = "radius",
                     sdr_table: sdr.SdrTable | None = None) -> dict[str, RasterLayer]:
    """Raw criterion rasters: distance transforms, rate surfaces, SDR.

    Rate criteria come from the provided rasters when available and are
    otherwise burned county-constant from the county table.
    """
    raw: dict[str, RasterLayer] = {}
    for name, mask in masks.items():
        raw[name] = crit.distance_transform(mask)
    for name, column in _RATE_COLUMNS.items():
        if rate_layers and name in rate_layers:
            raw[name] = rate_layers[name]
        else:
            raw[name] = geocore.burn_table(region, column)
    if sdr_table is None:
        sdr_table = sdr.compute_sdr(region, d_new=d_new, new_alloc=new_alloc)
    raw["sdr"] = sdr.sdr_raster(sdr_table, region)
    return raw


def default_rules() -> list:
    """Continuous min-max rules for the stock seven criteria."""
    return [crit.ContinuousRule(name, direction)
            for name, direction in crit.CANONICAL_CRITERIA]

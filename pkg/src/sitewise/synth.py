"""Synthetic region generator with planted ground truth.

Counties come from a Voronoi partition of random seed cells; proximity
layers from Euclidean distance to random source points; county rates from
uniform draws. The ground-truth suitability raster is the planted weighted
sum of the normalized criteria, so recovery of the planted weights is
checkable end to end.
"""

from __future__ import annotations

import numpy as np

from . import regionio
from .criteria import build_criteria
from .geocore import (CandidateSite, County, Facility, GridHeader,
                      RegionModel)
from .overlay import WeightVector, weighted_sum

SUPPLY_RANGE = (50_000.0, 500_000.0)
DEMAND_RANGE = (20_000.0, 120_000.0)
PRECIP_RANGE = (40.0, 70.0)
UNEMPLOYMENT_RANGE = (3.0, 12.0)
REVENUE_RANGE = (1e6, 5e7)


def _voronoi_counties(rng, header, n_counties, supplies, rate_layers):
    nrows, ncols = header.nrows, header.ncols
    n_cells = nrows * ncols
    seeds = rng.choice(n_cells, size=n_counties, replace=False)
    sr = seeds // ncols
    sc = seeds % ncols
    rr, cc = np.meshgrid(np.arange(nrows), np.arange(ncols), indexing="ij")
    d2 = ((rr[:, :, None] - sr[None, None, :]) ** 2
          + (cc[:, :, None] - sc[None, None, :]) ** 2)
    owner = np.argmin(d2, axis=2)
    counties = []
    for i in range(n_counties):
        rows, cols = np.nonzero(owner == i)
        # county attribute columns carry the field means over the mask
        counties.append(County(
            id=i, name=f"County {i:02d}", supply_tons=supplies[i],
            precip_inches=float(rate_layers["precipitation"].cells[rows, cols].mean()),
            unemployment_rate=float(rate_layers["unemployment_rate"].cells[rows, cols].mean()),
            market_revenue=float(rate_layers["market_revenue"].cells[rows, cols].mean()),
            mask_rows=rows, mask_cols=cols))
    return counties


def _point_mask(rng, header, n_points, name):
    cells = np.zeros((header.nrows, header.ncols))
    pick = rng.choice(header.nrows * header.ncols, size=n_points, replace=False)
    cells[pick // header.ncols, pick % header.ncols] = 1.0
    from .geocore import RasterLayer

    return RasterLayer(name, header, cells)


def _idw_field(rng, header, name, lo, hi, n_points=8, power=2.0):
    """Smooth field: inverse-distance-weighted mix of random control values.

    Smooth rate surfaces keep the rate criteria from acting as county
    identifiers, which would let a flexible model launder the whole
    county-level signal through any one of them.
    """
    nrows, ncols = header.nrows, header.ncols
    pick = rng.choice(nrows * ncols, size=n_points, replace=False)
    pr = (pick // ncols).astype(np.float64)
    pc = (pick % ncols).astype(np.float64)
    vals = rng.uniform(lo, hi, n_points)
    rr, cc = np.meshgrid(np.arange(nrows, dtype=np.float64),
                         np.arange(ncols, dtype=np.float64), indexing="ij")
    d2 = ((rr[:, :, None] - pr) ** 2 + (cc[:, :, None] - pc) ** 2)
    w = 1.0 / (d2 + 1.0) ** (power / 2.0)
    field = (w * vals).sum(axis=2) / w.sum(axis=2)
    from .geocore import RasterLayer

    return RasterLayer(name, header, field)


def _normalize_for_truth(raw, rules):
    """Normalized criteria for the planted truth.

    Identical to criteria.build_criteria except that a constant layer
    (e.g. the SDR raster of a single-county region) flattens to 0.5
    instead of erroring, so degenerate regions still generate.
    """
    from .criteria import (BandRule, CriteriaSet, normalize_continuous,
                           reclassify)
    from .geocore import RasterLayer

    names, layers = [], []
    for rule in rules:
        layer = raw[rule.criterion]
        live = layer.cells[layer.cells != layer.header.nodata]
        if live.size and live.min() == live.max():
            flat = np.full_like(layer.cells, 0.5)
            flat[layer.cells == layer.header.nodata] = layer.header.nodata
            layers.append(RasterLayer(rule.criterion, layer.header, flat))
        elif isinstance(rule, BandRule):
            layers.append(reclassify(layer, rule))
        else:
            layers.append(normalize_continuous(layer, rule.direction,
                                               name=rule.criterion))
        names.append(rule.criterion)
    return CriteriaSet(tuple(names), tuple(layers))


def _facilities_at_cells(header, rows, cols, demands, start_id=1):
    out = []
    for i in range(rows.shape[0]):
        x, y = header.cell_center(int(rows[i]), int(cols[i]))
        out.append(Facility(id=start_id + i, x=x, y=y,
                            demand_tons_per_year=float(demands[i]),
                            status="existing"))
    return out


def generate_synthetic_region(seed: int, ncols: int, nrows: int,
                              n_counties: int, n_facilities: int,
                              planted_weights: WeightVector,
                              n_candidates: int = 150,
                              cellsize: float = 1000.0,
                              radius: float | None = None,
                              n_road_sources: int | None = None,
                              n_rail_sources: int | None = None,
                              n_urban_sources: int | None = None,
                              facility_placement: str = "random",
                              d_new: float | None = None):
    """Deterministic synthetic region.

    Returns (RegionModel, raw criterion rasters, ground-truth raster). With
    facility_placement="top_truth", facilities are relocated onto top-decile
    cells of a first-pass ground truth before the SDR layer and final truth
    are recomputed.
    """
    if n_counties < 1:
        raise ValueError("need at least one county")
    if n_counties > ncols * nrows:
        raise ValueError("more counties than grid cells")
    if n_facilities > ncols * nrows:
        raise ValueError("more facilities than grid cells")
    if n_candidates > ncols * nrows:
        raise ValueError("more candidates than grid cells")
    if facility_placement not in ("random", "top_truth"):
        raise ValueError(f"unknown facility placement {facility_placement!r}")

    rng = np.random.default_rng(seed)
    header = GridHeader(ncols=ncols, nrows=nrows, xll=0.0, yll=0.0,
                        cellsize=cellsize)
    if radius is None:
        radius = 0.25 * min(header.width, header.height)

    # spatial feature density scales with grid area so layers stay
    # decorrelated across resolutions
    n_cells = ncols * nrows
    if n_road_sources is None:
        n_road_sources = max(4, n_cells // 750)
    if n_rail_sources is None:
        n_rail_sources = max(3, n_cells // 1600)
    if n_urban_sources is None:
        n_urban_sources = max(3, n_cells // 3500)
    n_field_points = max(6, n_cells // 900)

    supplies = rng.uniform(*SUPPLY_RANGE, n_counties)
    rate_layers = {
        "unemployment_rate": _idw_field(rng, header, "unemployment_rate",
                                        *UNEMPLOYMENT_RANGE,
                                        n_points=n_field_points),
        "market_revenue": _idw_field(rng, header, "market_revenue",
                                     *REVENUE_RANGE,
                                     n_points=n_field_points),
        "precipitation": _idw_field(rng, header, "precipitation",
                                    *PRECIP_RANGE,
                                    n_points=n_field_points),
    }
    counties = _voronoi_counties(rng, header, n_counties, supplies,
                                 rate_layers)

    masks = {
        "road_distance": _point_mask(rng, header, n_road_sources, "roads_mask"),
        "rail_distance": _point_mask(rng, header, n_rail_sources, "rail_mask"),
        "urban_distance": _point_mask(rng, header, n_urban_sources, "urban_mask"),
    }

    n_cells = ncols * nrows
    fac_cells = rng.choice(n_cells, size=n_facilities, replace=False)
    demands = rng.uniform(*DEMAND_RANGE, n_facilities)
    facilities = _facilities_at_cells(header, fac_cells // ncols,
                                      fac_cells % ncols, demands)

    cand_cells = rng.choice(n_cells, size=n_candidates, replace=False)
    candidates = [CandidateSite(id=i + 1,
                                x=header.cell_center(int(c // ncols), int(c % ncols))[0],
                                y=header.cell_center(int(c // ncols), int(c % ncols))[1])
                  for i, c in enumerate(cand_cells)]

    region = RegionModel(header=header, counties=tuple(counties),
                         facilities=tuple(facilities),
                         candidates=tuple(candidates), radius=radius)
    rules = regionio.default_rules()

    def truth_for(reg):
        raw = regionio.build_raw_layers(reg, masks, rate_layers=rate_layers,
                                        d_new=d_new)
        normalized = _normalize_for_truth(raw, rules)
        truth = weighted_sum(normalized, planted_weights).score
        return raw, truth.with_cells(truth.cells, name="ground_truth")

    raw, truth = truth_for(region)

    if facility_placement == "top_truth":
        live = truth.cells[truth.cells != header.nodata]
        cutoff = np.quantile(live, 0.9)
        top_r, top_c = np.nonzero((truth.cells != header.nodata)
                                  & (truth.cells >= cutoff))
        pick = rng.choice(top_r.shape[0], size=min(n_facilities, top_r.shape[0]),
                          replace=False)
        facilities = _facilities_at_cells(header, top_r[pick], top_c[pick],
                                          demands)
        region = region.with_facilities(facilities)
        raw, truth = truth_for(region)

    return region, raw, truth


def make_bundle(seed: int, planted_weights: WeightVector,
                **kwargs) -> regionio.RegionBundle:
    """Generate a region and wrap it, masks, rules and truth as a bundle."""
    ncols = kwargs.pop("ncols", 100)
    nrows = kwargs.pop("nrows", 100)
    n_counties = kwargs.pop("n_counties", 6)
    n_facilities = kwargs.pop("n_facilities", 4)
    region, raw, truth = generate_synthetic_region(
        seed, ncols, nrows, n_counties, n_facilities, planted_weights, **kwargs)
    # sources are exactly the zero-distance cells of the proximity layers
    from .geocore import RasterLayer

    masks = {}
    for name in regionio.MASK_FILES:
        dist = raw[name]
        masks[name] = RasterLayer(name, region.header,
                                  (dist.cells == 0.0).astype(np.float64))
    rate_layers = {name: raw[name] for name in regionio.RATE_FILES}
    meta = {"seed": seed,
            "planted_weights": planted_weights.as_dict(),
            "criteria_order": list(planted_weights.names)}
    return regionio.RegionBundle(region=region, masks=masks,
                                 rate_layers=rate_layers,
                                 rules=regionio.default_rules(),
                                 ground_truth=truth, meta=meta)

import numpy as np
import pytest

from sitewise import geocore
from sitewise.geocore import (County, Facility, GridFormatError, GridHeader,
                              RasterLayer, RegionModel, burn_table,
                              load_raster, save_raster)


def header(ncols=4, nrows=3, cellsize=1.0):
    return GridHeader(ncols=ncols, nrows=nrows, xll=0.0, yll=0.0,
                      cellsize=cellsize)


def test_load_raster_basic(tmp_path):
    p = tmp_path / "g.asc"
    p.write_text("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
                 "NODATA_value -9999\n1 2\n3 4\n")
    layer = load_raster(p)
    assert layer.ncols == 2 and layer.nrows == 2
    assert layer.cells.ravel().tolist() == [1.0, 2.0, 3.0, 4.0]


def test_load_raster_cell_count_mismatch(tmp_path):
    p = tmp_path / "bad.asc"
    p.write_text("ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
                 "NODATA_value -9999\n1 2\n3 4 5\n")
    with pytest.raises(GridFormatError, match="cell-count mismatch at line 7"):
        load_raster(p)


def test_load_raster_non_numeric_token(tmp_path):
    p = tmp_path / "bad.asc"
    p.write_text("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
                 "NODATA_value -9999\n1 oops\n")
    with pytest.raises(GridFormatError, match="non-numeric token at line 7"):
        load_raster(p)


def test_load_raster_malformed_header(tmp_path):
    p = tmp_path / "bad.asc"
    p.write_text("ncols 2\nnrows 2\nbogus 0\nyllcorner 0\ncellsize 1\n"
                 "NODATA_value -9999\n1 2\n3 4\n")
    with pytest.raises(GridFormatError, match="line 3"):
        load_raster(p)


def test_nodata_cells_preserved(tmp_path):
    p = tmp_path / "g.asc"
    p.write_text("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
                 "NODATA_value -9999\n-9999 5\n")
    layer = load_raster(p)
    assert layer.nodata_mask().tolist() == [[True, False]]


def test_raster_round_trip_byte_identical(tmp_path):
    rng = np.random.default_rng(0)
    cells = rng.normal(size=(5, 7))
    cells[2, 3] = -9999.0
    layer = RasterLayer("t", header(7, 5, 2.5), cells)
    p1 = tmp_path / "a.asc"
    p2 = tmp_path / "b.asc"
    save_raster(layer, p1)
    save_raster(load_raster(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_raster_invariants():
    with pytest.raises(ValueError, match="shape"):
        RasterLayer("t", header(3, 3), np.zeros((2, 3)))
    with pytest.raises(ValueError, match="finite"):
        RasterLayer("t", header(2, 1), np.array([[np.inf, 0.0]]))
    with pytest.raises(ValueError):
        GridHeader(ncols=2, nrows=2, xll=0, yll=0, cellsize=0.0)


def test_cell_center_and_point_mapping():
    h = header(4, 3, 2.0)
    assert h.cell_center(0, 0) == (1.0, 5.0)  # top-left cell, north-most row
    assert h.cell_center(2, 3) == (7.0, 1.0)
    assert h.point_to_cell(1.0, 5.0) == (0, 0)
    # east/north edges are half-open
    assert h.point_to_cell(8.0, 1.0) is None
    assert h.point_to_cell(7.999, 1.0) == (2, 3)
    assert h.point_to_cell(1.0, 6.0) is None


def _two_county_region():
    h = header(4, 2)
    c0 = County(id=0, name="A", supply_tons=500.0, unemployment_rate=4.0,
                mask_rows=np.array([0, 0, 1, 1]), mask_cols=np.array([0, 1, 0, 1]))
    c1 = County(id=1, name="B", supply_tons=300.0, unemployment_rate=6.0,
                mask_rows=np.array([0, 0, 1, 1]), mask_cols=np.array([2, 3, 2, 3]))
    fac = Facility(id=1, x=1.0, y=1.0, demand_tons_per_year=100.0)
    return RegionModel(header=h, counties=(c0, c1), facilities=(fac,),
                       candidates=(), radius=2.0)


def test_burn_table_constant_fill():
    region = _two_county_region()
    layer = burn_table(region, "unemployment_rate")
    assert np.all(layer.cells[:, :2] == 4.0)
    assert np.all(layer.cells[:, 2:] == 6.0)


def test_burn_table_supply():
    region = _two_county_region()
    layer = burn_table(region, "supply_tons")
    assert np.all(layer.cells[:, :2] == 500.0)


def test_burn_table_unknown_attribute():
    with pytest.raises(ValueError, match="unknown county attribute"):
        burn_table(_two_county_region(), "nope")


def test_burn_table_empty_mask_warns():
    h = header(2, 2)
    c0 = County(id=0, name="A", supply_tons=1.0,
                mask_rows=np.array([0]), mask_cols=np.array([0]))
    c1 = County(id=1, name="B", supply_tons=2.0)
    region = RegionModel(header=h, counties=(c0, c1), facilities=(),
                         candidates=(), radius=1.0)
    with pytest.warns(UserWarning, match="empty"):
        layer = burn_table(region, "supply_tons")
    assert layer.cells[0, 0] == 1.0
    assert layer.cells[1, 1] == h.nodata


def test_overlapping_county_masks_rejected():
    h = header(2, 1)
    c0 = County(id=0, name="A", supply_tons=1.0,
                mask_rows=np.array([0]), mask_cols=np.array([0]))
    c1 = County(id=1, name="B", supply_tons=2.0,
                mask_rows=np.array([0]), mask_cols=np.array([0]))
    with pytest.raises(ValueError, match="overlaps"):
        RegionModel(header=h, counties=(c0, c1), facilities=(),
                    candidates=(), radius=1.0)


def test_facility_outside_bbox_rejected():
    h = header(2, 2)
    with pytest.raises(ValueError, match="outside"):
        RegionModel(header=h, counties=(), candidates=(), radius=1.0,
                    facilities=(Facility(id=1, x=99.0, y=0.5,
                                         demand_tons_per_year=1.0),))


def test_csv_round_trips(tmp_path):
    region = _two_county_region()
    geocore.save_counties(region.counties, tmp_path / "c.csv")
    loaded = geocore.load_counties(tmp_path / "c.csv")
    assert [c.name for c in loaded] == ["A", "B"]
    assert loaded[0].supply_tons == 500.0
    geocore.save_facilities(region.facilities, tmp_path / "f.csv")
    fl = geocore.load_facilities(tmp_path / "f.csv")
    assert fl[0].demand_tons_per_year == 100.0 and fl[0].status == "existing"
    cands = [geocore.CandidateSite(id=9, x=0.5, y=0.25)]
    geocore.save_candidates(cands, tmp_path / "s.csv")
    assert geocore.load_candidates(tmp_path / "s.csv")[0].id == 9


def test_county_mask_raster_round_trip():
    region = _two_county_region()
    mask = geocore.county_mask_raster(region)
    rebuilt = geocore.counties_from_mask_raster(mask, region.counties)
    for orig, back in zip(region.counties, rebuilt):
        assert orig.cell_mask() == back.cell_mask()

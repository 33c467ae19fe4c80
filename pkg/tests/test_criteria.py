import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sitewise.criteria import (BandRule, ContinuousRule, CriteriaSet,
                               build_criteria, distance_transform, load_rules,
                               normalize_continuous, reclassify,
                               reclassify_categories, save_rules)
from sitewise.geocore import GridHeader, RasterLayer


def layer(cells, cellsize=1.0, name="t", nodata=-9999.0):
    cells = np.asarray(cells, np.float64)
    h = GridHeader(ncols=cells.shape[1], nrows=cells.shape[0], xll=0.0,
                   yll=0.0, cellsize=cellsize, nodata=nodata)
    return RasterLayer(name, h, cells)


def brute_force_edt(mask, cellsize):
    src = np.argwhere(mask == 1.0)
    out = np.empty(mask.shape)
    for r in range(mask.shape[0]):
        for c in range(mask.shape[1]):
            d2 = (src[:, 0] - r) ** 2 + (src[:, 1] - c) ** 2
            out[r, c] = np.sqrt(d2.min()) * cellsize
    return out


def test_distance_transform_single_source():
    mask = np.zeros((5, 6))
    mask[0, 0] = 1.0
    d = distance_transform(layer(mask))
    assert d.cells[0, 3] == 3.0
    assert d.cells[3, 4] == 5.0


def test_distance_transform_all_sources():
    d = distance_transform(layer(np.ones((4, 4))))
    assert np.all(d.cells == 0.0)


def test_distance_transform_matches_brute_force():
    rng = np.random.default_rng(42)
    mask = (rng.random((20, 20)) < 0.08).astype(float)
    mask[11, 7] = 1.0
    d = distance_transform(layer(mask, cellsize=3.0))
    expected = brute_force_edt(mask, 3.0)
    assert np.max(np.abs(d.cells - expected)) < 1e-9


def test_distance_transform_empty_mask_errors():
    with pytest.raises(ValueError, match="source"):
        distance_transform(layer(np.zeros((3, 3))))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 30 - 1))
def test_distance_transform_lipschitz(seed):
    rng = np.random.default_rng(seed)
    mask = (rng.random((12, 14)) < 0.1).astype(float)
    if not mask.any():
        mask[5, 6] = 1.0
    cs = 2.0
    d = distance_transform(layer(mask, cellsize=cs)).cells
    limit = cs * np.sqrt(2) + 1e-12
    assert np.max(np.abs(np.diff(d, axis=0))) <= limit
    assert np.max(np.abs(np.diff(d, axis=1))) <= limit
    diag = np.abs(d[1:, 1:] - d[:-1, :-1])
    assert diag.max() <= limit


# Table-1 style band fixtures
def test_reclassify_road_band():
    rule = BandRule("road_distance", "lower", (500.0, 1000.0, 2000.0))
    out = reclassify(layer([[400.0]]), rule)
    assert out.cells[0, 0] == 1.0


def test_reclassify_slope_band():
    rule = BandRule("slope", "lower", (7.0, 13.0, 20.0))
    out = reclassify(layer([[10.0]]), rule)
    assert out.cells[0, 0] == pytest.approx(2.0 / 3.0)


def test_reclassify_urban_not_suitable():
    rule = BandRule("urban_distance", "lower", (10_000.0, 20_000.0, 50_000.0))
    out = reclassify(layer([[60_000.0]]), rule)
    assert out.cells[0, 0] == 0.0


def test_reclassify_higher_is_better_mirrored():
    rule = BandRule("sdr", "higher", (1.0, 2.0, 3.0))
    vals = reclassify(layer([[0.5, 1.5, 2.5, 9.0]]), rule).cells[0]
    assert vals.tolist() == [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]


def test_reclassify_nodata_passthrough():
    rule = BandRule("r", "lower", (1.0, 2.0, 3.0))
    out = reclassify(layer([[-9999.0, 0.5]]), rule)
    assert out.cells[0, 0] == -9999.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4))
def test_reclassify_monotone(a, b):
    rule = BandRule("r", "lower", (10.0, 100.0, 1000.0))
    lo, hi = min(a, b), max(a, b)
    out = reclassify(layer([[lo, hi]], nodata=-1e18), rule).cells[0]
    assert out[0] >= out[1]


def test_normalize_continuous():
    out = normalize_continuous(layer([[2.0, 4.0, 6.0]]), "higher")
    assert out.cells[0].tolist() == [0.0, 0.5, 1.0]
    inv = normalize_continuous(layer([[2.0, 4.0, 6.0]]), "lower")
    assert inv.cells[0].tolist() == [1.0, 0.5, 0.0]


def test_normalize_constant_layer_rejected():
    with pytest.raises(ValueError, match="zero spread"):
        normalize_continuous(layer([[3.0, 3.0, 3.0]]), "higher")


def test_reclassify_categories():
    lookup = {11: 3, 21: 0, 41: 1, 81: 2}
    out = reclassify_categories(layer([[11.0, 21.0, 41.0, 81.0]]), lookup)
    assert out.cells[0].tolist() == [0.0, 1.0, 2.0 / 3.0, 1.0 / 3.0]
    with pytest.raises(ValueError, match="no band"):
        reclassify_categories(layer([[99.0]]), lookup)


def test_criteria_set_invariants():
    good = layer([[0.0, 1.0]])
    with pytest.raises(ValueError, match="outside"):
        CriteriaSet(("a",), (layer([[0.0, 2.0]]),))
    cs = CriteriaSet(("a", "b"), (good, layer([[0.5, 0.25]], name="b")))
    assert cs.k == 2
    feats = cs.features_at(np.array([0]), np.array([1]))
    assert feats.tolist() == [[1.0, 0.25]]


def test_rules_config_round_trip(tmp_path):
    rules = [BandRule("road_distance", "lower", (500.0, 1000.0, 2000.0)),
             ContinuousRule("sdr", "higher")]
    save_rules(rules, tmp_path / "criteria.cfg")
    loaded = load_rules(tmp_path / "criteria.cfg")
    assert loaded == rules


def test_build_criteria_order_follows_rules():
    raw = {"a": layer([[0.0, 10.0]], name="a"),
           "b": layer([[5.0, 1.0]], name="b")}
    rules = [ContinuousRule("b", "higher"), ContinuousRule("a", "lower")]
    cs = build_criteria(raw, rules)
    assert cs.names == ("b", "a")
    with pytest.raises(ValueError, match="no raw layer"):
        build_criteria(raw, [ContinuousRule("missing", "lower")])

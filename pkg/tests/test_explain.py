import numpy as np
import pytest

from sitewise import learn
from sitewise.explain import (MAX_EXACT_FEATURES, CollinearityReport,
                              average_weights, coalition_weights,
                              collinearity, exact_shapley, model_importance,
                              permutation_importance, prune_features,
                              sampled_shapley, shap_to_weights,
                              shapley_from_values,
                              shapley_permutation_oracle)


def random_value_table(k, rng):
    return rng.normal(size=1 << k)


# ---------------------------------------------------------------------------
# Shapley axioms against the permutation oracle
# ---------------------------------------------------------------------------

def test_matches_permutation_oracle_small_k():
    rng = np.random.default_rng(0)
    for k in (2, 3, 4, 5):
        table = random_value_table(k, rng)
        phi = shapley_from_values(table, k)
        oracle = shapley_permutation_oracle(lambda m: table[m], k)
        assert np.max(np.abs(phi - oracle)) < 1e-9


def test_efficiency_axiom():
    rng = np.random.default_rng(1)
    table = random_value_table(5, rng)
    phi = shapley_from_values(table, 5)
    assert phi.sum() == pytest.approx(table[-1] - table[0], abs=1e-9)


def test_dummy_axiom():
    rng = np.random.default_rng(2)
    k = 4
    base = random_value_table(k - 1, rng)
    # feature 3 never changes the value
    table = np.empty(1 << k)
    for m in range(1 << k):
        table[m] = base[m & 0b111]
    phi = shapley_from_values(table, k)
    assert phi[3] == 0.0


def test_symmetry_axiom():
    # v({1}) = v({2}) = 1, v({1,2}) = 2
    table = np.array([0.0, 1.0, 1.0, 2.0])
    phi = shapley_from_values(table, 2)
    assert phi[0] == pytest.approx(1.0)
    assert phi[1] == pytest.approx(1.0)


def test_linearity_axiom():
    rng = np.random.default_rng(3)
    k = 4
    t1 = random_value_table(k, rng)
    t2 = random_value_table(k, rng)
    a, b = 2.5, -1.25
    lhs = shapley_from_values(a * t1 + b * t2, k)
    rhs = a * shapley_from_values(t1, k) + b * shapley_from_values(t2, k)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_coalition_weights_sum():
    for k in (2, 5, 8):
        w = coalition_weights(k)
        sizes = np.array([bin(m).count("1") for m in range(1 << (k - 1))])
        # weights over subsets of N\{i} sum to 1
        total = sum(w[bin(m).count('1')] for m in range(1 << (k - 1)))
        assert total == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# exact_shapley over models
# ---------------------------------------------------------------------------

class AdditiveModel:
    n_classes = 1

    def __init__(self, coef):
        self.coef = np.asarray(coef, np.float64)

    def predict_proba(self, X):
        return (X @ self.coef)[:, None]


def test_additive_model_attribution():
    model = AdditiveModel([2.0, 3.0, 5.0])
    rep = exact_shapley(model, np.array([[1.0, 1.0, 1.0]]),
                        np.zeros((1, 3)), class_index=0)
    assert np.allclose(rep.values[0, :, 0], [2.0, 3.0, 5.0])
    assert rep.base_values[0] == pytest.approx(0.0)
    assert rep.full_values[0, 0] == pytest.approx(10.0)


def test_exact_shapley_efficiency_on_real_model():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(80, 4))
    y = (X[:, 0] + X[:, 1] > 0).astype(int) + 2 * (X[:, 2] > 0).astype(int)
    model = learn.fit("random_forest", X, y,
                      params={"n_trees": 30}, seed=0)
    rep = exact_shapley(model, X[:6], X[10:40], feature_names="abcd")
    for i in range(6):
        for ci in range(4):
            total = rep.values[i, :, ci].sum()
            assert total == pytest.approx(
                rep.full_values[i, ci] - rep.base_values[ci], abs=1e-6)


def test_exact_shapley_k_limit():
    model = AdditiveModel(np.ones(MAX_EXACT_FEATURES + 1))
    big = np.ones((1, MAX_EXACT_FEATURES + 1))
    with pytest.raises(ValueError, match="exceeds"):
        exact_shapley(model, big, big, class_index=0)
    with pytest.raises(ValueError, match="background"):
        exact_shapley(AdditiveModel([1.0]), np.ones((1, 1)),
                      np.empty((0, 1)), class_index=0)


def test_sampled_shapley_agrees_on_additive_model():
    model = AdditiveModel([1.0, -2.0, 0.5])
    x = np.array([[1.0, 1.0, 1.0]])
    mean, stderr = sampled_shapley(model, x, np.zeros((1, 3)), class_index=0,
                                   n_permutations=16, seed=0)
    # additive models have zero estimator variance
    assert np.allclose(mean[0], [1.0, -2.0, 0.5])
    assert np.max(stderr) < 1e-12


# ---------------------------------------------------------------------------
# shap_to_weights
# ---------------------------------------------------------------------------

def _report_with(values, names):
    from sitewise.explain import ShapleyReport

    values = np.asarray(values, np.float64)[None, :, None]
    return ShapleyReport(feature_names=tuple(names), classes=(0,),
                         sample_ids=np.array([0]), values=values,
                         base_values=np.zeros(1), full_values=np.zeros((1, 1)))


def test_shap_to_weights_normalizes():
    rep = _report_with([3.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], "abcdefg")
    w = shap_to_weights(rep)
    assert w.weights.sum() == pytest.approx(1.0)
    assert w.weights[0] == pytest.approx(3.0 / 9.0)


def test_shap_to_weights_single_feature_one_hot():
    rep = _report_with([0.0, 0.7, 0.0], "abc")
    w = shap_to_weights(rep)
    assert w.weights.tolist() == [0.0, 1.0, 0.0]


def test_shap_to_weights_rejects_all_zero():
    rep = _report_with([0.0, 0.0], "ab")
    with pytest.raises(ValueError, match="zero"):
        shap_to_weights(rep)


def test_shap_to_weights_scale_invariant():
    a = shap_to_weights(_report_with([2.0, 3.0, 5.0], "abc"))
    b = shap_to_weights(_report_with([20.0, 30.0, 50.0], "abc"))
    assert np.array_equal(a.weights, b.weights)


def test_table_structure_seven_weights_per_model():
    # seven features per model row, each row summing to one
    rng = np.random.default_rng(5)
    names = tuple("abcdefg")
    vectors = []
    for _ in range(5):
        rep = _report_with(rng.uniform(0.1, 1.0, 7), names)
        w = shap_to_weights(rep)
        assert len(w.weights) == 7
        assert w.weights.sum() == pytest.approx(1.0, abs=1e-9)
        vectors.append(w)
    avg = average_weights(vectors)
    assert avg.weights.sum() == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------------------
# collinearity
# ---------------------------------------------------------------------------

def test_collinearity_orthogonal_columns_unit_vif():
    rng = np.random.default_rng(6)
    # orthogonalize against the ones vector too, so the columns stay
    # mutually orthogonal after mean-centering
    full, _ = np.linalg.qr(np.column_stack([np.ones(60),
                                            rng.normal(size=(60, 3))]))
    q = full[:, 1:]
    rep = collinearity(q)
    assert np.allclose(rep.vif, 1.0, atol=1e-9)
    assert np.allclose(rep.tolerance, 1.0 / rep.vif, atol=1e-9)
    assert np.allclose(np.diag(rep.correlation), 1.0)
    assert np.allclose(rep.correlation, rep.correlation.T)


def test_collinearity_duplicate_column_flagged_infinite():
    rng = np.random.default_rng(7)
    x = rng.normal(size=50)
    X = np.column_stack([x, x, rng.normal(size=50)])
    rep = collinearity(X)
    assert np.isinf(rep.vif[0]) and np.isinf(rep.vif[1])
    assert rep.tolerance[0] == 0.0


def test_collinearity_controlled_r_squared():
    # build a column with R^2 = 0.75 against the others
    rng = np.random.default_rng(8)
    n = 4000
    z = rng.normal(size=n)
    noise = rng.normal(size=n)
    z = (z - z.mean()) / z.std()
    noise = noise - noise.mean()
    noise -= z * (noise @ z) / (z @ z)  # exactly orthogonal to z
    noise /= noise.std()
    target = np.sqrt(0.75) * z + np.sqrt(0.25) * noise
    X = np.column_stack([target, z])
    rep = collinearity(X)
    assert rep.vif[0] == pytest.approx(4.0, rel=1e-6)
    assert rep.tolerance[0] == pytest.approx(0.25, rel=1e-6)


def test_collinearity_preconditions():
    with pytest.raises(ValueError, match="rows"):
        collinearity(np.ones((3, 3)))
    rng = np.random.default_rng(9)
    X = rng.normal(size=(30, 2))
    X[:, 1] = 5.0
    with pytest.raises(ValueError, match="constant"):
        collinearity(X)


# ---------------------------------------------------------------------------
# importance and pruning
# ---------------------------------------------------------------------------

def test_stump_forest_importance_on_single_feature():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(200, 3))
    y = (X[:, 1] > 0).astype(int)
    model = learn.fit("random_forest", X, y,
                      params={"n_trees": 20, "max_depth": 1}, seed=0)
    imp = model_importance(model, X, y)
    assert imp[1] > 0.95


def test_permutation_importance_of_ignored_feature_near_zero():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(240, 3))
    y = (X[:, 0] > 0).astype(int)
    model = learn.fit("knn", X[:, :1], y, params={"k": 5}, seed=0)

    class Wrapper:
        n_classes = 4
        kind = "knn"

        def predict(self, Z):
            return model.predict(Z[:, :1])

    imp = permutation_importance(Wrapper(), X, y, seed=0)
    assert abs(imp[2]) < 0.02


def test_importance_ranking_recovers_planted_top_feature():
    rng = np.random.default_rng(12)
    X = rng.random(size=(400, 4))
    score = X @ np.array([0.6, 0.25, 0.1, 0.05])
    y = np.digitize(score, np.quantile(score, [0.25, 0.5, 0.75]))
    for kind in ("random_forest", "gbt", "logistic"):
        model = learn.fit(kind, X, y, seed=0)
        imp = model_importance(model, X, y, seed=0)
        assert int(np.argmax(imp)) == 0, kind


def test_prune_features_drops_near_zero_pair():
    rng = np.random.default_rng(13)
    names = tuple(f"f{i}" for i in range(9))
    importances = {}
    for kind in ("a", "b", "c"):
        scores = rng.uniform(0.5, 1.0, 9)
        scores[4] = 1e-4
        scores[7] = 1e-4
        importances[kind] = scores
    retained, dropped, _ = prune_features(importances, names)
    assert len(retained) == 7
    assert set(dropped) == {"f4", "f7"}


def test_prune_features_uniform_keeps_all():
    names = ("a", "b", "c")
    retained, dropped, _ = prune_features({"m": np.ones(3)}, names)
    assert retained == names and dropped == ()


def test_prune_features_zero_threshold_identity():
    names = ("a", "b")
    retained, _, _ = prune_features({"m": np.array([1.0, 1e-9])}, names,
                                    threshold_frac=0.0)
    assert retained == names


def test_prune_features_never_drops_everything():
    with pytest.raises(ValueError, match="every feature"):
        prune_features({"m": np.zeros(2) }, ("a", "b"), threshold_frac=2.0)

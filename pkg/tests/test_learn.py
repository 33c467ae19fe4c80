import numpy as np
import pytest

from sitewise import learn
from sitewise.learn import (KnnClassifier, LogisticRegressionOvR, RandomForest,
                            StandardScaler, binary_auc, binary_metrics,
                            confusion_matrix, default_grid, evaluate,
                            grid_search, load_model, save_model, smote_enn,
                            stratified_folds)
from sitewise.learn.resample import enn_filter, smote


def four_cluster_data(n_per=60, seed=0, spread=0.25):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 4.0], [4.0, 4.0]])
    X = np.vstack([c + spread * rng.normal(size=(n_per, 2)) for c in centers])
    y = np.repeat(np.arange(4), n_per)
    return X, y


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------

def test_scaler_uses_training_rows_only():
    train = np.array([[0.0], [2.0]])
    test = np.array([[4.0]])
    sc = StandardScaler().fit(train)
    assert sc.transform(train).ravel().tolist() == [-1.0, 1.0]
    assert sc.transform(test).ravel().tolist() == [3.0]


# ---------------------------------------------------------------------------
# SMOTE-ENN
# ---------------------------------------------------------------------------

def test_smote_interpolates_on_segment():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [5.0, 0.0], [6.0, 1.0],
                  [5.5, 0.5], [5.2, 0.8]])
    y = np.array([0, 0, 1, 1, 1, 1])
    Xs, ys = smote(X, y, k_smote=1, seed=0)
    synth = Xs[6:]
    assert (ys[6:] == 0).all()
    # points on the segment between (0,0) and (1,1) have equal coordinates
    assert np.allclose(synth[:, 0], synth[:, 1])


def test_enn_removes_outvoted_row():
    X = np.array([[0.0], [0.1], [0.2], [0.15], [9.0]])
    y = np.array([1, 1, 1, 0, 0])
    keep = enn_filter(X, y, k_enn=3, n_classes=2)
    assert not keep[3]   # the 0 surrounded by 1s goes
    assert keep[:3].all()


def test_smote_enn_balanced_separated_is_fixed_point():
    X, y = four_cluster_data(n_per=25, seed=3)
    Xs, ys = smote_enn(X, y, seed=1)
    assert Xs.shape == X.shape
    assert np.array_equal(np.sort(ys), np.sort(y))


def test_smote_enn_balances_counts():
    X, y = four_cluster_data(n_per=40, seed=2)
    keep = np.concatenate([np.arange(40), 40 + np.arange(8),
                           80 + np.arange(40), 120 + np.arange(40)])
    Xs, ys = smote_enn(X[keep], y[keep], seed=5)
    counts = np.bincount(ys, minlength=4)
    assert counts.min() >= 35  # minority lifted, ENN may trim a few


def test_smote_enn_rejects_singleton_class():
    X = np.array([[0.0], [1.0], [2.0]])
    y = np.array([0, 0, 1])
    with pytest.raises(ValueError, match="fewer than 2"):
        smote_enn(X, y)


# ---------------------------------------------------------------------------
# classifiers
# ---------------------------------------------------------------------------

def test_rf_majority_vote_of_trees():
    X, y = four_cluster_data(seed=1)
    model = RandomForest(n_trees=3, seed=0).fit(X, y)
    votes = model._tree_votes(X[:5])
    manual = [np.argmax(np.bincount(votes[:, i], minlength=4))
              for i in range(5)]
    assert np.array_equal(model.predict(X[:5]), manual)


def test_logistic_probability_half_at_zero_activation():
    model = LogisticRegressionOvR(n_classes=2)
    model.coef_ = np.array([[1.0, -2.0], [0.5, 0.5]])
    model.intercept_ = np.array([0.0, -1.0])
    x = np.array([[2.0, 1.0]])  # w.x + q = 0 for the first one-vs-rest model
    p = model.ovr_probabilities(x)
    assert p[0, 0] == pytest.approx(0.5)


def test_knn_k1_memorizes_training_set():
    X, y = four_cluster_data(n_per=20, seed=4)
    model = KnnClassifier(k=1).fit(X, y)
    assert (model.predict(X) == y).all()


def test_knn_k_exceeding_rows_rejected():
    X, y = four_cluster_data(n_per=2, seed=4)
    with pytest.raises(ValueError, match="exceeds"):
        KnnClassifier(k=99).fit(X, y)


@pytest.mark.parametrize("kind", learn.KINDS)
def test_probabilities_sum_to_one(kind):
    X, y = four_cluster_data(n_per=30, seed=6)
    model = learn.fit(kind, X, y, seed=0)
    proba = model.predict_proba(X[:40])
    assert proba.min() >= 0.0
    assert np.max(np.abs(proba.sum(axis=1) - 1.0)) < 1e-9


@pytest.mark.parametrize("kind", learn.KINDS)
def test_fit_deterministic_per_seed(kind):
    X, y = four_cluster_data(n_per=25, seed=7)
    a = learn.fit(kind, X, y, seed=3)
    b = learn.fit(kind, X, y, seed=3)
    assert np.array_equal(a.predict_proba(X), b.predict_proba(X))


@pytest.mark.parametrize("kind", learn.KINDS)
def test_model_io_round_trip(kind, tmp_path):
    X, y = four_cluster_data(n_per=20, seed=8)
    model = learn.fit(kind, X, y, seed=1)
    scaler = StandardScaler().fit(X)
    path = tmp_path / f"{kind}.json"
    save_model(model, path, scaler=scaler)
    back, sc2 = load_model(path)
    assert np.array_equal(model.predict_proba(X), back.predict_proba(X))
    assert np.array_equal(sc2.transform(X), scaler.transform(X))


def test_rf_vote_margin_survives_duplicated_row():
    # well-separated clusters: every tree agrees, so adding an exact
    # duplicate of a training row cannot flip a margin->=2 vote
    X, y = four_cluster_data(n_per=30, seed=9, spread=0.1)
    probe = np.array([[0.1, 0.1], [3.9, 3.9]])
    before = RandomForest(n_trees=15, seed=2).fit(X, y)
    votes = before._tree_votes(probe)
    counts = np.sort(np.bincount(votes[:, 0], minlength=4))
    assert counts[-1] - counts[-2] >= 2
    X2 = np.vstack([X, X[0]])
    y2 = np.append(y, y[0])
    after = RandomForest(n_trees=15, seed=2).fit(X2, y2)
    assert np.array_equal(before.predict(probe), after.predict(probe))


def test_rf_results_invariant_to_thread_count(monkeypatch):
    X, y = four_cluster_data(n_per=40, seed=20)
    monkeypatch.setenv("SITEWISE_THREADS", "1")
    serial = RandomForest(n_trees=12, seed=5).fit(X, y)
    monkeypatch.setenv("SITEWISE_THREADS", "4")
    pooled = RandomForest(n_trees=12, seed=5).fit(X, y)
    assert np.array_equal(serial.predict_proba(X), pooled.predict_proba(X))
    assert np.array_equal(serial.importances_, pooled.importances_)


def test_no_leakage_test_rows_untouched():
    X, y = four_cluster_data(n_per=30, seed=10)
    test = X[:20].copy()
    digest = test.tobytes()
    scaler = StandardScaler().fit(X[20:])
    Xb, yb = smote_enn(scaler.transform(X[20:]), y[20:], seed=0)
    learn.fit("random_forest", Xb, yb, seed=0)
    assert test.tobytes() == digest


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def test_binary_metrics_fixture():
    acc, prec, rec, f1 = binary_metrics(tp=40, fp=10, fn=20, tn=30)
    assert acc == pytest.approx(0.7)
    assert prec == pytest.approx(0.8)
    assert rec == pytest.approx(0.6667, abs=5e-5)
    assert f1 == pytest.approx(0.7273, abs=5e-5)


def test_binary_auc_perfect_separation():
    labels = np.array([0, 0, 1, 1])
    scores = np.array([0.1, 0.2, 0.8, 0.9])
    assert binary_auc(labels, scores) == 1.0


def test_binary_auc_concordance_example():
    labels = np.array([1, 0, 1, 0])
    scores = np.array([0.9, 0.8, 0.7, 0.1])
    # pairs: (0.9,0.8)+, (0.9,0.1)+, (0.7,0.8)-, (0.7,0.1)+ -> 3/4
    assert binary_auc(labels, scores) == pytest.approx(0.75)


def concordance_oracle(labels, scores):
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def test_binary_auc_matches_concordance_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(6, 40))
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        scores = np.round(rng.random(n), 1)  # coarse grid forces ties
        assert binary_auc(labels, scores) == pytest.approx(
            concordance_oracle(labels, scores), abs=1e-12)


def test_evaluate_report_contracts():
    X, y = four_cluster_data(n_per=25, seed=12)
    model = learn.fit("knn", X, y, params={"k": 3}, seed=0)
    rep = evaluate(model, X, y)
    assert rep.confusion.sum() == rep.n_test == y.shape[0]
    assert rep.accuracy == pytest.approx(rep.recall_weighted)
    for value in (rep.accuracy, rep.precision_weighted, rep.f1_weighted,
                  rep.auc_ovr):
        assert 0.0 <= value <= 1.0
    d = rep.to_dict()
    back = learn.EvaluationReport.from_dict(d)
    assert np.array_equal(back.confusion, rep.confusion)


def test_evaluate_flags_absent_class():
    X, y = four_cluster_data(n_per=20, seed=13)
    model = learn.fit("knn", X, y, params={"k": 3}, seed=0)
    mask = y != 2
    rep = evaluate(model, X[mask], y[mask])
    assert np.isnan(rep.per_class_accuracy[2])
    assert rep.accuracy == pytest.approx(rep.recall_weighted)


def test_evaluate_empty_test_rejected():
    X, y = four_cluster_data(n_per=20, seed=13)
    model = learn.fit("knn", X, y, params={"k": 3}, seed=0)
    with pytest.raises(ValueError, match="empty"):
        evaluate(model, X[:0], y[:0])


def test_accuracy_equals_weighted_recall_randomized():
    rng = np.random.default_rng(14)
    for _ in range(10):
        y_true = rng.integers(0, 4, 50)
        y_pred = rng.integers(0, 4, 50)
        cm = confusion_matrix(y_true, y_pred, 4)
        acc, _, rec_w, _ = learn.metrics.weighted_scores(cm)
        assert acc == pytest.approx(rec_w, abs=1e-12)


# ---------------------------------------------------------------------------
# grid search
# ---------------------------------------------------------------------------

def test_stratified_folds_cover_all_classes():
    _, y = four_cluster_data(n_per=15, seed=15)
    folds = stratified_folds(y, 5, seed=0)
    for f in range(5):
        assert set(y[folds == f]) == {0, 1, 2, 3}
    with pytest.raises(ValueError, match="folds"):
        stratified_folds(np.array([0, 0, 1]), 3, seed=0)


def test_grid_search_single_point():
    X, y = four_cluster_data(n_per=15, seed=16)
    best, results = grid_search("knn", X, y, [{"k": 3}], folds=3, seed=0)
    assert best == {"k": 3}
    assert len(results) == 1


def test_grid_search_duplicate_points_first_wins():
    X, y = four_cluster_data(n_per=15, seed=17)
    grid = [{"k": 3}, {"k": 3}]
    best, results = grid_search("knn", X, y, grid, folds=3, seed=0)
    assert best is grid[0]
    assert results[0]["mean_f1"] == results[1]["mean_f1"]


def test_grid_search_prefers_small_k_on_tight_clusters():
    X, y = four_cluster_data(n_per=40, seed=18, spread=0.15)
    best, _ = grid_search("knn", X, y, [{"k": 1}, {"k": 51}], folds=5, seed=0)
    assert best == {"k": 1}


def test_grid_search_empty_grid_rejected():
    X, y = four_cluster_data(n_per=15, seed=19)
    with pytest.raises(ValueError, match="empty"):
        grid_search("knn", X, y, [], folds=3, seed=0)


def test_default_grids_shape():
    assert len(default_grid("random_forest", 7)) == 4
    assert len(default_grid("gbt", 7)) == 8
    assert len(default_grid("svc", 7)) == 4
    assert len(default_grid("logistic", 7)) == 2
    assert len(default_grid("knn", 7)) == 3
    with pytest.raises(ValueError):
        default_grid("mystery", 7)

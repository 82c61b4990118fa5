import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geocoherence.data import SynthConfig, generate_dataset
from geocoherence.ensemble import EnsembleConfig
from geocoherence.errors import ConfigError
from geocoherence.evaluation import (
    METRIC_NAMES,
    confusion_matrix,
    cross_validate,
    cross_validate_matrix,
    encode_labels,
    experiment_json,
    experiment_table,
    run_experiment,
    slice_alpha,
    stratified_folds,
    sweep_csv,
    weighted_metrics,
)
from geocoherence.features import ExtractionConfig, FeatureMatrix, extract_feature_matrix

from oracles import hand_counted_metrics


def _separable_matrix(n_per_class=20, q=3, seed=0):
    rng = np.random.default_rng(seed)
    values = rng.normal(scale=0.1, size=(n_per_class * q, 7))
    labels = []
    for c in range(q):
        values[c * n_per_class:(c + 1) * n_per_class, 0] += 10.0 * c
        labels += [f"user{c}"] * n_per_class
    cols = ["lat", "lon", "month", "day", "hour", "minute", "weekday"]
    return FeatureMatrix(values, labels, cols, 0)


def test_encoding_is_sorted_lexicographic():
    enc = encode_labels(["user2", "user1", "user2"])
    assert enc.classes == ["user1", "user2"]
    assert enc.q == 2
    assert enc.encode(["user2", "user1", "user2"]).tolist() == [1, 0, 1]
    assert enc.decode([1, 0]) == ["user2", "user1"]


def test_encoding_empty_raises():
    with pytest.raises(ConfigError):
        encode_labels([])


def test_stratified_counts_balanced():
    labels = ["A"] * 8 + ["B"] * 4
    folds = stratified_folds(labels, k=4, seed=0)
    arr = np.asarray(labels)
    for f in range(4):
        mask = folds.fold_of == f
        assert np.sum(mask & (arr == "A")) == 2
        assert np.sum(mask & (arr == "B")) == 1


def test_stratified_small_class_warns():
    labels = ["A"] * 30 + ["B"] * 3
    with pytest.warns(UserWarning):
        folds = stratified_folds(labels, k=10, seed=1)
    b_folds = folds.fold_of[np.asarray(labels) == "B"]
    assert len(set(b_folds.tolist())) == 3
    assert folds.small_classes == ["B"]


def test_stratified_requires_k_at_least_two():
    with pytest.raises(ConfigError):
        stratified_folds(["A", "B"], k=1, seed=0)


def test_stratified_deterministic():
    labels = list("ABCAB" * 20)
    a = stratified_folds(labels, 5, seed=3)
    b = stratified_folds(labels, 5, seed=3)
    c = stratified_folds(labels, 5, seed=4)
    assert np.array_equal(a.fold_of, b.fold_of)
    assert not np.array_equal(a.fold_of, c.fold_of)


@given(
    st.lists(st.sampled_from("ABCD"), min_size=2, max_size=60),
    st.sampled_from([2, 5, 10]),
    st.integers(0, 1000),
)
@settings(max_examples=80, deadline=None)
def test_stratified_partition_property(labels, k, seed):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        folds = stratified_folds(labels, k, seed)
    assert folds.fold_of.shape == (len(labels),)
    assert np.all(folds.fold_of >= 0) and np.all(folds.fold_of < k)
    arr = np.asarray(labels)
    for cls in set(labels):
        counts = np.bincount(folds.fold_of[arr == cls], minlength=k)
        assert counts.max() - counts.min() <= 1


def test_confusion_matrix_counts():
    y_true = np.array([0, 0, 1, 1, 2])
    y_pred = np.array([0, 1, 1, 1, 0])
    cm = confusion_matrix(y_true, y_pred, 3)
    assert cm.tolist() == [[1, 1, 0], [0, 2, 0], [1, 0, 0]]
    assert cm.sum() == 5


def test_weighted_metrics_binary_hand_example():
    # 9 true positives, 1 miss for class 0; one stray prediction from class 1
    cm = np.array([[9, 1], [1, 89]])
    r = weighted_metrics(cm)
    oracle = hand_counted_metrics(cm)
    for name in METRIC_NAMES:
        assert r.metric(name) == pytest.approx(oracle[name], abs=1e-12)
    assert r.accuracy == pytest.approx(0.98)
    assert r.n_samples == 100


def test_weighted_metrics_perfect_diagonal():
    r = weighted_metrics(np.diag([5, 7, 3]))
    assert r.f1 == 1.0 and r.accuracy == 1.0 and r.precision == 1.0
    assert r.fpr == 0.0 and r.fnr == 0.0


def test_weighted_metrics_three_class_oracle():
    cm = np.array([[2, 1, 0], [0, 3, 0], [1, 0, 3]])
    r = weighted_metrics(cm)
    oracle = hand_counted_metrics(cm)
    for name in METRIC_NAMES:
        assert r.metric(name) == pytest.approx(oracle[name], abs=1e-12)


def test_weighted_metrics_empty_raises():
    with pytest.raises(ConfigError):
        weighted_metrics(np.zeros((3, 3)))


@pytest.mark.parametrize("seed", range(10))
def test_recall_equals_accuracy(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.integers(2, 6))
    cm = rng.integers(0, 40, size=(q, q))
    cm[0, 0] += 1  # keep the matrix nonempty
    r = weighted_metrics(cm)
    assert abs(r.recall - r.accuracy) <= 1e-12


def test_metrics_as_percentages():
    r = weighted_metrics(np.array([[9, 1], [1, 89]]))
    pct = r.as_percentages()
    assert pct["accuracy"] == 98.0
    assert all(0.0 <= v <= 100.0 for v in pct.values())


def test_cross_validate_matrix_separable():
    m = _separable_matrix(n_per_class=40)
    r = cross_validate_matrix(m, EnsembleConfig("rf", n_estimators=30, seed=0), k=5, seed=0)
    assert r.accuracy >= 0.99
    assert r.n_samples == len(m.labels)


def test_cross_validate_matrix_uninformative_near_chance():
    rng = np.random.default_rng(1)
    values = rng.normal(size=(200, 7))
    labels = ["a"] * 100 + ["b"] * 100
    m = FeatureMatrix(values, labels, ["c%d" % i for i in range(7)], 0)
    r = cross_validate_matrix(m, EnsembleConfig("rf", n_estimators=20, seed=0), k=5, seed=0)
    assert 0.3 <= r.accuracy <= 0.7


def test_cross_validate_deterministic():
    d = generate_dataset(SynthConfig(n_users=4, samples_per_user=40, seed=2))
    args = (d, ExtractionConfig(alpha=2), EnsembleConfig("rf", n_estimators=5, seed=1), 3, 0)
    a = cross_validate(*args)
    b = cross_validate(*args)
    assert a == b


def test_slice_alpha_prefix_columns():
    d = generate_dataset(SynthConfig(n_users=3, samples_per_user=30, seed=4))
    full = extract_feature_matrix(d, ExtractionConfig(alpha=5))
    direct = extract_feature_matrix(d, ExtractionConfig(alpha=2))
    sliced = slice_alpha(full, 2)
    assert sliced.columns == direct.columns
    assert np.array_equal(sliced.values, direct.values)
    with pytest.raises(ConfigError):
        slice_alpha(full, 6)


def test_run_experiment_structure():
    d = generate_dataset(SynthConfig(n_users=3, samples_per_user=60, seed=6))
    result = run_experiment(
        d,
        ["rf", "extratrees"],
        [1, 3],
        model=EnsembleConfig(n_estimators=5, seed=0),
        k=3,
        seed=0,
    )
    assert result.alphas == [0, 1, 3]
    assert set(result.reports) == {(a, z) for a in ("rf", "extratrees") for z in (0, 1, 3)}
    for alg in result.algorithms:
        assert result.deltas[(alg, 0)] == {m: 0.0 for m in METRIC_NAMES}
        for alpha in result.alphas:
            base = result.reports[(alg, 0)].as_percentages()
            cur = result.reports[(alg, alpha)].as_percentages()
            for m in METRIC_NAMES:
                assert result.deltas[(alg, alpha)][m] == pytest.approx(
                    round(cur[m] - base[m], 2)
                )


def test_run_experiment_rejects_empty_alpha_list():
    d = generate_dataset(SynthConfig(n_users=2, samples_per_user=10, seed=0))
    with pytest.raises(ConfigError):
        run_experiment(d, ["rf"], [])


def _tiny_result():
    d = generate_dataset(SynthConfig(n_users=3, samples_per_user=30, seed=8))
    return run_experiment(d, ["rf"], [1, 2], model=EnsembleConfig(n_estimators=3, seed=0),
                          k=2, seed=0)


def test_experiment_json_round_trips():
    import json

    doc = json.loads(experiment_json(_tiny_result()))
    assert doc["algorithms"] == ["rf"]
    assert doc["alphas"] == [0, 1, 2]
    assert len(doc["cells"]) == 3
    labels = {c["label"] for c in doc["cells"]}
    assert labels == {"NoDC", "1-DC", "2-DC"}


def test_experiment_table_has_six_metric_rows():
    table = experiment_table(_tiny_result())
    lines = table.strip().splitlines()
    assert len(lines) == 1 + len(METRIC_NAMES)
    assert lines[0].startswith("Measure")
    assert lines[1].strip().startswith("F1")


def test_sweep_csv_shape():
    csv = sweep_csv(_tiny_result())
    lines = csv.strip().splitlines()
    assert lines[0].split(",")[:2] == ["algorithm", "alpha"]
    assert len(lines) == 1 + 3  # header + one row per (rf, alpha in {0,1,2})
    assert lines[1].startswith("rf,0,")

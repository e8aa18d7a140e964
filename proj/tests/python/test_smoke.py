import json
import math

import pytest

import qdt


def small_dataset():
    rows = [[0, 0], [0, 1], [1, 0], [1, 1]] * 5
    targets = [float(i % 4) * 10.0 + (i % 3) for i in range(20)]
    return qdt.Dataset.from_rows(rows, targets)


def test_quantile_helpers():
    assert qdt.evenly_spaced(3) == pytest.approx([0.25, 0.5, 0.75])
    assert qdt.empirical_quantile([4.0, 1.0, 3.0, 2.0], 0.5) == pytest.approx(2.5)
    # Underprediction costs q per unit.
    assert qdt.pinball_loss([2.0], 1.0, 0.9) == pytest.approx(0.9)
    assert qdt.pinball_loss([0.0], 1.0, 0.9) == pytest.approx(0.1)


def test_dataset_sorted_by_target():
    ds = small_dataset()
    assert ds.n_samples == 20 and ds.n_features == 2
    assert list(ds.targets) == sorted(ds.targets)


def test_single_matches_simultaneous():
    ds = small_dataset()
    levels = [0.1, 0.5, 0.9]
    model = qdt.fit_simultaneous(ds, levels, max_depth=2)
    for q, loss in zip(levels, model.training_losses):
        fit = qdt.fit_single(ds, q, max_depth=2)
        assert fit.optimal
        assert fit.error == loss
    naive = qdt.fit_naive(ds, levels, max_depth=2)
    assert naive.training_losses == model.training_losses


def test_model_roundtrip_and_predict():
    ds = small_dataset()
    model = qdt.fit_simultaneous(ds, qdt.evenly_spaced(5), max_depth=2)
    again = qdt.Model.from_json(model.to_json())
    rows = [ds.row(i) for i in range(ds.n_samples)]
    assert again.predict(rows) == model.predict(rows)
    doc = json.loads(model.to_json())
    assert doc["version"] == 1 and len(doc["trees"]) == 5
    m = model.jaccard_matrix(ds)
    assert all(m[i][i] == 1.0 for i in range(5))


def test_density_and_metrics():
    d = qdt.kde_from_quantiles([-1.0, 0.0, 1.0])
    assert d.bandwidth == pytest.approx(3 ** -0.2)
    assert d.cdf(-50.0) == pytest.approx(0.0) and d.cdf(50.0) == pytest.approx(1.0)
    assert qdt.nll([qdt.Density([0.0], 1.0)], [0.0]) == pytest.approx(0.5 * math.log(2 * math.pi))


def test_synth_and_evaluate():
    data = qdt.synth(n=400, seed=3)
    assert data["columns"] == ["c0", "c1", "c2", "c3", "n0", "n1", "n2", "n3", "n4"]
    ds = qdt.Dataset.from_rows(data["rows"], data["targets"])
    levels = qdt.evenly_spaced(9)
    model = qdt.fit_simultaneous(ds, levels, max_depth=3, min_sup=16)
    report = qdt.evaluate(model.predict(data["rows"]), data["targets"], levels, truth=data["truth"])
    assert report["mqe"] > 0 and report["mise"] is not None and report["mise"] >= 0


def test_errors_map_to_exception():
    with pytest.raises(qdt.Error):
        qdt.fit_single(small_dataset(), 1.5)
    with pytest.raises(ValueError):
        qdt.fit_simultaneous(small_dataset(), [0.5, 0.2])

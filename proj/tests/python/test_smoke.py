import numpy as np
import pytest

import cyberchar as cc


def test_states_and_fusion():
    states = cc.enumerate_states()
    assert len(states) == 14
    assert sum(s.is_normal() for s in states) == 1
    assert cc.fuse(0, 0) == cc.FusedClass.Normal
    assert cc.fuse(1, 0, 1) == cc.FusedClass.FDI
    assert cc.fuse(0, 1) == cc.FusedClass.DoS
    with pytest.raises(cc.CyberCharError):
        cc.fuse(0, 0, 1)


def test_metrics_and_confusion():
    m = cc.metrics(tp=1246, fn=6, fp=0, tn=37560)
    assert m["precision"] == 1.0
    assert abs(m["recall"] - 1246 / 1252) < 1e-12
    cm = cc.confusion([0, 1, 1, 0], [0, 1, 0, 0])
    assert cm.tolist() == [[2, 0], [1, 1]]
    fpr, tpr, auc = cc.roc(np.array([0, 0, 1, 1]), [0.1, 0.2, 0.8, 0.9])
    assert auc == 1.0 and fpr[0] == 0.0 and tpr[-1] == 1.0


def test_windowize_shape():
    x = np.arange(30, dtype=float).reshape(10, 3)
    w = cc.windowize(x, 4, 2)
    assert w.shape == (cc.window_count(10, 4, 2), 12)
    assert w[1, :3].tolist() == [6.0, 7.0, 8.0]


def test_fit_predicts_separable_data():
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(-2, 1, (50, 3)), rng.normal(2, 1, (50, 3))])
    y = np.array([0] * 50 + [1] * 50)
    for algo in ["decision_tree", "random_forest", "logistic_regression", "linear_svm", "naive_bayes"]:
        model = cc.fit(algo, X, y, seed=1, n_trees=10)
        acc = np.mean(np.array(model.predict(X)) == y)
        assert acc > 0.95, algo


def test_use_case_end_to_end(tmp_path):
    bundle = cc.build_use_case(seed=7)
    assert len(bundle) == 14
    normal = bundle["normal"]
    assert normal.ot.shape[1] == 67 and normal.it.shape[1] == 11
    cfg = "\n".join(f"level{k}.forest.n_trees = 10" for k in (1, 2, 3))
    clf = cc.train_architecture(bundle, seed=7, config=cfg)
    times, truth, fused = clf.classify_dataset(bundle["dos_low"])
    assert len(times) == len(truth) == len(fused) == cc.window_count(1560, clf.ot_window, 1)
    assert np.mean(np.array(truth) == np.array(fused)) > 0.9
    cc.save_bundle(str(tmp_path / "b"), bundle)
    again = cc.load_bundle(str(tmp_path / "b"))
    assert again.fingerprint() == bundle.fingerprint()


def test_cli_exit_codes(tmp_path):
    assert cc.run_cli(["--set", "schedule.normal=10:-5", "generate", "--out", str(tmp_path / "x")]) == 2
    assert not (tmp_path / "x").exists()

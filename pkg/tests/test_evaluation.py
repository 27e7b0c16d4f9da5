import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermofoot.evaluation import (SMOTE, ConfusionCounts, GridOptions, LeakageAudit,
                                   compute_metrics, confidence_interval, load_archive,
                                   roc_curve_auc, run_grid, smote_oversample, stratified_kfold,
                                   time_inference, write_external_scores)
from thermofoot.evaluation.grid import resolve_workers
from thermofoot.exceptions import (ConfigError, SmoteError, StratificationError,
                                   UndefinedAUCError)
from thermofoot.features import FeatureTable
from thermofoot.learn import ClassifierSpec


class TestFolds:
    def test_small_round_robin(self):
        labels = np.array(["A"] * 6 + ["B"] * 4)
        plan = stratified_kfold(labels, 5, seed=0)
        for f in plan:
            assert len(f.test) == 2
            assert np.sum(labels[f.test] == "A") >= 1

    def test_cohort_fold_sizes(self):
        y = np.array([1] * 244 + [0] * 90)
        plan = stratified_kfold(y, 5, seed=3)
        for f in plan:
            assert y[f.test].sum() in (48, 49)
            assert np.sum(y[f.test] == 0) == 18

    def test_too_few(self):
        with pytest.raises(StratificationError):
            stratified_kfold([0, 1, 1, 1, 1, 1], 5, seed=0)
        with pytest.raises(StratificationError):
            stratified_kfold([0, 0, 1, 1], 5, seed=0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(5, 40), st.integers(5, 40), st.integers(2, 5), st.integers(0, 99))
    def test_partition_invariants(self, n0, n1, k, seed):
        y = np.array([0] * n0 + [1] * n1)
        plan = stratified_kfold(y, k, seed)
        tests = np.concatenate([f.test for f in plan])
        assert np.array_equal(np.sort(tests), np.arange(len(y)))
        for f in plan:
            assert not set(f.train) & set(f.test)
            assert not set(f.validation) & set(f.test)
            assert not set(f.validation) & set(f.train)
            assert len(f.train) + len(f.validation) + len(f.test) == len(y)
            for c, n_c in ((0, n0), (1, n1)):
                expected = n_c * len(f.test) / len(y)
                assert abs(np.sum(y[f.test] == c) - expected) <= 1 + 1e-9

    def test_deterministic(self):
        y = np.array([0] * 20 + [1] * 30)
        a, b = stratified_kfold(y, 5, 4), stratified_kfold(y, 5, 4)
        assert all(np.array_equal(fa.test, fb.test) and np.array_equal(fa.validation, fb.validation)
                   for fa, fb in zip(a, b))


def on_segment(point, originals, tol=1e-9):
    """True when ``point`` lies on a segment between two of ``originals``."""
    for i in range(len(originals)):
        p = originals[i]
        for j in range(len(originals)):
            q = originals[j]
            d = q - p
            dd = d @ d
            if dd == 0:
                if np.max(np.abs(point - p)) <= tol:
                    return True
                continue
            t = (point - p) @ d / dd
            if -tol <= t <= 1 + tol and np.max(np.abs(p + t * d - point)) <= tol:
                return True
    return False


def smote_trial(rng):
    n_min = int(rng.integers(2, 7))
    n_maj = n_min + int(rng.integers(0, 8))
    d = int(rng.integers(1, 4))
    X = np.concatenate([rng.normal(size=(n_min, d)), rng.normal(2, 1, size=(n_maj, d))])
    y = np.array([1] * n_min + [0] * n_maj)
    k = int(rng.integers(1, 7))
    Xs, ys = smote_oversample(X, y, k, int(rng.integers(2 ** 31)))
    ok = np.array_equal(Xs[:len(X)], X) and np.sum(ys == 0) == np.sum(ys == 1)
    for pt in Xs[len(X):]:
        ok = ok and on_segment(pt, X[y == 1])
    return ok


class _FixedRng:
    def __init__(self, lam):
        self.lam = lam

    def integers(self, low, high, size=None):
        return np.zeros(size, dtype=np.int64)

    def random(self, size=None):
        return np.full(size, self.lam)


class TestSmote:
    def test_balanced_unchanged(self):
        X = np.arange(8.0).reshape(4, 2)
        Xs, ys = smote_oversample(X, [0, 1, 0, 1], seed=0)
        assert np.array_equal(Xs, X) and list(ys) == [0, 1, 0, 1]

    def test_midpoint(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0], [5, 5], [6, 6], [7, 7]])
        Xs, ys = smote_oversample(X, [1, 1, 0, 0, 0], 5, seed=_FixedRng(0.5))
        assert np.allclose(Xs[5], [0.5, 0.5]) and ys[5] == 1

    def test_single_minority(self):
        with pytest.raises(SmoteError):
            smote_oversample(np.arange(6.0).reshape(3, 2), [1, 0, 0], seed=0)

    def test_segment_membership(self):
        rng = np.random.default_rng(0)
        assert all(smote_trial(rng) for _ in range(150))

    def test_resampler(self):
        X = np.arange(20.0).reshape(10, 2)
        y = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
        Xs, ys = SMOTE(random_state=1).fit_resample(X, y)
        assert len(ys) == 14 and np.sum(ys == 1) == 7


class TestMetrics:
    def test_perfect(self):
        m = compute_metrics(ConfusionCounts(tp=46, fp=0, tn=22, fn=0))
        for name in ("accuracy", "precision", "sensitivity", "specificity", "f1"):
            assert m.value(name) == 1.0 and m.ci(name) == 0.0

    def test_hand_example(self):
        m = compute_metrics(ConfusionCounts(tp=48, fp=2, tn=18, fn=2))
        dm = m.rows["DM"]
        assert dm["sensitivity"][0] == pytest.approx(0.96)
        assert dm["specificity"][0] == pytest.approx(0.90)
        assert dm["precision"][0] == pytest.approx(0.96)
        assert dm["accuracy"][0] == pytest.approx(66 / 70)
        assert dm["f1"][0] == pytest.approx(0.96)
        cg = m.rows["CG"]
        assert cg["sensitivity"][0] == pytest.approx(0.90)

    def test_zero_denominator_flag(self):
        m = compute_metrics(ConfusionCounts(tp=0, fp=0, tn=10, fn=5))
        assert m.rows["DM"]["precision"][0] == 0.0
        assert "DM:precision_undefined" in m.flags

    def test_ci_values(self):
        assert confidence_interval(0.9671, 334) == pytest.approx(0.0191, abs=2e-4)
        assert confidence_interval(0.9251, 334) == pytest.approx(0.0282, abs=2e-4)
        assert confidence_interval(0.0, 50) == 0 and confidence_interval(1.0, 50) == 0

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 60), st.integers(0, 60), st.integers(0, 60), st.integers(0, 60))
    def test_identities(self, tp, fp, tn, fn):
        c = ConfusionCounts(tp, fp, tn, fn)
        if c.total == 0:
            return
        m = compute_metrics(c)
        assert m.value("accuracy") == pytest.approx((tp + tn) / c.total)
        assert m.value("sensitivity") == pytest.approx(m.value("accuracy"))
        for row in m.rows.values():
            for v, ci in row.values():
                assert 0.0 <= v <= 1.0 + 1e-12 and ci >= 0.0


def mann_whitney_auc(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    wins = sum((p > q) + 0.5 * (p == q) for p in pos for q in neg)
    return wins / (len(pos) * len(neg))


def auc_instance(rng):
    n = int(rng.integers(2, 31))
    labels = rng.integers(0, 2, n)
    labels[0], labels[1] = 0, 1
    scores = rng.integers(0, int(rng.integers(1, 8)), n) / 4.0
    return scores, labels


class TestRoc:
    def test_examples(self):
        assert roc_curve_auc([0.9, 0.8, 0.1, 0.2], [1, 1, 0, 0]).auc == 1.0
        assert roc_curve_auc([0.8, 0.4, 0.6, 0.2], [1, 1, 0, 0]).auc == 0.75
        assert roc_curve_auc([0.3] * 5, [1, 0, 1, 0, 0]).auc == 0.5

    def test_single_class(self):
        with pytest.raises(UndefinedAUCError):
            roc_curve_auc([0.1, 0.2], [1, 1])

    def test_mann_whitney_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            s, y = auc_instance(rng)
            assert abs(roc_curve_auc(s, y).auc - mann_whitney_auc(s, y)) <= 1e-12

    def test_curve_shape(self):
        c = roc_curve_auc([0.9, 0.5, 0.5, 0.1], [1, 0, 1, 0])
        assert c.fpr[0] == 0 and c.tpr[0] == 0 and c.fpr[-1] == 1 and c.tpr[-1] == 1
        assert np.all(np.diff(c.fpr) >= 0) and np.all(np.diff(c.tpr) >= 0)

    def test_matches_sklearn(self):
        from sklearn.metrics import roc_auc_score
        rng = np.random.default_rng(2)
        s, y = rng.random(200), rng.integers(0, 2, 200)
        assert roc_curve_auc(s, y).auc == pytest.approx(roc_auc_score(y, s), abs=1e-12)


class TestTiming:
    def test_positive(self, small_table):
        m = ClassifierSpec("adaboost").build(0).fit(small_table.X, small_table.y)
        assert time_inference(m, small_table.X, 3) > 0

    def test_repetitions_validated(self, small_table):
        m = ClassifierSpec("knn").build().fit(small_table.X, small_table.y)
        with pytest.raises(ConfigError):
            time_inference(m, small_table.X, 0)

    def test_more_estimators_not_faster(self, small_table):
        X, y = small_table.X, small_table.y
        small = ClassifierSpec("random_forest", {"n_estimators": 10}).build(0).fit(X, y)
        big = ClassifierSpec("random_forest", {"n_estimators": 80}).build(0).fit(X, y)
        assert time_inference(big, X, 15) >= time_inference(small, X, 15)

    def test_adaboost_sub_millisecond(self, desk_table):
        cols = list(desk_table.feature_names[:10])
        t = desk_table.select(cols)
        m = ClassifierSpec("adaboost").build(0).fit(t.X, t.y)
        assert time_inference(m, t.X, 10) < 1.0


CHEAP = [ClassifierSpec("lda"), ClassifierSpec("cart", {"max_depth": 3})]


class TestGrid:
    def test_unit_grid(self, small_table):
        rep = run_grid(small_table, ["rf"], [ClassifierSpec("adaboost")], 1, seed=0)
        assert len(rep.results) == 1 and rep.results[0].ok

    def test_cardinality_and_order(self, small_table):
        rep = run_grid(small_table, ["rf", "et"], CHEAP, 3, seed=1)
        assert len(rep.results) == 2 * 2 * 3
        f1 = [r.metrics.value("f1") for r in rep.results]
        assert f1 == sorted(f1, reverse=True)
        for r in rep.results:
            assert len(r.selected_features) == r.k
            assert r.k <= min(len(f["retained"]) for f in rep.folds)

    def test_pooled_counts_cover_every_row(self, small_table):
        rep = run_grid(small_table, ["rf"], CHEAP[:1], 2, seed=1)
        for r in rep.results:
            assert r.metrics.counts.total == len(small_table)

    def test_leakage_audit_clean(self, small_table):
        rep = run_grid(small_table, ["rf", "gb"], CHEAP, 2, seed=2,
                       options=GridOptions(use_validation=True))
        assert rep.audit["checks"] > 0 and rep.audit["violations"] == []

    def test_audit_detects_global_prune(self, small_table):
        rep = run_grid(small_table, ["rf"], CHEAP[:1], 1, seed=2,
                       options=GridOptions(global_prune=True))
        assert {v["stage"] for v in rep.audit["violations"]} == {"prune"}

    def test_audit_hook_flags_test_rows(self):
        plan = stratified_kfold([0] * 5 + [1] * 5, 5, 0)
        audit = LeakageAudit(plan)
        audit.record("fit", 0, plan[0].train)
        assert audit.clean
        audit.record("smote", 0, plan[0].test)
        assert not audit.clean
        with pytest.raises(AssertionError):
            audit.assert_clean()

    def test_smote_first_runs(self, small_table):
        rep = run_grid(small_table, ["et"], CHEAP[:1], 2, seed=2,
                       options=GridOptions(smote_order="smote-first"))
        assert all(r.ok for r in rep.results) and rep.audit["violations"] == []

    def test_k_max_too_large(self, small_table):
        with pytest.raises(ConfigError):
            run_grid(small_table, ["rf"], CHEAP, 39, seed=0)

    def test_failed_run_recorded(self, small_table, tmp_path):
        bad = ClassifierSpec("external", {"path": str(tmp_path / "s.csv")}, name="stub")
        write_external_scores(tmp_path / "s.csv", small_table.subject_ids[:3],
                              small_table.foot_sides[:3], [0, 0, 0], [0.5, 0.5, 0.5])
        rep = run_grid(small_table, ["rf"], [bad, CHEAP[0]], 1, seed=0)
        status = {r.classifier.name: r.status for r in rep.results}
        assert status == {"stub": "failed", "lda": "ok"}
        failed = [r for r in rep.results if not r.ok][0]
        assert "lack an entry" in failed.error and rep.results[-1] is failed

    def test_external_scores_merge(self, small_table, tmp_path):
        plan = stratified_kfold(small_table.y, 5, 4)
        scores = np.where(small_table.y == 1, 0.8, 0.3)
        write_external_scores(tmp_path / "s.csv", small_table.subject_ids,
                              small_table.foot_sides, plan.test_fold_of(), scores)
        spec = ClassifierSpec("external", {"path": str(tmp_path / "s.csv")}, name="mlp")
        rep = run_grid(small_table, ["rf"], [spec], 2, seed=4)
        assert all(r.ok and r.metrics.value("f1") == 1.0 for r in rep.results)

    def test_deterministic_outputs(self, small_table, tmp_path):
        for d in ("a", "b"):
            rep = run_grid(small_table, ["rf", "et"], CHEAP, 2, seed=5)
            rep.write(tmp_path / d)
        for name in ("grid_results.csv", "grid_archive.json", "fold_plan.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_archive_roundtrip(self, small_table, tmp_path):
        rep = run_grid(small_table, ["rf"], CHEAP, 2, seed=5)
        rep.write(tmp_path)
        back = load_archive(tmp_path / "grid_archive.json")
        assert [r.run_id for r in back.results] == [r.run_id for r in rep.results]
        assert np.array_equal(back.results[0].scores, rep.results[0].scores)
        doc = json.loads((tmp_path / "grid_archive.json").read_text())
        assert doc["config"]["k_max"] == 2 and "inference_ms" not in doc["results"][0]["metrics"]

    def test_threads_env_caps_workers(self, monkeypatch):
        monkeypatch.setenv("THERMOFOOT_THREADS", "2")
        assert resolve_workers(8) == 2
        monkeypatch.setenv("THERMOFOOT_THREADS", "zero")
        with pytest.raises(ConfigError):
            resolve_workers(2)

    def test_parallel_matches_serial(self, small_table, tmp_path):
        serial = run_grid(small_table, ["rf"], CHEAP, 2, seed=6, options=GridOptions(n_jobs=1))
        par = run_grid(small_table, ["rf"], CHEAP, 2, seed=6, options=GridOptions(n_jobs=2))
        serial.write(tmp_path / "s")
        par.write(tmp_path / "p")
        assert (tmp_path / "s" / "grid_archive.json").read_bytes() == \
            (tmp_path / "p" / "grid_archive.json").read_bytes()


def test_feature_table_helpers(small_table):
    sub = small_table.select(["age", "TCI"])
    assert isinstance(sub, FeatureTable) and sub.X.shape == (len(small_table), 2)

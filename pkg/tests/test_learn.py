from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermofoot.exceptions import (ConfigError, ShapeError, UnsupportedLabelError,
                                   UnsupportedOperationError, ValidationError)
from thermofoot.learn import (AdaBoostClassifier, ClassifierSpec, DecisionTreeClassifier,
                              ExtraTreesClassifier, GradientBoostingClassifier,
                              KNeighborsClassifier, LinearDiscriminantAnalysis,
                              LogisticRegression, RandomForestClassifier, feature_importances,
                              load_model, model_from_dict, model_to_dict, rank_features,
                              samme_alpha, save_model)
from thermofoot.learn.linear import logistic_objective

ALL_KINDS = ["cart", "random_forest", "extra_trees", "adaboost", "gradient_boosting", "knn",
             "logistic", "lda"]


def _gini(labels):
    n = len(labels)
    if n == 0:
        return Fraction(0)
    p = Fraction(sum(labels), n)
    return 2 * p * (1 - p)


def brute_force_root_split(X, y):
    """Exhaustive Gini search with exact rationals; ties to lowest feature then threshold."""
    n = len(y)
    parent = _gini(list(y))
    best = None
    for f in range(X.shape[1]):
        vals = sorted(set(X[:, f].tolist()))
        for lo, hi in zip(vals, vals[1:]):
            thr = (lo + hi) / 2.0
            left = [int(v) for v, x in zip(y, X[:, f]) if x <= thr]
            right = [int(v) for v, x in zip(y, X[:, f]) if x > thr]
            dec = parent - Fraction(len(left), n) * _gini(left) - Fraction(len(right), n) * _gini(right)
            if best is None or dec > best[0]:
                best = (dec, f, thr)
    return best


def random_instance(rng):
    n = int(rng.integers(2, 17))
    d = int(rng.integers(1, 4))
    X = rng.integers(0, 6, size=(n, d)) / 2.0
    y = rng.integers(0, 2, size=n)
    if y.min() == y.max():
        y[0] = 1 - y[0]
    return X, y


def check_cart_root_matches_oracle(n_instances=500, seed=0):
    """Number of instances whose fitted root split differs from the exhaustive search."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(n_instances):
        X, y = random_instance(rng)
        oracle = brute_force_root_split(X, y)
        tree = DecisionTreeClassifier().fit(X, y).tree_
        if oracle is None:
            mismatches += int(tree.feature[0] != -1)
        else:
            mismatches += int(tree.feature[0] != oracle[1] or tree.threshold[0] != oracle[2])
    return mismatches


class TestCart:
    def test_oracle_equivalence(self):
        assert check_cart_root_matches_oracle(200, seed=1) == 0

    def test_stump_on_separable_data(self):
        X = np.array([[1.0], [2.0], [5.0], [6.0]])
        y = np.array([0, 0, 1, 1])
        m = DecisionTreeClassifier(max_depth=1).fit(X, y)
        assert m.tree_.threshold[0] == 3.5
        assert (m.predict(X) == y).mean() == 1.0

    def test_gini_decrease_example(self):
        m = DecisionTreeClassifier(max_depth=1).fit(np.array([[1.0], [2], [3], [4]]), [0, 0, 1, 1])
        assert m.tree_.threshold[0] == 2.5
        assert m.tree_.impurity[0] == pytest.approx(0.5)
        assert m.tree_.impurity_decrease[0] == pytest.approx(0.5)

    def test_leaf_probabilities_sum_to_one(self, small_table):
        t = DecisionTreeClassifier(max_depth=3).fit(small_table.X, small_table.y).tree_
        leaves = t.feature == -1
        proba = t.value[leaves]
        assert np.all((proba >= 0) & (proba <= 1))
        assert np.all(t.impurity_decrease >= -1e-12)

    def test_stump_importance(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(40, 3))
        y = (X[:, 2] > 0).astype(int)
        imp = DecisionTreeClassifier(max_depth=1).fit(X, y).feature_importances_
        assert list(imp) == [0.0, 0.0, 1.0]

    def test_single_class_rejected(self):
        with pytest.raises(UnsupportedLabelError):
            DecisionTreeClassifier().fit(np.ones((3, 1)), [1, 1, 1])

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            DecisionTreeClassifier().fit(np.array([[np.nan], [1.0]]), [0, 1])


class TestForests:
    def test_one_tree_forest_equals_cart(self, small_table):
        X, y = small_table.X, small_table.y
        rf = RandomForestClassifier(n_estimators=1, bootstrap=False, max_features=None,
                                    random_state=4).fit(X, y)
        cart = DecisionTreeClassifier().fit(X, y)
        assert np.array_equal(rf.predict_proba(X), cart.predict_proba(X))
        assert np.array_equal(rf.trees_[0].threshold, cart.tree_.threshold)
        assert np.array_equal(rf.trees_[0].feature, cart.tree_.feature)

    @pytest.mark.parametrize("cls", [RandomForestClassifier, ExtraTreesClassifier])
    def test_noise_feature_ranked_last(self, cls):
        rng = np.random.default_rng(5)
        n = 300
        X = np.column_stack([rng.normal(size=n), rng.normal(size=n), rng.normal(size=n)])
        y = ((X[:, 0] + X[:, 1]) > 0).astype(int)
        imp = cls(n_estimators=200, random_state=0).fit(X, y).feature_importances_
        assert np.argmin(imp) == 2
        assert abs(imp.sum() - 1) < 1e-9

    def test_extra_trees_thresholds_in_range(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(3, 7, size=(50, 2))
        y = (X[:, 0] > 5).astype(int)
        m = ExtraTreesClassifier(n_estimators=5, random_state=2).fit(X, y)
        for t in m.trees_:
            split = t.feature >= 0
            thr = t.threshold[split]
            assert np.all((thr >= 3) & (thr <= 7))


class TestBoosting:
    def test_alpha_formula(self):
        assert samme_alpha(0.25) == pytest.approx(np.log(3))

    def test_training_error_non_increasing(self):
        X = np.array([[0.0], [1], [2], [3], [4], [5], [6], [7]])
        y = np.array([0, 0, 1, 1, 0, 0, 1, 1])
        m = AdaBoostClassifier(n_estimators=15).fit(X, y)
        errs = [np.mean((p[:, 1] >= 0.5) != y) for p in m.staged_predict_proba(X)]
        assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))

    def test_perfect_learner_stops(self):
        X = np.array([[0.0], [1], [2], [3]])
        m = AdaBoostClassifier(n_estimators=10).fit(X, [0, 0, 1, 1])
        assert len(m.estimator_weights_) == 1
        assert (m.predict(X) == [0, 0, 1, 1]).all()

    def test_depth_validated(self):
        with pytest.raises(ConfigError):
            ClassifierSpec("adaboost", {"max_depth": 5})

    def test_gradient_boosting_learns(self, small_table):
        m = GradientBoostingClassifier(n_estimators=30, random_state=0).fit(small_table.X,
                                                                            small_table.y)
        assert (m.predict(small_table.X) == small_table.y).mean() > 0.9
        stages = list(m.staged_predict_proba(small_table.X))
        assert np.allclose(stages[-1], m.predict_proba(small_table.X))


class TestOthers:
    def test_knn_nearest_and_ties(self):
        m = KNeighborsClassifier(n_neighbors=1).fit(np.array([[0.0], [10.0]]), ["A", "B"])
        assert m.predict(np.array([[1.0]]))[0] == "A"
        tie = KNeighborsClassifier(n_neighbors=1).fit(np.array([[0.0], [2.0]]), [1, 0])
        assert tie.predict(np.array([[1.0]]))[0] == 1

    def test_logistic_saturates_and_loss_decreases(self):
        rng = np.random.default_rng(0)
        X = np.concatenate([rng.normal(-3, 0.5, (30, 2)), rng.normal(3, 0.5, (30, 2))])
        y = np.repeat([0, 1], 30)
        m = LogisticRegression(record_loss=True).fit(X, y)
        assert m.predict_proba(np.array([[3.0, 3.0]]))[0, 1] > 0.9
        loss = np.array(m.loss_curve_)
        assert np.all(np.diff(loss) <= 1e-12)

    def test_logistic_objective_is_the_loss(self):
        w, b = np.array([0.5]), 0.1
        X, y = np.array([[1.0], [2.0]]), np.array([0, 1])
        z = X @ w + b
        ref = np.mean(np.log1p(np.exp(z)) - y * z) + 0.5 / 2 * 0.25
        assert logistic_objective(w, b, X, y, 1.0) == pytest.approx(ref)

    def test_lda_midpoint_boundary(self):
        rng = np.random.default_rng(3)
        mu = np.array([1.0, 0.5])
        X = np.concatenate([rng.normal(size=(5000, 2)) + mu, rng.normal(size=(5000, 2)) - mu])
        y = np.repeat([1, 0], 5000)
        m = LinearDiscriminantAnalysis().fit(X, y)
        assert abs(m.intercept_) < 0.05

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_label_symmetry(self, kind, small_table):
        X, y = small_table.X[:, :6], small_table.y
        params = {"n_estimators": 10} if kind in ("random_forest", "extra_trees",
                                                  "gradient_boosting") else {}
        spec = ClassifierSpec(kind, params)
        p = spec.build(3).fit(X, y).predict_proba(X)[:, 1]
        q = spec.build(3).fit(X, 1 - y).predict_proba(X)[:, 1]
        assert np.allclose(p, 1 - q, atol=1e-9)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_shape_mismatch(self, kind, small_table):
        m = ClassifierSpec(kind).build(0).fit(small_table.X[:, :4], small_table.y)
        with pytest.raises(ShapeError):
            m.predict(small_table.X[:, :3])

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_serialization_roundtrip(self, kind, small_table, tmp_path):
        X, y = small_table.X, small_table.y
        params = {"n_estimators": 5} if kind in ("random_forest", "extra_trees",
                                                 "gradient_boosting", "adaboost") else {}
        spec = ClassifierSpec(kind, params)
        m = spec.build(1).fit(X, y)
        save_model(m, tmp_path / "m.json", small_table.feature_names, spec)
        back = load_model(tmp_path / "m.json")
        assert np.array_equal(m.predict_proba(X), back.predict_proba(X))
        assert np.array_equal(model_from_dict(model_to_dict(m)).predict(X), m.predict(X))

    @pytest.mark.parametrize("kind", ["cart", "random_forest", "extra_trees", "adaboost", "gradient_boosting"])
    def test_deterministic(self, kind, small_table):
        spec = ClassifierSpec(kind, {"n_estimators": 8} if kind != "cart" else {})
        a = spec.build(9).fit(small_table.X, small_table.y).predict_proba(small_table.X)
        b = spec.build(9).fit(small_table.X, small_table.y).predict_proba(small_table.X)
        assert np.array_equal(a, b)

    def test_importances_unsupported(self, small_table):
        m = KNeighborsClassifier().fit(small_table.X, small_table.y)
        with pytest.raises(UnsupportedOperationError):
            feature_importances(m)

    def test_invalid_spec(self):
        with pytest.raises(ConfigError):
            ClassifierSpec("svm")
        with pytest.raises(ConfigError):
            ClassifierSpec("knn", {"n_neighbors": 0})
        with pytest.raises(ConfigError):
            ClassifierSpec("gradient_boosting", {"learning_rate": 1.5})


class TestRanking:
    @pytest.mark.parametrize("ranker", ["random_forest", "extra_trees", "gradient_boosting"])
    def test_label_copy_first(self, ranker):
        rng = np.random.default_rng(0)
        y = rng.integers(0, 2, 60)
        X = np.column_stack([rng.normal(size=60), y.astype(float), rng.normal(size=60)])
        assert rank_features(ranker, X, y, seed=0)[0] == 1

    def test_deterministic_and_equivariant(self, small_table):
        X, y = small_table.X, small_table.y
        a = rank_features("random_forest", X, y, seed=3)
        assert np.array_equal(a, rank_features("random_forest", X, y, seed=3))
        # a label-copy column keeps its position under column permutation
        perm = np.random.default_rng(1).permutation(X.shape[1])
        Xc = np.column_stack([X, y])
        first = rank_features("gradient_boosting", Xc, y, seed=0)[0]
        permuted = np.column_stack([X[:, perm], y])
        assert first == X.shape[1]
        assert rank_features("gradient_boosting", permuted, y, seed=0)[0] == X.shape[1]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_cart_oracle_property(seed):
    assert check_cart_root_matches_oracle(3, seed) == 0

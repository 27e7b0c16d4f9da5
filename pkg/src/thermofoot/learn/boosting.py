"""Discrete AdaBoost (two-class SAMME) and logistic-loss gradient boosting."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_is_fitted, check_n_features, check_X_y
from ..exceptions import ConfigError
from .tree import BinaryProbaMixin, Tree, build_tree

# Stage weight used when a weak learner fits the weighted sample perfectly.
ALPHA_CAP = float(np.log((1 - 1e-10) / 1e-10))


def samme_alpha(error):
    """Stage weight ln((1 - e) / e); the ln(K - 1) term vanishes for two classes."""
    error = min(max(float(error), 1e-10), 1 - 1e-10)
    return float(np.log((1.0 - error) / error))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


class AdaBoostClassifier(BinaryProbaMixin, ClassifierMixin, BaseEstimator):
    """AdaBoost over shallow CART trees.

    Each stage fits a depth-``max_depth`` tree to the current sample weights,
    receives ``alpha = ln((1 - err) / err)`` and multiplies the weights of its
    mistakes by ``exp(alpha)``. Boosting stops early when a learner is
    perfect (kept at ``ALPHA_CAP``) or no better than chance (discarded,
    unless it is the first stage, which is then kept at weight 1).

    ``predict_proba`` is the alpha-weighted vote share of class 1.
    """

    def __init__(self, n_estimators=50, max_depth=1, random_state=None):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.random_state = random_state

    def _validate_params(self):
        if int(self.n_estimators) < 1:
            raise ConfigError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if not 1 <= int(self.max_depth) <= 3:
            raise ConfigError(f"weak learner max_depth must lie in 1..3, got {self.max_depth}")

    def fit(self, X, y, sample_weight=None):
        self._validate_params()
        X, yy, classes = check_X_y(X, y)
        n = X.shape[0]
        w = np.full(n, 1.0 / n) if sample_weight is None else np.asarray(sample_weight, float) / np.sum(sample_weight)
        trees, alphas, errors = [], [], []
        for _ in range(int(self.n_estimators)):
            tree = build_tree(X, yy, w, "gini", "best", int(self.max_depth), 2, 1, None)
            miss = (tree.predict(X) >= 0.5).astype(np.int64) != yy
            err = float(w[miss].sum() / w.sum())
            if err <= 0.0:
                trees.append(tree)
                alphas.append(ALPHA_CAP)
                errors.append(err)
                break
            if err >= 0.5:
                if not trees:
                    trees.append(tree)
                    alphas.append(1.0)
                    errors.append(err)
                break
            alpha = samme_alpha(err)
            trees.append(tree)
            alphas.append(alpha)
            errors.append(err)
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        self.trees_ = trees
        self.estimator_weights_ = np.array(alphas)
        self.estimator_errors_ = np.array(errors)
        self.classes_ = classes
        self.n_features_in_ = X.shape[1]
        return self

    def _votes(self, X):
        return np.array([np.where(t.predict(X) >= 0.5, 1.0, -1.0) for t in self.trees_])

    def _score(self, X):
        a = self.estimator_weights_
        return 0.5 * (1.0 + a @ self._votes(X) / a.sum())

    def staged_predict_proba(self, X):
        check_is_fitted(self)
        X = check_n_features(X, self.n_features_in_)
        votes = self._votes(X)
        a = self.estimator_weights_
        num = np.cumsum(a[:, None] * votes, axis=0)
        den = np.cumsum(a)
        for t in range(len(a)):
            p = 0.5 * (1.0 + num[t] / den[t])
            yield np.column_stack([1.0 - p, p])

    def truncate(self, n_stages):
        self.trees_ = self.trees_[:n_stages]
        self.estimator_weights_ = self.estimator_weights_[:n_stages]
        self.estimator_errors_ = self.estimator_errors_[:n_stages]
        return self

    @property
    def feature_importances_(self):
        check_is_fitted(self)
        imp = sum(a * t.feature_importances() for a, t in zip(self.estimator_weights_, self.trees_))
        total = imp.sum()
        return imp / total if total > 0 else imp

    def _get_state(self):
        return {"trees": [t.to_nested() for t in self.trees_],
                "estimator_weights": self.estimator_weights_.tolist(),
                "estimator_errors": self.estimator_errors_.tolist()}

    def _set_state(self, state):
        self.trees_ = [Tree.from_nested(t, self.n_features_in_) for t in state["trees"]]
        self.estimator_weights_ = np.array(state["estimator_weights"], dtype=float)
        self.estimator_errors_ = np.array(state["estimator_errors"], dtype=float)


class GradientBoostingClassifier(BinaryProbaMixin, ClassifierMixin, BaseEstimator):
    """Gradient boosting of regression trees on the binomial deviance.

    Trees are fitted to the residuals ``y - p``; each leaf then takes the
    one-step Newton value ``sum(r) / sum(p (1 - p))`` and the tree enters the
    log-odds with shrinkage ``learning_rate``.
    """

    def __init__(self, n_estimators=100, learning_rate=0.1, max_depth=3, min_samples_leaf=1,
                 subsample=1.0, random_state=None):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.subsample = subsample
        self.random_state = random_state

    def _validate_params(self):
        if int(self.n_estimators) < 1:
            raise ConfigError(f"n_estimators must be >= 1, got {self.n_estimators}")
        if not 0.0 < float(self.learning_rate) <= 1.0:
            raise ConfigError(f"learning_rate must lie in (0, 1], got {self.learning_rate}")
        if int(self.max_depth) < 1 or int(self.min_samples_leaf) < 1:
            raise ConfigError("max_depth and min_samples_leaf must be >= 1")
        if not 0.0 < float(self.subsample) <= 1.0:
            raise ConfigError(f"subsample must lie in (0, 1], got {self.subsample}")

    def fit(self, X, y):
        self._validate_params()
        X, yy, classes = check_X_y(X, y)
        n = X.shape[0]
        rng = np.random.default_rng(self.random_state)
        prior = np.clip(yy.mean(), 1e-12, 1 - 1e-12)
        self.init_ = float(np.log(prior) - np.log1p(-prior))
        f = np.full(n, self.init_)
        lr = float(self.learning_rate)
        trees = []
        for _ in range(int(self.n_estimators)):
            p = _sigmoid(f)
            resid = yy - p
            if self.subsample < 1.0:
                rows = np.sort(rng.choice(n, size=max(2, int(self.subsample * n)), replace=False))
            else:
                rows = np.arange(n)
            Xs, rs = X[rows], resid[rows]
            tree = build_tree(Xs, rs, np.full(len(rows), 1.0 / len(rows)), "mse", "best",
                              int(self.max_depth), 2, int(self.min_samples_leaf), None)
            leaves = tree.apply(Xs)
            hess = p[rows] * (1.0 - p[rows])
            num = np.bincount(leaves, weights=rs, minlength=tree.node_count)
            den = np.bincount(leaves, weights=hess, minlength=tree.node_count)
            is_leaf = np.zeros(tree.node_count, dtype=bool)
            is_leaf[np.unique(leaves)] = True
            tree.value[is_leaf] = num[is_leaf] / np.maximum(den[is_leaf], 1e-12)
            f = f + lr * tree.predict(X)
            trees.append(tree)
        self.trees_ = trees
        self.classes_ = classes
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self)
        X = check_n_features(X, self.n_features_in_)
        return self.init_ + float(self.learning_rate) * np.sum([t.predict(X) for t in self.trees_], axis=0)

    def _score(self, X):
        return _sigmoid(self.decision_function(X))

    def staged_predict_proba(self, X):
        check_is_fitted(self)
        X = check_n_features(X, self.n_features_in_)
        f = np.full(X.shape[0], self.init_)
        for t in self.trees_:
            f = f + float(self.learning_rate) * t.predict(X)
            p = _sigmoid(f)
            yield np.column_stack([1.0 - p, p])

    def truncate(self, n_stages):
        self.trees_ = self.trees_[:n_stages]
        return self

    @property
    def feature_importances_(self):
        check_is_fitted(self)
        imp = np.sum([t.feature_importances() for t in self.trees_], axis=0)
        total = imp.sum()
        return imp / total if total > 0 else imp

    def _get_state(self):
        return {"init": self.init_, "trees": [t.to_nested() for t in self.trees_]}

    def _set_state(self, state):
        self.init_ = float(state["init"])
        self.trees_ = [Tree.from_nested(t, self.n_features_in_) for t in state["trees"]]

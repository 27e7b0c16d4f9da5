"""Random forest and extremely randomized trees."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_is_fitted, check_X_y
from ..exceptions import ConfigError
from .tree import BinaryProbaMixin, Tree, _check_tree_params, build_tree


class _BaseForest(BinaryProbaMixin, ClassifierMixin, BaseEstimator):
    _splitter = "best"

    def __init__(self, n_estimators=100, max_depth=None, min_samples_split=2,
                 min_samples_leaf=1, max_features="sqrt", bootstrap=True, random_state=None):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state

    @property
    def splitter(self):
        return self._splitter

    def _validate_params(self):
        if int(self.n_estimators) < 1:
            raise ConfigError(f"n_estimators must be >= 1, got {self.n_estimators}")
        _check_tree_params(self)

    def fit(self, X, y):
        self._validate_params()
        X, yy, classes = check_X_y(X, y)
        n = X.shape[0]
        seeds = np.random.default_rng(self.random_state).integers(0, 2 ** 32, size=int(self.n_estimators))
        trees = []
        for seed in seeds:
            rng = np.random.default_rng(int(seed))
            if self.bootstrap:
                counts = np.bincount(rng.integers(0, n, size=n), minlength=n).astype(float)
                rows = np.flatnonzero(counts)
            else:
                counts = np.ones(n)
                rows = np.arange(n)
            w = counts[rows] / counts[rows].sum()
            trees.append(build_tree(X[rows], yy[rows], w, "gini", self._splitter,
                                    self.max_depth, int(self.min_samples_split),
                                    int(self.min_samples_leaf), self.max_features, rng))
        self.trees_ = trees
        self.classes_ = classes
        self.n_features_in_ = X.shape[1]
        return self

    def _score(self, X):
        return np.mean([t.predict(X) for t in self.trees_], axis=0)

    @property
    def feature_importances_(self):
        check_is_fitted(self)
        imp = np.mean([t.feature_importances() for t in self.trees_], axis=0)
        total = imp.sum()
        return imp / total if total > 0 else imp

    def _get_state(self):
        return {"trees": [t.to_nested() for t in self.trees_]}

    def _set_state(self, state):
        self.trees_ = [Tree.from_nested(t, self.n_features_in_) for t in state["trees"]]


class RandomForestClassifier(_BaseForest):
    """Bagged CART trees with ``max_features`` candidates per split.

    A bootstrap draw enters its tree as integer weights on the in-bag rows,
    so ``min_samples_*`` limits count distinct rows.
    ``predict_proba`` averages the trees' leaf class frequencies.
    """


class ExtraTreesClassifier(_BaseForest):
    """Extremely randomized trees: random thresholds, no bootstrap by default."""

    _splitter = "random"

    def __init__(self, n_estimators=100, max_depth=None, min_samples_split=2,
                 min_samples_leaf=1, max_features="sqrt", bootstrap=False, random_state=None):
        super().__init__(n_estimators=n_estimators, max_depth=max_depth,
                         min_samples_split=min_samples_split, min_samples_leaf=min_samples_leaf,
                         max_features=max_features, bootstrap=bootstrap,
                         random_state=random_state)

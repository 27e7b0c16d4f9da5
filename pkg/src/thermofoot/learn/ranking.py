"""Impurity-importance feature ranking."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_array, check_is_fitted
from ..exceptions import ConfigError
from .spec import ClassifierSpec, canonical_kind

RANKERS = ("random_forest", "extra_trees", "gradient_boosting")


def ranker_spec(ranker, seed=None, params=None):
    kind = canonical_kind(ranker)
    if kind not in RANKERS:
        raise ConfigError(f"unknown ranker {ranker!r}; expected one of {RANKERS}")
    return ClassifierSpec(kind, params or {}, seed=seed)


def ranking_importances(ranker, X, y, seed=None, params=None):
    """Importances of the ranker model fitted on ``(X, y)``."""
    return ranker_spec(ranker, seed, params).build().fit(X, y).feature_importances_


def order_by_importance(importances):
    """Feature indices by descending importance, lower index first on ties."""
    imp = np.asarray(importances, dtype=float)
    return np.lexsort((np.arange(imp.size), -imp))


def rank_features(ranker, X, y, seed=None, params=None):
    """Feature indices ordered from most to least important.

    ``gradient_boosting`` stands in for XGBoost-style ranking.
    """
    return order_by_importance(ranking_importances(ranker, X, y, seed, params))


class FeatureRanker(BaseEstimator, TransformerMixin):
    """Keep the ``k`` top-ranked columns."""

    def __init__(self, ranker="random_forest", k=10, random_state=None):
        self.ranker = ranker
        self.k = k
        self.random_state = random_state

    def fit(self, X, y):
        X = check_array(X)
        if not 1 <= int(self.k) <= X.shape[1]:
            raise ConfigError(f"k must lie in 1..{X.shape[1]}, got {self.k}")
        self.importances_ = ranking_importances(self.ranker, X, y, self.random_state)
        self.ranking_ = order_by_importance(self.importances_)
        self.n_features_in_ = X.shape[1]
        return self

    def get_support(self, indices=False):
        check_is_fitted(self, "ranking_")
        idx = np.sort(self.ranking_[:int(self.k)])
        if indices:
            return idx
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[idx] = True
        return mask

    def transform(self, X):
        check_is_fitted(self, "ranking_")
        return check_array(X)[:, self.ranking_[:int(self.k)]]

"""Greedy removal of highly correlated features."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_array, check_is_fitted
from ..exceptions import ConfigError, InsufficientDataError


@dataclass(frozen=True)
class FeatureCatalog:
    feature_names: tuple
    retained: np.ndarray
    correlation: np.ndarray
    threshold: float

    @property
    def retained_names(self):
        return tuple(n for n, keep in zip(self.feature_names, self.retained) if keep)

    def to_dict(self):
        corr = [[None if not np.isfinite(v) else float(v) for v in row] for row in self.correlation]
        return {"feature_names": list(self.feature_names), "threshold": self.threshold,
                "retained": [bool(v) for v in self.retained],
                "retained_names": list(self.retained_names), "correlation": corr}


def _constant_columns(X):
    return np.ptp(X, axis=0) <= 1e-12 * np.maximum(1.0, np.abs(X).max(axis=0))


def pearson_matrix(X):
    """Pairwise Pearson correlation of the columns of X.

    Entries involving a zero-variance column are NaN, the diagonal is 1.
    """
    X = np.asarray(X, dtype=float)
    centred = X - X.mean(axis=0)
    norms = np.sqrt((centred ** 2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = (centred.T @ centred) / np.outer(norms, norms)
    const = _constant_columns(X)
    corr[const, :] = np.nan
    corr[:, const] = np.nan
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def correlation_prune(X, threshold=0.95, feature_names=None):
    """Scan features in order and drop any whose |r| with an already
    retained feature exceeds ``threshold``. Constant features are dropped.

    ``X`` is samples x features. Returns ``(mask, FeatureCatalog)``.
    """
    X = check_array(X)
    if X.shape[0] < 2:
        raise InsufficientDataError("correlation pruning needs at least 2 samples")
    if not 0.0 < threshold <= 1.0:
        raise ConfigError(f"threshold must lie in (0, 1], got {threshold}")
    n_features = X.shape[1]
    names = tuple(feature_names) if feature_names is not None else tuple(f"x{i}" for i in range(n_features))
    corr = pearson_matrix(X)
    const = _constant_columns(X)
    keep = np.zeros(n_features, dtype=bool)
    for j in range(n_features):
        if const[j]:
            continue
        earlier = np.flatnonzero(keep)
        if earlier.size and np.any(np.abs(corr[j, earlier]) > threshold):
            continue
        keep[j] = True
    return keep, FeatureCatalog(names, keep, corr, float(threshold))


class CorrelationPruner(BaseEstimator, TransformerMixin):
    def __init__(self, threshold=0.95):
        self.threshold = threshold

    def fit(self, X, y=None):
        self.support_, self.catalog_ = correlation_prune(X, self.threshold)
        return self

    def get_support(self, indices=False):
        check_is_fitted(self, "support_")
        return np.flatnonzero(self.support_) if indices else self.support_.copy()

    def transform(self, X):
        check_is_fitted(self, "support_")
        return check_array(X)[:, self.support_]

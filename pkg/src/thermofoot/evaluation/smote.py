"""Synthetic minority oversampling."""

import numpy as np
from sklearn.base import BaseEstimator

from .._seeding import as_generator
from .._validation import check_array
from ..exceptions import ConfigError, ShapeError, SmoteError


def minority_neighbors(X_min, k):
    """Indices of each minority sample's ``k`` nearest minority neighbours."""
    d2 = ((X_min[:, None, :] - X_min[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


def smote_oversample(X, y, k_neighbors=5, seed=None):
    """Oversample the minority class until both classes have equal counts.

    A synthetic point is ``p + lam * (q - p)`` for a random minority sample
    ``p``, a random one of its ``k_neighbors`` nearest minority neighbours
    ``q`` and ``lam`` uniform in [0, 1). ``k_neighbors`` is clamped to the
    minority count minus one. Original rows come first, unchanged.

    ``seed`` may be an integer or a generator-like object providing
    ``integers`` and ``random``.
    """
    X = check_array(X)
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise ShapeError("y must be 1-D and match X")
    if int(k_neighbors) < 1:
        raise ConfigError(f"k_neighbors must be >= 1, got {k_neighbors}")
    classes, counts = np.unique(y, return_counts=True)
    if classes.size != 2:
        raise SmoteError(f"SMOTE needs exactly two classes, got {classes.size}")
    deficit = int(counts.max() - counts.min())
    if deficit == 0:
        return X.copy(), y.copy()
    minority = classes[np.argmin(counts)]
    X_min = X[y == minority]
    if X_min.shape[0] < 2:
        raise SmoteError("cannot interpolate: the minority class has a single sample")
    k = min(int(k_neighbors), X_min.shape[0] - 1)
    rng = as_generator(seed)
    nbrs = minority_neighbors(X_min, k)
    base = np.asarray(rng.integers(0, X_min.shape[0], size=deficit))
    pick = np.asarray(rng.integers(0, k, size=deficit))
    lam = np.asarray(rng.random(deficit), dtype=float)
    p = X_min[base]
    q = X_min[nbrs[base, pick]]
    synthetic = p + lam[:, None] * (q - p)
    X_out = np.vstack([X, synthetic])
    y_out = np.concatenate([y, np.full(deficit, minority, dtype=y.dtype)])
    return X_out, y_out


class SMOTE(BaseEstimator):
    """Resampler wrapper around :func:`smote_oversample`."""

    def __init__(self, k_neighbors=5, random_state=None):
        self.k_neighbors = k_neighbors
        self.random_state = random_state

    def fit_resample(self, X, y):
        return smote_oversample(X, y, self.k_neighbors, self.random_state)

"""Input validation helpers shared by the estimators."""

import numpy as np

from .exceptions import (InsufficientDataError, NotFittedError, ShapeError,
                         UnsupportedLabelError, ValidationError)


def check_array(X, name="X", ensure_min_samples=1):
    """Return ``X`` as a finite 2-D float array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[0] < ensure_min_samples:
        raise InsufficientDataError(
            f"{name} needs at least {ensure_min_samples} sample(s), got {X.shape[0]}")
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise ValidationError(
            f"{name} contains a non-finite value at row {bad[0]}, column {bad[1]}",
            cell=tuple(int(v) for v in bad))
    return X


def check_X_y(X, y):
    """Validate a binary training problem.

    Returns the float matrix, the labels encoded as 0/1 and the sorted
    original classes.
    """
    X = check_array(X, ensure_min_samples=2)
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ShapeError(f"y must be 1-D with {X.shape[0]} entries, got shape {y.shape}")
    classes, encoded = np.unique(y, return_inverse=True)
    if classes.shape[0] != 2:
        raise UnsupportedLabelError(
            f"binary labels required, got {classes.shape[0]} distinct value(s)")
    return X, encoded.astype(np.int64), classes


def check_n_features(X, n_features):
    X = check_array(X)
    if X.shape[1] != n_features:
        raise ShapeError(f"expected {n_features} feature(s), got {X.shape[1]}")
    return X


def check_is_fitted(estimator, attribute="classes_"):
    if not hasattr(estimator, attribute):
        raise NotFittedError(f"{type(estimator).__name__} is not fitted yet")


def check_sample_weight(sample_weight, n_samples):
    if sample_weight is None:
        return np.full(n_samples, 1.0 / n_samples)
    w = np.asarray(sample_weight, dtype=float)
    if w.shape != (n_samples,):
        raise ShapeError(f"sample_weight must have shape ({n_samples},)")
    if np.any(w < 0) or not np.all(np.isfinite(w)) or w.sum() <= 0:
        raise ValidationError("sample_weight must be finite, non-negative and not all zero")
    return w

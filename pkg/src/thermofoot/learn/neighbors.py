import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_X_y
from ..exceptions import ConfigError
from .tree import BinaryProbaMixin


class KNeighborsClassifier(BinaryProbaMixin, ClassifierMixin, BaseEstimator):
    """Euclidean k-nearest-neighbour vote.

    The class-1 score is the share of class-1 labels among the ``k`` nearest
    training points. Equal distances resolve to the lower training index.
    """

    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def _validate_params(self):
        if int(self.n_neighbors) < 1:
            raise ConfigError(f"n_neighbors must be >= 1, got {self.n_neighbors}")

    def fit(self, X, y):
        self._validate_params()
        X, yy, classes = check_X_y(X, y)
        self.X_fit_ = X
        self.y_fit_ = yy
        self.classes_ = classes
        self.n_features_in_ = X.shape[1]
        return self

    def kneighbors(self, X):
        d2 = ((X[:, None, :] - self.X_fit_[None, :, :]) ** 2).sum(axis=2)
        k = min(int(self.n_neighbors), self.X_fit_.shape[0])
        return np.argsort(d2, axis=1, kind="stable")[:, :k]

    def _score(self, X):
        return self.y_fit_[self.kneighbors(X)].mean(axis=1)

    def _get_state(self):
        return {"X": self.X_fit_.tolist(), "y": self.y_fit_.tolist()}

    def _set_state(self, state):
        self.X_fit_ = np.array(state["X"], dtype=float).reshape(-1, self.n_features_in_)
        self.y_fit_ = np.array(state["y"], dtype=np.int64)

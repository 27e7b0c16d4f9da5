"""Linear classifiers: L2 logistic regression and linear discriminant analysis."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_X_y
from ..exceptions import ConfigError
from .boosting import _sigmoid
from .tree import BinaryProbaMixin


def logistic_objective(w, b, X, y, alpha):
    """Mean cross-entropy plus ``alpha / (2 n) * ||w||^2``."""
    z = X @ w + b
    n = X.shape[0]
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * alpha / n * (w @ w))


class LogisticRegression(BinaryProbaMixin, ClassifierMixin, BaseEstimator):
    """L2-regularised logistic regression fitted by full-batch gradient descent.

    Features are standardised internally (training mean and std); the
    penalty acts on the standardised coefficients and the intercept is not
    penalised. The step is ``1 / L`` with ``L`` the gradient's Lipschitz
    constant, which makes every step decrease the objective. Iteration stops
    once the largest absolute gradient entry falls below ``tol``.

    Attributes
    ----------
    coef_, intercept_ : coefficients on the original feature scale.
    loss_curve_ : objective value after every iteration (when ``record_loss``).
    """

    def __init__(self, alpha=1.0, tol=1e-5, max_iter=5000, record_loss=False):
        self.alpha = alpha
        self.tol = tol
        self.max_iter = max_iter
        self.record_loss = record_loss

    def _validate_params(self):
        if float(self.alpha) < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if float(self.tol) <= 0 or int(self.max_iter) < 1:
            raise ConfigError("tol must be > 0 and max_iter >= 1")

    def fit(self, X, y):
        self._validate_params()
        X, yy, classes = check_X_y(X, y)
        n, d = X.shape
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd <= 1e-12] = 1.0
        Z = (X - mu) / sd
        alpha = float(self.alpha)
        aug = np.column_stack([Z, np.ones(n)])
        lipschitz = 0.25 * np.linalg.norm(aug, 2) ** 2 / n + alpha / n
        step = 1.0 / lipschitz
        w = np.zeros(d)
        b = 0.0
        losses = []
        n_iter = 0
        for n_iter in range(1, int(self.max_iter) + 1):
            r = _sigmoid(Z @ w + b) - yy
            gw = Z.T @ r / n + alpha / n * w
            gb = r.mean()
            if max(np.abs(gw).max(initial=0.0), abs(gb)) < self.tol:
                n_iter -= 1
                break
            w = w - step * gw
            b = b - step * gb
            if self.record_loss:
                losses.append(logistic_objective(w, b, Z, yy, alpha))
        self.coef_ = w / sd
        self.intercept_ = float(b - (w / sd) @ mu)
        self.n_iter_ = n_iter
        self.loss_curve_ = losses
        self.classes_ = classes
        self.n_features_in_ = d
        return self

    def decision_function(self, X):
        return X @ self.coef_ + self.intercept_

    def _score(self, X):
        return _sigmoid(self.decision_function(X))

    def _get_state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_, "n_iter": self.n_iter_}

    def _set_state(self, state):
        self.coef_ = np.array(state["coef"], dtype=float)
        self.intercept_ = float(state["intercept"])
        self.n_iter_ = int(state["n_iter"])
        self.loss_curve_ = []


class LinearDiscriminantAnalysis(BinaryProbaMixin, ClassifierMixin, BaseEstimator):
    """Two-class Gaussian discriminant with a shared (pooled) covariance.

    ``ridge`` is added to the covariance diagonal before inversion.
    """

    def __init__(self, ridge=1e-6):
        self.ridge = ridge

    def _validate_params(self):
        if float(self.ridge) < 0:
            raise ConfigError(f"ridge must be >= 0, got {self.ridge}")

    def fit(self, X, y):
        self._validate_params()
        X, yy, classes = check_X_y(X, y)
        n, d = X.shape
        means = np.array([X[yy == c].mean(axis=0) for c in (0, 1)])
        centred = X - means[yy]
        cov = centred.T @ centred / max(n - 2, 1) + float(self.ridge) * np.eye(d)
        priors = np.array([np.mean(yy == 0), np.mean(yy == 1)])
        w = np.linalg.solve(cov, means[1] - means[0])
        self.means_ = means
        self.priors_ = priors
        self.covariance_ = cov
        self.coef_ = w
        self.intercept_ = float(-0.5 * (means[0] + means[1]) @ w + np.log(priors[1] / priors[0]))
        self.classes_ = classes
        self.n_features_in_ = d
        return self

    def decision_function(self, X):
        return X @ self.coef_ + self.intercept_

    def _score(self, X):
        return _sigmoid(self.decision_function(X))

    def _get_state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_,
                "means": self.means_.tolist(), "priors": self.priors_.tolist()}

    def _set_state(self, state):
        self.coef_ = np.array(state["coef"], dtype=float)
        self.intercept_ = float(state["intercept"])
        self.means_ = np.array(state["means"], dtype=float)
        self.priors_ = np.array(state["priors"], dtype=float)

"""Named classifier configurations and the functional fit/predict surface."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..exceptions import ConfigError, UnsupportedOperationError
from .boosting import AdaBoostClassifier, GradientBoostingClassifier
from .forest import ExtraTreesClassifier, RandomForestClassifier
from .linear import LinearDiscriminantAnalysis, LogisticRegression
from .neighbors import KNeighborsClassifier
from .tree import DecisionTreeClassifier

ESTIMATORS = {
    "cart": DecisionTreeClassifier,
    "random_forest": RandomForestClassifier,
    "extra_trees": ExtraTreesClassifier,
    "adaboost": AdaBoostClassifier,
    "gradient_boosting": GradientBoostingClassifier,
    "knn": KNeighborsClassifier,
    "logistic": LogisticRegression,
    "lda": LinearDiscriminantAnalysis,
}
TREE_KINDS = ("cart", "random_forest", "extra_trees", "adaboost", "gradient_boosting")
SEEDED_KINDS = ("cart", "random_forest", "extra_trees", "adaboost", "gradient_boosting")
# Scores for "external" specs come from a CSV produced outside this package.
EXTERNAL = "external"

ALIASES = {"rf": "random_forest", "et": "extra_trees", "gb": "gradient_boosting",
           "gbm": "gradient_boosting", "xgb": "gradient_boosting", "xgboost": "gradient_boosting",
           "ada": "adaboost", "tree": "cart", "lr": "logistic", "logreg": "logistic"}

DEFAULT_PARAMS = {
    "cart": {"max_depth": None, "min_samples_leaf": 1},
    "random_forest": {"n_estimators": 100, "max_depth": None, "min_samples_leaf": 1,
                      "max_features": "sqrt", "bootstrap": True},
    "extra_trees": {"n_estimators": 100, "max_depth": None, "min_samples_leaf": 1,
                    "max_features": "sqrt", "bootstrap": False},
    "adaboost": {"n_estimators": 50, "max_depth": 1},
    "gradient_boosting": {"n_estimators": 100, "max_depth": 3, "learning_rate": 0.1},
    "knn": {"n_neighbors": 5},
    "logistic": {"alpha": 1.0, "tol": 1e-5, "max_iter": 5000},
    "lda": {"ridge": 1e-6},
}


def canonical_kind(kind):
    kind = str(kind).strip().lower().replace("-", "_")
    return ALIASES.get(kind, kind)


@dataclass(frozen=True)
class ClassifierSpec:
    """A classifier family, its hyperparameters and an optional seed.

    Hyperparameters left out take the values in ``DEFAULT_PARAMS``. ``name``
    labels the spec in reports and defaults to the kind.
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None
    name: Optional[str] = None

    def __post_init__(self):
        kind = canonical_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", dict(self.params))
        if self.name is None:
            object.__setattr__(self, "name", kind)
        if kind == EXTERNAL:
            if "path" not in self.params:
                raise ConfigError(f"external spec {self.name!r} needs a 'path' parameter")
            return
        if kind not in ESTIMATORS:
            raise ConfigError(f"unknown classifier kind {self.kind!r}; "
                              f"expected one of {sorted(ESTIMATORS) + [EXTERNAL]}")
        est = ESTIMATORS[kind]()
        unknown = set(self.params) - set(est.get_params())
        if unknown:
            raise ConfigError(f"{kind}: unknown hyperparameter(s) {sorted(unknown)}")
        self.build()._validate_params()

    @property
    def resolved_params(self):
        if self.kind == EXTERNAL:
            return dict(self.params)
        p = dict(DEFAULT_PARAMS[self.kind])
        p.update(self.params)
        return p

    def build(self, seed=None):
        """A fresh, unfitted estimator."""
        if self.kind == EXTERNAL:
            raise UnsupportedOperationError(f"external spec {self.name!r} cannot be fitted here")
        params = self.resolved_params
        seed = self.seed if seed is None else seed
        if self.kind in SEEDED_KINDS:
            params["random_state"] = seed
        return ESTIMATORS[self.kind](**params)

    def to_dict(self):
        return {"kind": self.kind, "name": self.name, "params": self.resolved_params,
                "seed": self.seed}

    @classmethod
    def from_dict(cls, d):
        return cls(kind=d["kind"], params=d.get("params", {}), seed=d.get("seed"),
                   name=d.get("name"))


def fit_model(spec, X, y, seed=None):
    """Fit the estimator described by ``spec`` and return it."""
    return spec.build(seed).fit(X, y)


def predict_scores(model, X):
    """Class-1 probability estimates in [0, 1]."""
    return model.predict_proba(X)[:, 1]


def predict_labels(model, X):
    return model.predict(X)


def feature_importances(model):
    """Normalised impurity-based importances of a tree model."""
    if not hasattr(type(model), "feature_importances_"):
        raise UnsupportedOperationError(f"{type(model).__name__} has no impurity-based importances")
    return np.asarray(model.feature_importances_)

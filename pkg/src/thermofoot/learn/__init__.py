from .boosting import AdaBoostClassifier, GradientBoostingClassifier, samme_alpha
from .forest import ExtraTreesClassifier, RandomForestClassifier
from .linear import LinearDiscriminantAnalysis, LogisticRegression
from .neighbors import KNeighborsClassifier
from .ranking import RANKERS, FeatureRanker, rank_features, ranking_importances
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .spec import (DEFAULT_PARAMS, ESTIMATORS, EXTERNAL, TREE_KINDS, ClassifierSpec,
                   canonical_kind, feature_importances, fit_model, predict_labels,
                   predict_scores)
from .tree import DecisionTreeClassifier, DecisionTreeRegressor, Tree, build_tree

__all__ = [
    "AdaBoostClassifier", "ClassifierSpec", "DEFAULT_PARAMS", "DecisionTreeClassifier",
    "DecisionTreeRegressor", "ESTIMATORS", "EXTERNAL", "ExtraTreesClassifier",
    "FeatureRanker", "GradientBoostingClassifier", "KNeighborsClassifier",
    "LinearDiscriminantAnalysis", "LogisticRegression", "RANKERS", "RandomForestClassifier",
    "TREE_KINDS", "Tree", "build_tree", "canonical_kind", "feature_importances",
    "fit_model", "load_model", "model_from_dict", "model_to_dict", "predict_labels",
    "predict_scores", "rank_features", "ranking_importances", "samme_alpha", "save_model",
]

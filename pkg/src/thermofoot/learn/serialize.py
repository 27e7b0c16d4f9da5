"""Versioned JSON model files.

``{"format": "thermofoot-model", "version": 1, "spec": {...},
"classes": [...], "n_features": d, "feature_names": [...], "state": {...}}``
with trees stored as nested node objects and linear models as coefficient
lists.
"""

import json

import numpy as np

from ..exceptions import ValidationError
from .spec import ESTIMATORS, ClassifierSpec

FORMAT = "thermofoot-model"
VERSION = 1


def _kind_of(model):
    for kind, cls in ESTIMATORS.items():
        if type(model) is cls:
            return kind
    raise ValidationError(f"cannot serialize {type(model).__name__}")


def _jsonable(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def model_to_dict(model, feature_names=None, spec=None):
    kind = _kind_of(model)
    params = {k: _jsonable(v) for k, v in model.get_params().items()}
    doc_spec = spec.to_dict() if spec is not None else {"kind": kind, "name": kind,
                                                         "params": params, "seed": None}
    return {"format": FORMAT, "version": VERSION, "kind": kind, "params": params,
            "spec": doc_spec, "classes": [_jsonable(c) for c in model.classes_],
            "n_features": int(model.n_features_in_),
            "feature_names": list(feature_names) if feature_names is not None else None,
            "state": model._get_state()}


def model_from_dict(doc):
    if doc.get("format") != FORMAT:
        raise ValidationError("not a thermofoot model document")
    if doc.get("version") != VERSION:
        raise ValidationError(f"unsupported model version {doc.get('version')}")
    model = ESTIMATORS[doc["kind"]](**doc["params"])
    model.classes_ = np.array(doc["classes"])
    model.n_features_in_ = int(doc["n_features"])
    model._set_state(doc["state"])
    model.feature_names_ = doc.get("feature_names")
    return model


def save_model(model, path, feature_names=None, spec=None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, feature_names, spec), fh)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return model_from_dict(doc)


def spec_from_model_doc(doc):
    return ClassifierSpec.from_dict(doc["spec"])

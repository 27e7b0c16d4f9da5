"""The 39-slot per-foot feature vector and the feature-table CSV format."""

import csv
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..exceptions import FeatureError, ValidationError
from .histogram import (estimate_temperature, estimated_temperature_difference,
                        hot_spot_estimator, temperature_histogram)
from .indices import NtrConfig, ReferencePattern, compute_tci, ntr_fractions, summary_stats

CATALOG_VERSION = "1"
REGIONS = ("LPA", "LCA", "MPA", "MCA", "FullFoot")
REGION_STATS = ("ET", "ETD", "HSE", "mean", "median", "std")

FEATURE_NAMES = tuple(
    ["age", "gender", "TCI", "highest_temperature"]
    + [f"NTR_class{k}" for k in range(1, 6)]
    + [f"{region}_{stat}" for region in REGIONS for stat in REGION_STATS]
)
assert len(FEATURE_NAMES) == 39

GENDER_CODES = {"male": 0, "female": 1}
ID_COLUMNS = ("subject_id", "foot_side", "group")


@dataclass(frozen=True)
class FeatureVector:
    subject_id: str
    foot_side: str
    label: int
    values: np.ndarray
    flags: tuple = field(default=())

    def __getitem__(self, name):
        return float(self.values[FEATURE_NAMES.index(name)])

    def as_dict(self):
        return dict(zip(FEATURE_NAMES, (float(v) for v in self.values)))


def _region_maps(foot):
    maps = dict(foot.angiosomes.as_dict())
    maps["FullFoot"] = foot.foot_map
    return maps


def _region_et(foot):
    return {r: estimate_temperature(temperature_histogram(m)) for r, m in _region_maps(foot).items()}


def assemble_features(subject, foot_side, ntr_config=NtrConfig(), reference=ReferencePattern()):
    """Compute the 39 catalog features of one foot.

    ETD compares each region's ET with the contralateral foot; for a
    single-foot subject it is 0.0 and the vector carries the
    ``etd_missing_contralateral`` flag.
    """
    foot = subject.foot(foot_side)
    if foot is None:
        raise FeatureError(f"subject {subject.subject_id} has no {foot_side} foot")
    other = subject.foot("right" if foot_side == "left" else "left")
    other_et = _region_et(other) if other is not None else None
    slots = {"age": float(subject.age), "gender": float(GENDER_CODES[subject.gender])}
    flags = () if other is not None else ("etd_missing_contralateral",)
    current = None
    try:
        means = {}
        for region, rmap in _region_maps(foot).items():
            current = f"{region}_ET"
            hist = temperature_histogram(rmap)
            et = estimate_temperature(hist)
            mean, median, std, _ = summary_stats(rmap)
            slots[f"{region}_ET"] = et
            slots[f"{region}_ETD"] = estimated_temperature_difference(
                et, None if other_et is None else other_et[region])
            slots[f"{region}_HSE"] = hot_spot_estimator(hist, et)
            slots[f"{region}_mean"] = mean
            slots[f"{region}_median"] = median
            slots[f"{region}_std"] = std
            means[region] = mean
        current = "TCI"
        slots["TCI"] = compute_tci(means, reference)
        current = "highest_temperature"
        slots["highest_temperature"] = float(foot.foot_map.foreground.max())
        current = "NTR_class1"
        for k, frac in enumerate(ntr_fractions(foot.foot_map, ntr_config), start=1):
            slots[f"NTR_class{k}"] = float(frac)
    except FeatureError:
        raise
    except Exception as exc:
        raise FeatureError(f"subject {subject.subject_id} {foot_side}: feature {current}: {exc}",
                           slot=current) from exc
    values = np.array([slots[name] for name in FEATURE_NAMES])
    if not np.all(np.isfinite(values)):
        bad = FEATURE_NAMES[int(np.flatnonzero(~np.isfinite(values))[0])]
        raise FeatureError(f"subject {subject.subject_id} {foot_side}: non-finite {bad}", slot=bad)
    return FeatureVector(subject.subject_id, foot_side, subject.label, values, flags)


@dataclass
class FeatureTable:
    """Samples x features matrix with per-row identity."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple
    subject_ids: tuple
    foot_sides: tuple

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=np.int64)
        self.feature_names = tuple(self.feature_names)
        self.subject_ids = tuple(self.subject_ids)
        self.foot_sides = tuple(self.foot_sides)
        n = self.X.shape[0]
        if self.X.ndim != 2 or self.X.shape[1] != len(self.feature_names):
            raise ValidationError("feature matrix does not match feature names")
        if not (len(self.y) == len(self.subject_ids) == len(self.foot_sides) == n):
            raise ValidationError("feature table columns have inconsistent lengths")

    def __len__(self):
        return self.X.shape[0]

    @property
    def keys(self):
        return list(zip(self.subject_ids, self.foot_sides))

    def column(self, name):
        return self.X[:, self.feature_names.index(name)]

    def select(self, names):
        idx = [self.feature_names.index(n) for n in names]
        return FeatureTable(self.X[:, idx], self.y, names, self.subject_ids, self.foot_sides)

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(ID_COLUMNS) + list(self.feature_names))
            for i in range(len(self)):
                group = "DM" if self.y[i] == 1 else "CG"
                w.writerow([self.subject_ids[i], self.foot_sides[i], group]
                           + [repr(float(v)) for v in self.X[i]])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise ValidationError(f"{path}: empty feature file")
        header = rows[0]
        if tuple(header[:3]) != ID_COLUMNS:
            raise ValidationError(f"{path}: header must start with {','.join(ID_COLUMNS)}")
        names = header[3:]
        X, y, sids, sides = [], [], [], []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            if row[2] not in ("DM", "CG"):
                raise ValidationError(f"{path}: line {lineno}: group must be DM or CG")
            try:
                X.append([float(v) for v in row[3:]])
            except ValueError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from exc
            sids.append(row[0])
            sides.append(row[1])
            y.append(1 if row[2] == "DM" else 0)
        return cls(np.array(X, dtype=float).reshape(len(X), len(names)), np.array(y), names,
                   sids, sides)


def build_feature_table(subjects, ntr_config=NtrConfig(), reference=ReferencePattern()):
    """One row per foot, subjects in input order, left foot first."""
    vectors = [assemble_features(s, f.foot_side, ntr_config, reference)
               for s in subjects for f in s.feet]
    if not vectors:
        raise ValidationError("no feet to featurize")
    return FeatureTable(np.vstack([v.values for v in vectors]), [v.label for v in vectors],
                        FEATURE_NAMES, [v.subject_id for v in vectors],
                        [v.foot_side for v in vectors])


class FootFeatureExtractor(BaseEstimator, TransformerMixin):
    """Stateless transformer from SubjectRecords to the 39-column matrix."""

    def __init__(self, ntr_config=None, reference=None):
        self.ntr_config = ntr_config
        self.reference = reference

    def fit(self, subjects, y=None):
        return self

    def transform(self, subjects):
        return build_feature_table(subjects, self.ntr_config or NtrConfig(),
                                   self.reference or ReferencePattern()).X

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURE_NAMES, dtype=object)

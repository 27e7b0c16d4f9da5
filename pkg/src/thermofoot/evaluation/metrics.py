"""Confusion-count metrics, confidence intervals and ROC analysis."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InsufficientDataError, UndefinedAUCError, ValidationError

METRICS = ("accuracy", "precision", "sensitivity", "specificity", "f1")
Z_95 = 1.96


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValidationError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def swapped(self):
        """Counts with the other class treated as positive."""
        return ConfusionCounts(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp,
                               self.tn + other.tn, self.fn + other.fn)

    @classmethod
    def from_labels(cls, y_true, y_pred, positive=1):
        t = np.asarray(y_true) == positive
        p = np.asarray(y_pred) == positive
        return cls(tp=int(np.sum(t & p)), fp=int(np.sum(~t & p)),
                   tn=int(np.sum(~t & ~p)), fn=int(np.sum(t & ~p)))

    def to_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def _ratio(num, den, flags, name):
    if den == 0:
        flags.append(f"{name}_undefined")
        return 0.0
    return num / den


def class_metrics(counts):
    """Accuracy, precision, sensitivity, specificity and F1 with positive = ``tp`` side.

    A zero denominator gives 0.0 and a ``<metric>_undefined`` flag.
    """
    flags = []
    c = counts
    sens = _ratio(c.tp, c.tp + c.fn, flags, "sensitivity")
    spec = _ratio(c.tn, c.tn + c.fp, flags, "specificity")
    prec = _ratio(c.tp, c.tp + c.fp, flags, "precision")
    acc = _ratio(c.tp + c.tn, c.total, flags, "accuracy")
    f1 = _ratio(2 * prec * sens, prec + sens, flags, "f1")
    return {"accuracy": acc, "precision": prec, "sensitivity": sens, "specificity": spec,
            "f1": f1}, flags


def confidence_interval(p, n, z=Z_95):
    """Normal-approximation binomial half-width ``z * sqrt(p (1 - p) / n)``."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"proportion must lie in [0, 1], got {p}")
    if n <= 0:
        raise ValidationError(f"n must be positive, got {n}")
    return z * math.sqrt(p * (1.0 - p) / n)


def auc_confidence_interval(auc, n_pos, n_neg, z=Z_95):
    """Hanley-McNeil half-width for an AUC estimate."""
    q1 = auc / (2.0 - auc)
    q2 = 2.0 * auc * auc / (1.0 + auc)
    var = (auc * (1 - auc) + (n_pos - 1) * (q1 - auc ** 2) + (n_neg - 1) * (q2 - auc ** 2)) \
        / (n_pos * n_neg)
    return z * math.sqrt(max(var, 0.0))


@dataclass
class MetricsReport:
    """Per-class and support-weighted metrics, each as ``(value, ci_half_width)``.

    Class "DM" is the positive label 1, "CG" the negative label 0.
    """

    counts: ConfusionCounts
    rows: dict
    auc: float = None
    auc_ci: float = None
    inference_ms: float = None
    flags: list = field(default_factory=list)

    def value(self, metric, row="overall"):
        return self.rows[row][metric][0]

    def ci(self, metric, row="overall"):
        return self.rows[row][metric][1]

    def to_dict(self, include_timing=True):
        d = {"counts": self.counts.to_dict(),
             "rows": {r: {m: {"value": v, "ci": c} for m, (v, c) in vals.items()}
                      for r, vals in self.rows.items()},
             "auc": self.auc, "auc_ci": self.auc_ci, "flags": list(self.flags)}
        if include_timing:
            d["inference_ms"] = self.inference_ms
        return d

    @classmethod
    def from_dict(cls, d):
        rows = {r: {m: (v["value"], v["ci"]) for m, v in vals.items()} for r, vals in d["rows"].items()}
        return cls(ConfusionCounts(**d["counts"]), rows, d.get("auc"), d.get("auc_ci"),
                   d.get("inference_ms"), list(d.get("flags", [])))


def compute_metrics(counts):
    """Evaluate the five count-based metrics for both classes and overall.

    The overall row is the support-weighted average of the two class rows.
    Every half-width uses the total evaluated count as ``n``.
    """
    if counts.total <= 0:
        raise InsufficientDataError("no evaluated samples")
    dm, dm_flags = class_metrics(counts)
    cg, cg_flags = class_metrics(counts.swapped())
    n_dm, n_cg = counts.tp + counts.fn, counts.tn + counts.fp
    n = counts.total
    overall = {m: (n_dm * dm[m] + n_cg * cg[m]) / n for m in METRICS}
    rows = {}
    for name, vals in (("DM", dm), ("CG", cg), ("overall", overall)):
        rows[name] = {m: (float(vals[m]), confidence_interval(min(max(vals[m], 0.0), 1.0), n))
                      for m in METRICS}
    flags = [f"DM:{f}" for f in dm_flags] + [f"CG:{f}" for f in cg_flags]
    return MetricsReport(counts, rows, flags=flags)


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float


def roc_curve_auc(scores, labels):
    """ROC points from a sweep over the distinct scores, highest first.

    Tied scores move as one step, so the trapezoidal area equals the
    Mann-Whitney estimate (ordered pairs plus half the ties, over n1 * n0).
    The area is accumulated in integer units before the final division.
    """
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).ravel()
    if s.shape != y.shape:
        raise ValidationError("scores and labels differ in length")
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUCError("AUC needs both classes among the labels")
    order = np.argsort(-s, kind="stable")
    s_sorted, pos_sorted = s[order], pos[order]
    distinct = np.flatnonzero(np.diff(s_sorted) != 0)
    ends = np.concatenate([distinct, [len(s) - 1]])
    tp = np.cumsum(pos_sorted)[ends]
    fp = (ends + 1) - tp
    tp = np.concatenate([[0], tp]).astype(np.int64)
    fp = np.concatenate([[0], fp]).astype(np.int64)
    # twice the area in count units: sum of dFP * (TP_i + TP_{i-1})
    twice_area = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = twice_area / (2.0 * n_pos * n_neg)
    thresholds = np.concatenate([[np.inf], s_sorted[ends]])
    return RocCurve(fp / n_neg, tp / n_pos, thresholds, float(auc))

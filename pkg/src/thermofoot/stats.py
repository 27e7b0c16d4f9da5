"""Cohort statistics: 2x2 chi-square, Wilcoxon rank-sum and group summaries."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DegenerateTableError, InsufficientDataError, ValidationError


def chi2_sf_1df(statistic):
    """Survival function of the chi-square distribution with one degree of freedom."""
    return math.erfc(math.sqrt(max(statistic, 0.0) / 2.0))


def normal_two_sided_p(z):
    return math.erfc(abs(z) / math.sqrt(2.0))


def chi_square_2x2(table):
    """Pearson chi-square test of independence, no continuity correction.

    ``table`` is ``[[a, b], [c, d]]`` with groups as rows and categories as
    columns. Returns ``(statistic, p_value)``.
    """
    obs = np.asarray(table, dtype=float)
    if obs.shape != (2, 2):
        raise ValidationError(f"expected a 2x2 table, got shape {obs.shape}")
    if np.any(obs < 0) or not np.all(np.isfinite(obs)):
        raise ValidationError("contingency counts must be finite and non-negative")
    total = obs.sum()
    rows, cols = obs.sum(axis=1), obs.sum(axis=0)
    if total <= 0 or np.any(rows == 0) or np.any(cols == 0):
        raise DegenerateTableError("contingency table has a zero marginal")
    expected = np.outer(rows, cols) / total
    stat = float(((obs - expected) ** 2 / expected).sum())
    return stat, chi2_sf_1df(stat)


def midranks(values):
    """1-based ranks with ties sharing the mean of their positions."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def rank_sum_test(a, b):
    """Wilcoxon rank-sum test via the tie-corrected normal approximation.

    ``z`` is positive when ``a`` tends to rank above ``b``. No continuity
    correction. Returns ``(z, two_sided_p)``.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise InsufficientDataError("rank-sum test needs two non-empty samples")
    n1, n2 = a.size, b.size
    n = n1 + n2
    ranks = midranks(np.concatenate([a, b]))
    w = ranks[:n1].sum()
    expected = n1 * (n + 1) / 2.0
    _, counts = np.unique(np.concatenate([a, b]), return_counts=True)
    tie_term = float(((counts ** 3) - counts).sum())
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return 0.0, 1.0
    z = (w - expected) / math.sqrt(var)
    return float(z), normal_two_sided_p(z)


@dataclass(frozen=True)
class GroupSummary:
    n: int
    missing: int
    mean: float
    std: float
    median: float
    q1: float
    q3: float
    min: float
    max: float

    def to_dict(self):
        return asdict(self)


def descriptive_summary(values):
    """Cohort-table summary; sample std (n - 1), inclusive linear quartiles.

    NaN entries count as missing.
    """
    v = np.asarray(values, dtype=float).ravel()
    missing = int(np.count_nonzero(np.isnan(v)))
    v = v[~np.isnan(v)]
    if v.size == 0:
        raise InsufficientDataError("descriptive summary needs at least one value")
    q1, med, q3 = np.percentile(v, [25, 50, 75], method="linear")
    std = float(v.std(ddof=1)) if v.size > 1 else 0.0
    return GroupSummary(n=int(v.size), missing=missing, mean=float(v.mean()), std=std,
                        median=float(med), q1=float(q1), q3=float(q3),
                        min=float(v.min()), max=float(v.max()))


# Rows of the cohort table: (row label, feature column).
COHORT_ROWS = (
    ("Age (Years)", "age"),
    ("Full-Foot Temperature", "FullFoot_mean"),
    ("LCA Temperature", "LCA_mean"),
    ("LPA Temperature", "LPA_mean"),
    ("MCA Temperature", "MCA_mean"),
    ("MPA Temperature", "MPA_mean"),
    ("TCI", "TCI"),
)


def cohort_table(table):
    """Control-vs-diabetic comparison of a FeatureTable, one dict per row.

    Gender is tested with the chi-square test, every continuous row with the
    rank-sum test (diabetic sample first, so higher diabetic values give z > 0).
    """
    y = table.y
    rows = []
    if "gender" in table.feature_names:
        g = table.column("gender")
        counts = [[int(np.sum((y == 0) & (g == 0))), int(np.sum((y == 0) & (g == 1)))],
                  [int(np.sum((y == 1) & (g == 0))), int(np.sum((y == 1) & (g == 1)))]]
        stat, p = chi_square_2x2(counts)
        rows.append({"item": "Gender", "method": "Chi-square test", "statistic": stat,
                     "p_value": p,
                     "control": {"male": counts[0][0], "female": counts[0][1]},
                     "diabetic": {"male": counts[1][0], "female": counts[1][1]},
                     "total": {"male": counts[0][0] + counts[1][0],
                               "female": counts[0][1] + counts[1][1]}})
    for label, column in COHORT_ROWS:
        if column not in table.feature_names:
            continue
        v = table.column(column)
        z, p = rank_sum_test(v[y == 1], v[y == 0])
        rows.append({"item": label, "method": "Rank-sum test", "statistic": z, "p_value": p,
                     "control": descriptive_summary(v[y == 0]).to_dict(),
                     "diabetic": descriptive_summary(v[y == 1]).to_dict(),
                     "total": descriptive_summary(v).to_dict()})
    rows.append({"item": "Outcome", "method": "", "statistic": None, "p_value": None,
                 "control": int(np.sum(y == 0)), "diabetic": int(np.sum(y == 1)),
                 "total": int(len(y))})
    return rows

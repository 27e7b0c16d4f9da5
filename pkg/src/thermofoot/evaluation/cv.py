"""Stratified k-fold plans with a nested validation split."""

import csv
from dataclasses import dataclass

import numpy as np

from .._seeding import derive_seed
from ..exceptions import StratificationError


@dataclass(frozen=True)
class Fold:
    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray

    @property
    def fit_pool(self):
        """Every index outside the test set."""
        return np.sort(np.concatenate([self.train, self.validation]))


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple
    n_samples: int

    @property
    def k(self):
        return len(self.folds)

    def __iter__(self):
        return iter(self.folds)

    def __getitem__(self, i):
        return self.folds[i]

    def test_fold_of(self):
        """Array mapping every sample to the fold that tests it."""
        out = np.full(self.n_samples, -1, dtype=np.int64)
        for i, f in enumerate(self.folds):
            out[f.test] = i
        return out

    def to_csv(self, path, subject_ids, foot_sides):
        """One row per (sample, fold) with its role in that fold."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["subject_id", "foot_side", "fold", "role"])
            for i, f in enumerate(self.folds):
                roles = np.empty(self.n_samples, dtype=object)
                roles[f.train] = "train"
                roles[f.validation] = "validation"
                roles[f.test] = "test"
                for j in range(self.n_samples):
                    w.writerow([subject_ids[j], foot_sides[j], i, roles[j]])


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def stratified_kfold(labels, k=5, seed=0, validation_fraction=0.2):
    """Stratified k-fold plan.

    Each class is shuffled with a seeded generator and dealt round-robin
    across the folds; the dealing position carries over from one class to the
    next, so fold sizes differ by at most one. Inside every fold a seeded
    ``validation_fraction`` of each class's training indices forms the
    validation set.

    A class may have fewer members than there are folds; it is then absent
    from some test folds. Every class needs at least two members so that
    each training split contains it.
    """
    labels = np.asarray(labels)
    classes, counts = np.unique(labels, return_counts=True)
    if k < 2:
        raise StratificationError(f"k must be >= 2, got {k}")
    if len(labels) < k:
        raise StratificationError(f"{len(labels)} sample(s) cannot fill k={k} folds")
    if np.any(counts < 2):
        worst = classes[np.argmin(counts)]
        raise StratificationError(f"class {worst!r} has a single sample")
    rng = np.random.default_rng(derive_seed(seed, "folds"))
    assignment = np.empty(len(labels), dtype=np.int64)
    pos = 0
    for c in classes:
        idx = rng.permutation(np.flatnonzero(labels == c))
        assignment[idx] = (pos + np.arange(len(idx))) % k
        pos = (pos + len(idx)) % k
    folds = []
    for i in range(k):
        test = np.flatnonzero(assignment == i)
        vrng = np.random.default_rng(derive_seed(seed, "validation", i))
        val = []
        for c in classes:
            pool = np.flatnonzero((assignment != i) & (labels == c))
            n_val = _round_half_up(validation_fraction * len(pool))
            val.append(vrng.permutation(pool)[:n_val])
        validation = np.sort(np.concatenate(val)).astype(np.int64)
        train = np.setdiff1d(np.flatnonzero(assignment != i), validation)
        folds.append(Fold(train=train, validation=validation, test=test))
    return FoldPlan(tuple(folds), len(labels))

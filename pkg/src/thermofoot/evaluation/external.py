"""Scores computed outside the package, merged into the grid by sample and fold."""

import csv
import math

import numpy as np

from ..exceptions import LoadError, ValidationError

COLUMNS = ("subject_id", "foot_side", "fold", "score")


def read_external_scores(path):
    """Map ``(subject_id, foot_side, fold) -> score`` from a CSV file."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise LoadError(f"cannot read external scores: {exc}", path=str(path)) from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != COLUMNS:
            raise ValidationError(f"{path}: header must be {','.join(COLUMNS)}")
        out = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValidationError(f"{path}: line {lineno}: expected 4 fields")
            try:
                fold, score = int(row[2]), float(row[3])
            except ValueError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from exc
            if not math.isfinite(score) or not 0.0 <= score <= 1.0:
                raise ValidationError(f"{path}: line {lineno}: score must lie in [0, 1]")
            key = (row[0], row[1], fold)
            if key in out:
                raise ValidationError(f"{path}: line {lineno}: duplicate entry {key}")
            out[key] = score
    return out


def lookup_scores(scores, subject_ids, foot_sides, indices, fold):
    """Scores for the rows ``indices`` tested in ``fold``."""
    out = np.empty(len(indices), dtype=float)
    for j, i in enumerate(indices):
        key = (subject_ids[i], foot_sides[i], int(fold))
        if key not in scores:
            raise ValidationError(f"external scores lack an entry for {key}")
        out[j] = scores[key]
    return out


def write_external_scores(path, subject_ids, foot_sides, test_fold, scores):
    """Write one score per sample, keyed by the fold that tests it."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for sid, side, f, s in zip(subject_ids, foot_sides, test_fold, scores):
            w.writerow([sid, side, int(f), repr(float(s))])

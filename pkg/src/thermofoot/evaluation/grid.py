"""The ranker x classifier x top-k search under stratified cross-validation."""

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from .._seeding import derive_seed
from ..exceptions import ConfigError, ThermoFootError
from ..features.catalog import CATALOG_VERSION
from ..features.pruning import correlation_prune
from ..learn.ranking import RANKERS, order_by_importance, ranking_importances
from ..learn.spec import EXTERNAL, ClassifierSpec, canonical_kind, predict_scores
from .cv import stratified_kfold
from .external import lookup_scores, read_external_scores
from .metrics import (METRICS, ConfusionCounts, MetricsReport, auc_confidence_interval,
                      compute_metrics, roc_curve_auc)
from .smote import smote_oversample
from .timing import time_inference

SMOTE_ORDERS = ("rank-first", "smote-first")
ARCHIVE_FORMAT = "thermofoot-grid"
ARCHIVE_VERSION = 1
THREADS_ENV = "THERMOFOOT_THREADS"

# The eight in-package families, XGBoost approximated by gradient boosting
# with XGBoost's default depth and learning rate.
NATIVE_SPECS = (
    ClassifierSpec("logistic"),
    ClassifierSpec("knn"),
    ClassifierSpec("adaboost"),
    ClassifierSpec("random_forest"),
    ClassifierSpec("extra_trees"),
    ClassifierSpec("gradient_boosting"),
    ClassifierSpec("gradient_boosting", {"max_depth": 6, "learning_rate": 0.3}, name="xgboost"),
    ClassifierSpec("lda"),
)


@dataclass(frozen=True)
class GridOptions:
    """Protocol settings for :func:`run_grid`.

    ``global_prune`` prunes once on the whole table instead of per training
    fold; it lets test rows influence the retained set and the leakage audit
    reports it. ``smote_order="smote-first"`` oversamples all retained columns
    before ranking. ``use_validation`` early-stops boosting models on the
    validation split. ``n_jobs=None`` uses every CPU; ``THERMOFOOT_THREADS``
    caps the worker count either way.
    """

    n_folds: int = 5
    prune_threshold: float = 0.95
    global_prune: bool = False
    smote_order: str = "rank-first"
    use_validation: bool = False
    smote_k: int = 5
    timing_repetitions: int = 5
    n_jobs: Optional[int] = None

    def __post_init__(self):
        if self.smote_order not in SMOTE_ORDERS:
            raise ConfigError(f"smote_order must be one of {SMOTE_ORDERS}, got {self.smote_order!r}")
        if int(self.n_folds) < 2:
            raise ConfigError(f"n_folds must be >= 2, got {self.n_folds}")
        if not 0.0 < float(self.prune_threshold) <= 1.0:
            raise ConfigError(f"prune_threshold must lie in (0, 1], got {self.prune_threshold}")
        if int(self.smote_k) < 1:
            raise ConfigError(f"smote_k must be >= 1, got {self.smote_k}")
        if int(self.timing_repetitions) < 0:
            raise ConfigError("timing_repetitions must be >= 0")
        if self.n_jobs is not None and int(self.n_jobs) < 1:
            raise ConfigError(f"n_jobs must be >= 1, got {self.n_jobs}")

    def to_dict(self):
        d = asdict(self)
        d.pop("n_jobs")
        return d


def resolve_workers(n_jobs=None):
    """Worker count: ``n_jobs`` (default: CPU count) capped by ``THERMOFOOT_THREADS``."""
    n = int(n_jobs) if n_jobs is not None else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            cap = int(cap)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {cap!r}") from exc
        if cap < 1:
            raise ConfigError(f"{THREADS_ENV} must be >= 1, got {cap}")
        n = min(n, cap)
    return max(n, 1)


class LeakageAudit:
    """Records every index set handed to a fitting stage and counts test overlap."""

    STAGES = ("prune", "rank", "smote", "fit", "early_stop")

    def __init__(self, plan):
        self._test_masks = []
        for f in plan:
            m = np.zeros(plan.n_samples, dtype=bool)
            m[f.test] = True
            self._test_masks.append(m)
        self.checks = 0
        self.stage_checks = dict.fromkeys(self.STAGES, 0)
        self.violations = []

    def record(self, stage, fold, indices):
        if stage not in self.STAGES:
            raise ValueError(f"unknown audit stage {stage!r}")
        self.checks += 1
        self.stage_checks[stage] += 1
        overlap = int(self._test_masks[fold][np.asarray(indices, dtype=np.int64)].sum())
        if overlap:
            self.violations.append({"stage": stage, "fold": int(fold), "test_indices": overlap})

    @property
    def clean(self):
        return not self.violations

    def assert_clean(self):
        if self.violations:
            raise AssertionError(f"test indices reached fitting stages: {self.violations}")

    def summary(self):
        return {"checks": self.checks, "stage_checks": dict(self.stage_checks),
                "violations": list(self.violations)}


@dataclass
class GridResult:
    ranker: str
    classifier: ClassifierSpec
    k: int
    metrics: Optional[MetricsReport]
    selected_features: tuple
    status: str = "ok"
    error: Optional[str] = None
    fold_features: tuple = ()
    scores: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def run_id(self):
        return f"{self.ranker}/{self.classifier.name}/k{self.k}"

    @property
    def ok(self):
        return self.status == "ok"

    def to_dict(self):
        return {
            "run_id": self.run_id, "ranker": self.ranker, "classifier": self.classifier.to_dict(),
            "k": self.k, "status": self.status, "error": self.error,
            "selected_features": list(self.selected_features),
            "fold_features": [list(f) for f in self.fold_features],
            "metrics": None if self.metrics is None else self.metrics.to_dict(include_timing=False),
            "scores": None if self.scores is None else [float(s) for s in self.scores],
        }

    @classmethod
    def from_dict(cls, d):
        m = d.get("metrics")
        s = d.get("scores")
        return cls(d["ranker"], ClassifierSpec.from_dict(d["classifier"]), int(d["k"]),
                   None if m is None else MetricsReport.from_dict(m),
                   tuple(d["selected_features"]), d["status"], d.get("error"),
                   tuple(tuple(f) for f in d.get("fold_features", [])),
                   None if s is None else np.asarray(s, dtype=float))


@dataclass
class GridReport:
    results: list
    feature_names: tuple
    labels: np.ndarray
    subject_ids: tuple
    foot_sides: tuple
    config: dict
    folds: list
    rankings: dict
    audit: dict
    timing: dict = field(default_factory=dict)

    @property
    def best(self):
        return self.results[0]

    def to_dict(self):
        return {
            "format": ARCHIVE_FORMAT, "version": ARCHIVE_VERSION,
            "catalog_version": CATALOG_VERSION, "config": self.config,
            "feature_names": list(self.feature_names),
            "samples": {"subject_ids": list(self.subject_ids), "foot_sides": list(self.foot_sides),
                        "labels": [int(v) for v in self.labels]},
            "folds": self.folds, "rankings": self.rankings, "audit": self.audit,
            "results": [dict(rank=i + 1, **r.to_dict()) for i, r in enumerate(self.results)],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != ARCHIVE_FORMAT:
            raise ConfigError("not a grid archive")
        if d.get("version") != ARCHIVE_VERSION:
            raise ConfigError(f"unsupported grid archive version {d.get('version')!r}")
        s = d["samples"]
        return cls([GridResult.from_dict(r) for r in d["results"]], tuple(d["feature_names"]),
                   np.asarray(s["labels"], dtype=np.int64), tuple(s["subject_ids"]),
                   tuple(s["foot_sides"]), d["config"], d["folds"], d["rankings"], d["audit"])

    def write(self, out_dir, started=None):
        """Write the results CSV, the JSON archive, the fold plan and a timing sidecar.

        Everything except ``grid_timing.json`` is a pure function of the inputs.
        """
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_results_csv(self.results, out / "grid_results.csv")
        with open(out / "grid_archive.json", "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1, allow_nan=False)
            fh.write("\n")
        with open(out / "fold_plan.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["subject_id", "foot_side", "test_fold"])
            for sid, side, f in zip(self.subject_ids, self.foot_sides, self.config["test_fold"]):
                w.writerow([sid, side, f])
        sidecar = {"written": datetime.now(timezone.utc).isoformat(), **self.timing}
        with open(out / "grid_timing.json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=1)
            fh.write("\n")
        return out


def load_archive(path):
    with open(path, encoding="utf-8") as fh:
        return GridReport.from_dict(json.load(fh))


CSV_COLUMNS = (["rank", "run_id", "ranker", "classifier", "k", "status"]
               + [c for m in METRICS for c in (m, f"{m}_ci")]
               + ["auc", "auc_ci", "tp", "fp", "tn", "fn", "features", "error"])


def write_results_csv(results, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for i, r in enumerate(results, start=1):
            row = [i, r.run_id, r.ranker, r.classifier.name, r.k, r.status]
            if r.metrics is not None:
                m = r.metrics
                for name in METRICS:
                    row += [repr(m.value(name)), repr(m.ci(name))]
                c = m.counts
                row += [repr(m.auc), repr(m.auc_ci), c.tp, c.fp, c.tn, c.fn]
            else:
                row += [""] * (2 * len(METRICS) + 6)
            row += [";".join(r.selected_features), r.error or ""]
            w.writerow(row)


# Read-only state shared with worker processes.
_CTX = None


def _init_worker(ctx):
    global _CTX
    _CTX = ctx


def _early_stop(model, X_val, y_val, fold, events, indices):
    """Truncate a boosting model at the stage with the lowest validation log-loss."""
    events.append(("early_stop", fold, indices))
    eps = 1e-15
    best, best_loss = None, np.inf
    for stage, proba in enumerate(model.staged_predict_proba(X_val), start=1):
        p = np.clip(proba[:, 1], eps, 1 - eps)
        loss = -np.mean(y_val * np.log(p) + (1 - y_val) * np.log(1 - p))
        if loss < best_loss - 1e-12:
            best, best_loss = stage, loss
    if best is not None:
        model.truncate(best)
    return model


def _run_unit(fold_index, ranker):
    """All classifiers and every k for one (fold, ranker) pair."""
    ctx = _CTX
    X, y, seed, opts = ctx["X"], ctx["y"], ctx["seed"], ctx["options"]
    fold = ctx["plan"][fold_index]
    retained = ctx["retained"][fold_index]
    train, test = fold.train, fold.test
    events, runs, timing = [], {}, {}
    X_tr, y_tr = X[np.ix_(train, retained)], y[train]
    try:
        if opts.smote_order == "smote-first":
            events.append(("smote", fold_index, train))
            X_aug, y_aug = smote_oversample(X_tr, y_tr, opts.smote_k,
                                            derive_seed(seed, "smote", fold_index))
            events.append(("rank", fold_index, train))
            imp = ranking_importances(ranker, X_aug, y_aug, derive_seed(seed, "rank", fold_index, ranker))
        else:
            events.append(("rank", fold_index, train))
            imp = ranking_importances(ranker, X_tr, y_tr, derive_seed(seed, "rank", fold_index, ranker))
    except Exception as exc:
        return {"events": events, "error": f"{type(exc).__name__}: {exc}", "runs": {},
                "importances": None, "timing": {}}
    order = order_by_importance(imp)
    full_imp = np.zeros(X.shape[1])
    full_imp[retained] = imp
    X_val, y_val = X[np.ix_(fold.validation, retained)], y[fold.validation]
    for k in range(1, ctx["k_max"] + 1):
        cols = order[:k]
        names = tuple(ctx["feature_names"][j] for j in retained[cols])
        try:
            if opts.smote_order == "smote-first":
                X_fit, y_fit = X_aug[:, cols], y_aug
            else:
                events.append(("smote", fold_index, train))
                X_fit, y_fit = smote_oversample(X_tr[:, cols], y_tr, opts.smote_k,
                                                derive_seed(seed, "smote", fold_index, ranker, k))
            smote_error = None
        except Exception as exc:
            smote_error = f"{type(exc).__name__}: {exc}"
        X_te = X[np.ix_(test, retained[cols])]
        for ci, spec in enumerate(ctx["specs"]):
            key = (ci, k)
            try:
                if spec.kind == EXTERNAL:
                    scores = lookup_scores(ctx["external"][spec.name], ctx["subject_ids"],
                                           ctx["foot_sides"], test, fold_index)
                else:
                    if smote_error:
                        raise ThermoFootError(smote_error)
                    root = seed if spec.seed is None else spec.seed
                    model = spec.build(derive_seed(root, "fit", fold_index, ranker, spec.name, k))
                    events.append(("fit", fold_index, train))
                    model.fit(X_fit, y_fit)
                    if opts.use_validation and hasattr(model, "staged_predict_proba") \
                            and len(fold.validation):
                        _early_stop(model, X_val[:, cols], y_val, fold_index, events,
                                    fold.validation)
                    scores = predict_scores(model, X_te)
                    if fold_index == 0 and opts.timing_repetitions:
                        timing[key] = time_inference(model, X_te, opts.timing_repetitions)
                runs[key] = {"scores": np.asarray(scores, dtype=float), "features": names,
                             "error": None}
            except Exception as exc:
                runs[key] = {"scores": None, "features": names,
                             "error": f"{type(exc).__name__}: {exc}"}
    return {"events": events, "error": None, "runs": runs, "importances": full_imp,
            "timing": timing}


def _consensus(fold_features, k, feature_names):
    """Features chosen in most folds, then by mean position, then catalog order."""
    stats = {}
    for names in fold_features:
        for pos, n in enumerate(names):
            c, p = stats.get(n, (0, 0))
            stats[n] = (c + 1, p + pos)
    ranked = sorted(stats, key=lambda n: (-stats[n][0], stats[n][1] / stats[n][0],
                                          feature_names.index(n)))
    return tuple(ranked[:k])


def _sort_key(ranker_pos, spec_pos):
    def key(r):
        if r.metrics is None:
            return (1, 0.0, 0.0, ranker_pos[r.ranker], spec_pos[r.classifier.name], r.k)
        return (0, -r.metrics.value("f1"), -r.metrics.value("accuracy"),
                ranker_pos[r.ranker], spec_pos[r.classifier.name], r.k)
    return key


def run_grid(table, rankers=RANKERS, classifiers=NATIVE_SPECS, k_max=28, seed=0, options=None,
             audit=None):
    """Evaluate every (ranker, classifier, k) with k = 1..k_max.

    Per fold, correlation pruning and ranking see only the training split;
    the top-k columns of the training split are oversampled with SMOTE, the
    classifier is fitted, and the untouched test fold is scored. Predictions
    of all folds are pooled into confusion counts (threshold 0.5) and an
    AUC. Results are sorted by overall F1, then accuracy, then input order.

    A run that raises is kept with ``status="failed"`` and its error text.

    Parameters
    ----------
    table : FeatureTable
    rankers : sequence of str
    classifiers : sequence of ClassifierSpec
        ``external`` specs read scores from ``params["path"]``.
    k_max : int
        Must not exceed the retained feature count of any fold.
    seed : int
        Root seed for folds, ranking, SMOTE and model fits.
    options : GridOptions, optional
    audit : LeakageAudit, optional
        Receives every index set passed to a fitting stage.

    Returns
    -------
    GridReport
    """
    opts = options or GridOptions()
    rankers = [canonical_kind(r) for r in rankers]
    for r in rankers:
        if r not in RANKERS:
            raise ConfigError(f"unknown ranker {r!r}; expected one of {RANKERS}")
    if len(set(rankers)) != len(rankers):
        raise ConfigError("duplicate ranker")
    specs = list(classifiers)
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError(f"classifier spec names must be unique, got {names}")
    if not rankers or not specs:
        raise ConfigError("at least one ranker and one classifier are required")
    k_max = int(k_max)
    if k_max < 1:
        raise ConfigError(f"k_max must be >= 1, got {k_max}")
    t_start = time.perf_counter()
    X, y = table.X, table.y
    plan = stratified_kfold(y, opts.n_folds, seed)
    if audit is None:
        audit = LeakageAudit(plan)
    retained = []
    for i, fold in enumerate(plan):
        rows = np.arange(len(y)) if opts.global_prune else fold.train
        audit.record("prune", i, rows)
        if opts.global_prune and retained:
            retained.append(retained[0])
            continue
        mask, _ = correlation_prune(X[rows], opts.prune_threshold, table.feature_names)
        retained.append(np.flatnonzero(mask))
    smallest = min(len(r) for r in retained)
    if k_max > smallest:
        raise ConfigError(f"k_max={k_max} exceeds the retained feature count ({smallest})")
    external = {s.name: read_external_scores(s.params["path"]) for s in specs if s.kind == EXTERNAL}
    ctx = {"X": X, "y": y, "plan": plan, "retained": retained, "specs": specs, "k_max": k_max,
           "seed": seed, "options": opts, "feature_names": table.feature_names,
           "subject_ids": table.subject_ids, "foot_sides": table.foot_sides, "external": external}
    units = [(f, r) for f in range(plan.k) for r in rankers]
    workers = min(resolve_workers(opts.n_jobs), len(units))
    if workers == 1:
        _init_worker(ctx)
        try:
            outputs = {u: _run_unit(*u) for u in units}
        finally:
            _init_worker(None)
    else:
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(ctx,)) as pool:
            futures = {u: pool.submit(_run_unit, *u) for u in units}
            outputs = {u: fut.result() for u, fut in futures.items()}

    for u in units:
        for stage, fold, idx in outputs[u]["events"]:
            audit.record(stage, fold, idx)

    results, inference = [], {}
    for r in rankers:
        for ci, spec in enumerate(specs):
            for k in range(1, k_max + 1):
                results.append(_collect(outputs, plan, y, r, ci, spec, k, table.feature_names,
                                        inference))
    results.sort(key=_sort_key({r: i for i, r in enumerate(rankers)},
                               {n: i for i, n in enumerate(names)}))

    rankings = {}
    for r in rankers:
        imps = [outputs[(f, r)]["importances"] for f in range(plan.k)]
        if any(v is None for v in imps):
            rankings[r] = {"error": next(outputs[(f, r)]["error"] for f in range(plan.k)
                                         if outputs[(f, r)]["error"])}
            continue
        mean = np.mean(imps, axis=0)
        order = order_by_importance(mean)
        rankings[r] = {"order": [table.feature_names[j] for j in order],
                       "mean_importance": {table.feature_names[j]: float(mean[j]) for j in order}}
    folds = []
    for i, f in enumerate(plan):
        folds.append({"train": int(len(f.train)), "validation": int(len(f.validation)),
                      "test": int(len(f.test)), "test_dm": int(y[f.test].sum()),
                      "test_cg": int(len(f.test) - y[f.test].sum()),
                      "retained": [table.feature_names[j] for j in retained[i]]})
    config = {"rankers": rankers, "classifiers": [s.to_dict() for s in specs], "k_max": k_max,
              "seed": int(seed), "options": opts.to_dict(),
              "test_fold": [int(v) for v in plan.test_fold_of()]}
    timing = {"elapsed_s": time.perf_counter() - t_start, "workers": workers,
              "inference_ms_per_sample": inference}
    return GridReport(results, table.feature_names, y, table.subject_ids, table.foot_sides,
                      config, folds, rankings, audit.summary(), timing)


def _collect(outputs, plan, y, ranker, ci, spec, k, feature_names, inference):
    scores = np.empty(len(y))
    fold_features, errors = [], []
    for f, fold in enumerate(plan):
        out = outputs[(f, ranker)]
        if out["error"]:
            errors.append(f"fold {f}: ranking failed: {out['error']}")
            continue
        run = out["runs"][(ci, k)]
        fold_features.append(run["features"])
        if run["error"]:
            errors.append(f"fold {f}: {run['error']}")
            continue
        scores[fold.test] = run["scores"]
        if (ci, k) in out["timing"]:
            inference[f"{ranker}/{spec.name}/k{k}"] = out["timing"][(ci, k)]
    selected = _consensus(fold_features, k, feature_names) if fold_features else ()
    if errors:
        return GridResult(ranker, spec, k, None, selected, "failed", "; ".join(errors),
                          tuple(fold_features))
    counts = ConfusionCounts.from_labels(y, (scores >= 0.5).astype(np.int64))
    metrics = compute_metrics(counts)
    roc = roc_curve_auc(scores, y)
    metrics.auc = roc.auc
    n_pos = int(y.sum())
    metrics.auc_ci = auc_confidence_interval(roc.auc, n_pos, len(y) - n_pos)
    metrics.inference_ms = inference.get(f"{ranker}/{spec.name}/k{k}")
    return GridResult(ranker, spec, k, metrics, selected, fold_features=tuple(fold_features),
                      scores=scores)

from .cv import Fold, FoldPlan, stratified_kfold
from .external import lookup_scores, read_external_scores, write_external_scores
from .grid import (NATIVE_SPECS, GridOptions, GridReport, GridResult, LeakageAudit,
                   load_archive, resolve_workers, run_grid, write_results_csv)
from .metrics import (METRICS, ConfusionCounts, MetricsReport, RocCurve, auc_confidence_interval,
                      class_metrics, compute_metrics, confidence_interval, roc_curve_auc)
from .smote import SMOTE, smote_oversample
from .timing import time_inference

__all__ = [
    "ConfusionCounts", "Fold", "FoldPlan", "GridOptions", "GridReport", "GridResult",
    "LeakageAudit", "METRICS", "MetricsReport", "NATIVE_SPECS", "RocCurve", "SMOTE",
    "auc_confidence_interval", "class_metrics", "compute_metrics", "confidence_interval",
    "load_archive", "lookup_scores", "read_external_scores", "resolve_workers",
    "roc_curve_auc", "run_grid", "smote_oversample", "stratified_kfold", "time_inference",
    "write_external_scores", "write_results_csv",
]

"""Static plots and tables rendered from a grid archive (no model refits)."""

import csv
import json
from pathlib import Path

import numpy as np

from .evaluation.grid import load_archive
from .evaluation.metrics import roc_curve_auc

SVG_SALT = "thermofoot"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = SVG_SALT
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def _save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def write_roc_csv(curve, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["fpr", "tpr", "threshold"])
        for f, t, th in zip(curve.fpr, curve.tpr, curve.thresholds):
            w.writerow([repr(float(f)), repr(float(t)), repr(float(th))])


def plot_roc(curves, path, title="ROC"):
    """One SVG with a line per ``(label, RocCurve)``."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 5.0))
    for label, c in curves:
        ax.plot(c.fpr, c.tpr, lw=1.2, label=f"{label} (AUC {c.auc:.3f})")
    ax.plot([0, 1], [0, 1], ls="--", lw=0.8, color="grey")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.01)
    ax.set_xlabel("False positive rate")
    ax.set_ylabel("True positive rate")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=7)
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)


def plot_top_features(ranking, path, top=15, title="Feature importance"):
    """Horizontal bar chart of the ``top`` features by mean importance."""
    plt = _pyplot()
    names = ranking["order"][:top]
    vals = [ranking["mean_importance"][n] for n in names]
    fig, ax = plt.subplots(figsize=(6.0, 0.3 * len(names) + 1.2))
    y = np.arange(len(names))[::-1]
    ax.barh(y, vals, color="#4c72b0")
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xlabel("Mean importance across folds")
    ax.set_title(title)
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)


def render_report(archive_path, out_dir, runs=10, top_features=15):
    """Render ROC curves and feature-importance charts from a grid archive.

    Writes ``roc_best.svg`` with the best ``runs`` completed results,
    ``roc_topk.svg`` with k = 1..``runs`` for the best ranker/classifier pair,
    one ``roc_<n>.csv`` per result in ``roc_best.svg``, one
    ``top_features_<ranker>.svg`` per ranker and a ``best.json`` summary.
    Returns the written paths.
    """
    report = load_archive(archive_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    y = report.labels
    ok = [r for r in report.results if r.ok and r.scores is not None]
    written = []
    if ok:
        best = []
        for i, r in enumerate(ok[:runs], start=1):
            c = roc_curve_auc(r.scores, y)
            p = out / f"roc_{i}.csv"
            write_roc_csv(c, p)
            written.append(p)
            best.append((r.run_id, c))
        plot_roc(best, out / "roc_best.svg", title="Best grid runs")
        written.append(out / "roc_best.svg")
        lead = ok[0]
        family = sorted((r for r in ok if r.ranker == lead.ranker
                         and r.classifier.name == lead.classifier.name and r.k <= runs),
                        key=lambda r: r.k)
        plot_roc([(f"top {r.k}", roc_curve_auc(r.scores, y)) for r in family],
                 out / "roc_topk.svg", title=f"{lead.classifier.name} with {lead.ranker} ranking")
        written.append(out / "roc_topk.svg")
        summary = {"run_id": lead.run_id, "features": list(lead.selected_features),
                   **lead.metrics.to_dict(include_timing=False)}
        with open(out / "best.json", "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=1)
            fh.write("\n")
        written.append(out / "best.json")
    for ranker, ranking in report.rankings.items():
        if "order" not in ranking:
            continue
        p = out / f"top_features_{ranker}.svg"
        plot_top_features(ranking, p, top_features, title=f"Top features ({ranker})")
        written.append(p)
    return written

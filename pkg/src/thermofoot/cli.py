"""Command-line entry point: ``thermofoot <subcommand> [options]``.

Every subcommand accepts ``--config FILE`` (JSON run configuration); flags
given on the command line override the file. Errors print one line
``error[<category>]: <message>`` on stderr and exit with 2 (config),
3 (data) or 4 (runtime).
"""

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import RunConfig, SynthesisParams, external_spec, resolve_rankers, resolve_specs
from .data.io import load_dataset, save_dataset
from .data.synth import synthesize_dataset
from .enhance import OPERATORS, T_RANGE, export_enhanced
from .evaluation.grid import resolve_workers, run_grid
from .evaluation.metrics import (ConfusionCounts, auc_confidence_interval, compute_metrics,
                                 roc_curve_auc)
from .evaluation.smote import smote_oversample
from .evaluation.timing import time_inference
from .exceptions import ConfigError, ThermoFootError
from .features.catalog import CATALOG_VERSION, FeatureTable, build_feature_table
from .features.pruning import correlation_prune
from .learn.serialize import load_model, save_model
from .learn.spec import predict_scores
from .stats import chi_square_2x2, cohort_table

EXIT_CODES = {"config": 2, "data": 3, "runtime": 4}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, allow_nan=False)
        fh.write("\n")


def _csv_list(text):
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _config(args):
    cfg = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    changes = {"seed": getattr(args, "seed", None), "output_dir": getattr(args, "out", None)}
    if getattr(args, "manifest", None):
        changes["manifest"] = args.manifest
    cfg = cfg.update(**changes)
    if getattr(args, "manifest", None) and cfg.synthesis is not None:
        cfg = replace(cfg, synthesis=None)
    return cfg


def _subjects(cfg):
    cfg.check_source()
    if cfg.manifest is not None:
        return load_dataset(cfg.manifest)
    s = cfg.synthesis
    return synthesize_dataset(s.n_cg, s.n_dm, s.separation, cfg.seed)


def _table(args, cfg):
    if getattr(args, "features", None):
        return FeatureTable.from_csv(args.features)
    return build_feature_table(_subjects(cfg), cfg.ntr, cfg.reference)


def _out_dir(cfg):
    cfg.check_output()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args):
    cfg = _config(args)
    if cfg.manifest is None:
        raise ConfigError("ingest needs --manifest")
    subjects = load_dataset(cfg.manifest)
    out = _out_dir(cfg)
    path = save_dataset(subjects, out)
    flagged = {s.subject_id: list(s.flags) for s in subjects if s.flags}
    print(json.dumps({"subjects": len(subjects), "feet": sum(len(s.feet) for s in subjects),
                      "flagged": flagged, "manifest": str(path)}))
    return 0


def cmd_synth(args):
    cfg = _config(args)
    base = cfg.synthesis or SynthesisParams()
    params = SynthesisParams(args.cg if args.cg is not None else base.n_cg,
                             args.dm if args.dm is not None else base.n_dm,
                             args.sep if args.sep is not None else base.separation)
    out = _out_dir(cfg)
    subjects = synthesize_dataset(params.n_cg, params.n_dm, params.separation, cfg.seed)
    path = save_dataset(subjects, out)
    print(json.dumps({"subjects": len(subjects), "manifest": str(path)}))
    return 0


def cmd_features(args):
    cfg = _config(args)
    table = build_feature_table(_subjects(cfg), cfg.ntr, cfg.reference)
    out = _out_dir(cfg)
    table.to_csv(out / "features.csv")
    _, catalog = correlation_prune(table.X, args.threshold, table.feature_names)
    _write_json(out / "pruning.json", {"catalog_version": CATALOG_VERSION,
                                       "ntr": cfg.ntr.to_dict(),
                                       "reference": cfg.reference.as_dict(),
                                       **catalog.to_dict()})
    print(json.dumps({"rows": len(table), "features": len(table.feature_names),
                      "retained": len(catalog.retained_names)}))
    return 0


def _stats_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["item", "method", "statistic", "p_value", "control", "diabetic", "total"])
        for r in rows:
            cells = []
            for key in ("control", "diabetic", "total"):
                v = r[key]
                if isinstance(v, dict) and "mean" in v:
                    cells.append(f"{v['mean']:.4f} +/- {v['std']:.4f}")
                elif isinstance(v, dict):
                    cells.append(f"{v['male']} male / {v['female']} female")
                else:
                    cells.append(str(v))
            stat = "" if r["statistic"] is None else f"{r['statistic']:.4f}"
            p = "" if r["p_value"] is None else f"{r['p_value']:.6g}"
            w.writerow([r["item"], r["method"], stat, p] + cells)


def cmd_stats(args):
    cfg = _config(args)
    if args.gender_counts:
        a, b, c, d = args.gender_counts
        stat, p = chi_square_2x2([[a, b], [c, d]])
        rows = [{"item": "Gender", "method": "Chi-square test", "statistic": stat, "p_value": p,
                 "control": {"male": a, "female": b}, "diabetic": {"male": c, "female": d},
                 "total": {"male": a + c, "female": b + d}}]
    else:
        rows = cohort_table(_table(args, cfg))
    out = _out_dir(cfg)
    _write_json(out / "stats.json", {"rows": rows})
    _stats_csv(rows, out / "stats.csv")
    for r in rows:
        if r["statistic"] is not None:
            print(f"{r['item']}: {r['method']} statistic={r['statistic']:.4f} p={r['p_value']:.6g}")
    return 0


def _columns(table, text):
    if not text:
        return table
    return table.select(_csv_list(text))


def cmd_train(args):
    cfg = _config(args)
    table = _columns(_table(args, cfg), args.columns)
    spec = resolve_specs([args.classifier])[0]
    if args.params:
        try:
            extra = json.loads(args.params)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--params is not valid JSON: {exc}") from exc
        spec = type(spec)(spec.kind, {**spec.params, **extra}, spec.seed, spec.name)
    X, y = table.X, table.y
    if args.smote:
        X, y = smote_oversample(X, y, 5, cfg.seed)
    model = spec.build(cfg.seed).fit(X, y)
    out = _out_dir(cfg)
    path = Path(args.model) if args.model else out / "model.json"
    save_model(model, path, table.feature_names, spec)
    print(json.dumps({"model": str(path), "kind": spec.kind, "rows": int(len(y))}))
    return 0


def cmd_evaluate(args):
    cfg = _config(args)
    table = _table(args, cfg)
    model = load_model(args.model)
    names = getattr(model, "feature_names_", None)
    if names:
        table = table.select(names)
    scores = predict_scores(model, table.X)
    counts = ConfusionCounts.from_labels(table.y, (scores >= 0.5).astype(int))
    report = compute_metrics(counts)
    if 0 < table.y.sum() < len(table.y):
        report.auc = roc_curve_auc(scores, table.y).auc
        n_pos = int(table.y.sum())
        report.auc_ci = auc_confidence_interval(report.auc, n_pos, len(table.y) - n_pos)
    out = _out_dir(cfg)
    _write_json(out / "evaluation.json", report.to_dict(include_timing=False))
    with open(out / "scores.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject_id", "foot_side", "label", "score"])
        for sid, side, lab, s in zip(table.subject_ids, table.foot_sides, table.y, scores):
            w.writerow([sid, side, int(lab), repr(float(s))])
    _write_json(out / "evaluation_timing.json",
                {"inference_ms_per_sample": time_inference(model, table.X, args.repetitions)})
    print(json.dumps({"f1": report.value("f1"), "accuracy": report.value("accuracy"),
                      "auc": report.auc}))
    return 0


def cmd_grid(args):
    cfg = _config(args)
    changes = {}
    if args.rankers:
        changes["rankers"] = tuple(resolve_rankers(_csv_list(args.rankers)))
    if args.classifiers:
        changes["classifiers"] = tuple(resolve_specs(_csv_list(args.classifiers)))
    if args.kmax is not None:
        changes["k_max"] = args.kmax
    if args.global_prune:
        changes["global_prune"] = True
    if args.smote_order:
        changes["smote_order"] = args.smote_order
    if args.use_validation:
        changes["use_validation"] = True
    cfg = cfg.update(**changes)
    specs = list(cfg.classifiers) + [external_spec(e) for e in args.external or []]
    table = _table(args, cfg)
    report = run_grid(table, cfg.rankers, specs, cfg.k_max, cfg.seed,
                      cfg.grid_options(args.jobs))
    out = _out_dir(cfg)
    report.write(out)
    best = report.best
    line = {"results": len(report.results), "best": best.run_id,
            "leakage_violations": len(report.audit["violations"])}
    if best.metrics is not None:
        line["f1"] = best.metrics.value("f1")
    print(json.dumps(line))
    return 0


def cmd_enhance(args):
    cfg = _config(args)
    subjects = _subjects(cfg)
    out = _out_dir(cfg)
    ops = _csv_list(args.operators) if args.operators else list(OPERATORS)
    paths = export_enhanced(subjects, out, ops, (args.tmin, args.tmax), (args.tiles, args.tiles),
                            args.clip, args.gamma, workers=resolve_workers(args.jobs))
    print(json.dumps({"images": len(paths)}))
    return 0


def cmd_report(args):
    from .report import render_report

    cfg = _config(args)
    out = _out_dir(cfg)
    paths = render_report(args.archive, out, runs=args.runs)
    print(json.dumps({"files": [str(p) for p in paths]}))
    return 0


def build_parser():
    p = _Parser(prog="thermofoot", description="Plantar thermogram feature extraction, "
                "statistics, classification grid search and image enhancement.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, source=True):
        sp.add_argument("--config", help="JSON run configuration file")
        sp.add_argument("--seed", type=int, help="root seed (default 0)")
        sp.add_argument("--out", help="output directory (default 'out')")
        if source:
            sp.add_argument("--manifest", help="dataset manifest JSON (overrides the config source)")

    sp = sub.add_parser("ingest", help="validate a dataset and write a normalised copy")
    common(sp)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("synth", help="write a synthetic dataset")
    common(sp, source=False)
    sp.add_argument("--cg", type=int, help="control subjects (default 45)")
    sp.add_argument("--dm", type=int, help="diabetic subjects (default 122)")
    sp.add_argument("--sep", type=float, help="diabetic temperature excess in degrees C (default 3.0)")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("features", help="write the feature CSV and pruning report")
    common(sp)
    sp.add_argument("--threshold", type=float, default=0.95,
                    help="absolute Pearson correlation pruning threshold (default 0.95)")
    sp.set_defaults(func=cmd_features)

    sp = sub.add_parser("stats", help="write the cohort comparison report")
    common(sp)
    sp.add_argument("--features", help="feature CSV to summarise instead of a dataset")
    sp.add_argument("--gender-counts", type=int, nargs=4, metavar=("CG_M", "CG_F", "DM_M", "DM_F"),
                    help="test only a gender table given as four counts")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("train", help="fit one classifier on a feature table")
    common(sp)
    sp.add_argument("--features", help="feature CSV (default: build from the dataset)")
    sp.add_argument("--classifier", default="adaboost", help="preset name or alias (default adaboost)")
    sp.add_argument("--params", help="JSON object of hyperparameter overrides")
    sp.add_argument("--columns", help="comma-separated feature subset")
    sp.add_argument("--smote", action="store_true", help="oversample the minority class first")
    sp.add_argument("--model", help="model output path (default <out>/model.json)")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("evaluate", help="score a feature table with a saved model")
    common(sp)
    sp.add_argument("--features", help="feature CSV (default: build from the dataset)")
    sp.add_argument("--model", required=True, help="model JSON written by 'train'")
    sp.add_argument("--repetitions", type=int, default=10,
                    help="timed inference repetitions (default 10)")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("grid", help="run the ranker x classifier x top-k search")
    common(sp)
    sp.add_argument("--features", help="feature CSV (default: build from the dataset)")
    sp.add_argument("--rankers", help="comma-separated rankers or 'all' (rf, et, gb)")
    sp.add_argument("--classifiers", help="comma-separated presets or 'all'")
    sp.add_argument("--external", action="append", metavar="NAME=PATH",
                    help="merge an external score CSV as a classifier (repeatable)")
    sp.add_argument("--kmax", type=int, help="largest top-k (default 28)")
    sp.add_argument("--global-prune", action="store_true",
                    help="prune once on all rows instead of per training fold")
    sp.add_argument("--smote-order", choices=["rank-first", "smote-first"],
                    help="oversample after ranking (default) or before it")
    sp.add_argument("--use-validation", action="store_true",
                    help="early-stop boosting models on the validation split")
    sp.add_argument("--jobs", type=int, help="worker processes (capped by THERMOFOOT_THREADS)")
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("enhance", help="write enhanced grayscale PNGs")
    common(sp)
    sp.add_argument("--operators", help=f"comma-separated subset of {','.join(OPERATORS)}")
    sp.add_argument("--tmin", type=float, default=T_RANGE[0], help="temperature mapped to 0")
    sp.add_argument("--tmax", type=float, default=T_RANGE[1], help="temperature mapped to 255")
    sp.add_argument("--tiles", type=int, default=8, help="adaptive tiles per side (default 8)")
    sp.add_argument("--clip", type=float, default=0.01, help="adaptive clip limit (default 0.01)")
    sp.add_argument("--gamma", type=float, default=0.8, help="gamma exponent (default 0.8)")
    sp.add_argument("--jobs", type=int, help="worker threads (capped by THERMOFOOT_THREADS)")
    sp.set_defaults(func=cmd_enhance)

    sp = sub.add_parser("report", help="render ROC and feature plots from a grid archive")
    common(sp, source=False)
    sp.add_argument("--archive", required=True, help="grid_archive.json written by 'grid'")
    sp.add_argument("--runs", type=int, default=10, help="best runs to plot (default 10)")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ThermoFootError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_CODES[exc.category]
    except OSError as exc:
        print(f"error[data]: {exc}", file=sys.stderr)
        return EXIT_CODES["data"]
    except Exception as exc:
        print(f"error[runtime]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CODES["runtime"]


if __name__ == "__main__":
    sys.exit(main())

"""``rsl`` command line: ingest, features, render, train, crossval, stats, report.

Exit codes: 0 success, 1 usage or configuration error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

import rsl
from rsl._io import atomic_write_text
from rsl.dataset import build_dataset, corpus_hash, load_cycles, raw_features, write_feature_cache
from rsl.errors import DataError, NumericFailure
from rsl.features import REPRESENTATIONS, condition, render_viridis
from rsl.icbhi import FOUR_CLASS_NAMES, Task, class_histogram, manifest_rows, patient_folds, scan_corpus, write_manifest
from rsl.models import MODEL_KINDS, config_from_dict, save_checkpoint
from rsl.stats import mann_whitney_u, wilcoxon_signed_rank
from rsl.training import (
    METRIC_NAMES,
    TrainConfig,
    compute_metrics,
    cross_validate,
    evaluate,
    fold_split,
    read_results_csv,
    results_csv,
    results_rows,
    train,
)

log = logging.getLogger("rsl")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    corpus_dir: str
    output_dir: str
    representation: str = "cochleogram"
    model: str = "vit"
    task: str = "wheeze-binary"
    seed: int = 0
    folds: int = 10
    train: TrainConfig = field(default_factory=TrainConfig)
    model_config: dict = field(default_factory=dict)
    cache_dir: str | None = None

    def __post_init__(self):
        if not self.corpus_dir or not self.output_dir:
            raise UsageError("corpus_dir and output_dir must be nonempty")
        if self.representation not in REPRESENTATIONS:
            raise UsageError(f"representation must be one of {REPRESENTATIONS}, got {self.representation!r}")
        if self.model not in MODEL_KINDS:
            raise UsageError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.task not in [t.value for t in Task]:
            raise UsageError(f"task must be one of {[t.value for t in Task]}, got {self.task!r}")
        if self.folds < 2:
            raise UsageError("folds must be >= 2")

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values = dict(raw)
        try:
            values["train"] = TrainConfig(**values.get("train", {}))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid train section: {exc}") from None
        return cls(**values)

    def with_seed(self, seed: int | None) -> "RunConfig":
        return self if seed is None else replace(self, seed=seed)

    def resolved_train(self) -> TrainConfig:
        return replace(self.train, seed=self.seed)

    def model_settings(self):
        values = {**self.model_config, "n_classes": Task(self.task).n_classes}
        try:
            return config_from_dict(self.model, values)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid model_config: {exc}") from None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["train"] = asdict(self.resolved_train())
        return out


def load_run_config(path, seed=None) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    return RunConfig.from_dict(raw).with_seed(seed)


def worker_count() -> int:
    raw = os.environ.get("RSL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"RSL_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("RSL_THREADS must be >= 1")
    return n


def write_run_manifest(out_dir: Path, command: str, cfg: RunConfig, extra=None) -> Path:
    """Everything needed to repeat the run: resolved config, seeds and input hashes."""
    payload = {
        "command": command,
        "version": rsl.__version__,
        "config": cfg.to_dict(),
        "seeds": {"fold_plan": cfg.seed, "train_base": cfg.seed, "per_fold": "train_base + fold"},
        "inputs": corpus_hash(cfg.corpus_dir),
        **(extra or {}),
    }
    return atomic_write_text(out_dir / "run_manifest.json", json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def format_histogram(hist: dict) -> str:
    names = list(FOUR_CLASS_NAMES) + ["total"]
    width = max(len(n) for n in names)
    return "\n".join(f"{n:<{width}}  {hist[n]:>6d}" for n in names)


def cmd_ingest(args) -> int:
    recordings = scan_corpus(args.corpus)
    patients = [r.patient_id for r in recordings]
    plan = patient_folds(patients, args.folds, args.seed) if len(set(patients)) >= args.folds else None
    if plan is None:
        log.warning("%d patients is fewer than %d folds; fold column left blank", len(set(patients)), args.folds)
    rows = manifest_rows(recordings, plan)
    out = Path(args.out)
    buf = io.StringIO()
    write_manifest(rows, buf)
    atomic_write_text(out / "manifest.csv", buf.getvalue())
    hist = class_histogram(r_ann for r in recordings for r_ann in r.annotations)
    atomic_write_text(out / "histogram.json", json.dumps(hist, indent=2) + "\n")
    print(format_histogram(hist))
    return EXIT_OK


def cmd_features(args) -> int:
    cycles = load_cycles(args.corpus)
    paths = write_feature_cache(cycles, args.representation, Path(args.out))
    log.info("wrote %d %s matrices to %s", len(paths), args.representation, args.out)
    print(f"{len(paths)} feature files written")
    return EXIT_OK


def cmd_render(args) -> int:
    cycles = load_cycles(args.corpus)
    if args.limit is not None:
        cycles = cycles[: args.limit]
    out = Path(args.out)
    for c in cycles:
        tf = condition(raw_features(c, args.representation, args.cache))
        render_viridis(tf, out / f"{c.recording_id}_{c.cycle_index:03d}_{args.representation}.png")
    print(f"{len(cycles)} images written")
    return EXIT_OK


def _prepare(cfg: RunConfig):
    cycles = load_cycles(cfg.corpus_dir)
    inputs, labels, patients = build_dataset(cycles, cfg.representation, cfg.task, cfg.cache_dir)
    plan = patient_folds(patients, cfg.folds, cfg.seed)
    return inputs, labels, patients, plan


def cmd_train(args) -> int:
    cfg = load_run_config(args.config, args.seed)
    model_cfg = cfg.model_settings()
    inputs, labels, patients, plan = _prepare(cfg)
    if not 0 <= args.fold < plan.k:
        raise UsageError(f"--fold must be in [0, {plan.k})")
    train_p, val_p, test_p = fold_split(plan, args.fold)
    pick = lambda group: np.array([p in group for p in patients])  # noqa: E731
    tr, va, te = pick(train_p), pick(val_p), pick(test_p)
    result = train(model_cfg, (inputs[tr], labels[tr]), (inputs[va], labels[va]), replace(cfg.resolved_train(), seed=cfg.seed + args.fold))
    cm = evaluate(result.params, inputs[te], labels[te], model_cfg.n_classes)
    metrics = compute_metrics(cm)
    out = Path(cfg.output_dir)
    save_checkpoint(result.params, out / "model.rslm")
    row = {"task": cfg.task, "representation": cfg.representation, "model": cfg.model, "fold": str(args.fold),
           **{k: ("NA" if v is None else f"{v:.6f}") for k, v in metrics.as_dict().items()},
           "epochs_ran": str(result.epochs_ran)}
    atomic_write_text(out / "results.csv", results_csv([row]))
    atomic_write_text(out / "history.json", json.dumps(result.history, indent=2) + "\n")
    write_run_manifest(out, "train", cfg, {"fold": args.fold, "best_epoch": result.best_epoch})
    print(_metrics_line(f"fold {args.fold}", metrics))
    return EXIT_OK


def _metrics_line(label, metrics) -> str:
    return label + ": " + " ".join(f"{k}={'NA' if v is None else f'{v:.4f}'}" for k, v in metrics.as_dict().items())


def cmd_crossval(args) -> int:
    cfg = load_run_config(args.config, args.seed)
    model_cfg = cfg.model_settings()
    workers = worker_count()
    inputs, labels, patients, plan = _prepare(cfg)
    cv = cross_validate(inputs, labels, patients, plan, model_cfg, cfg.resolved_train(), workers=workers)
    out = Path(cfg.output_dir)
    atomic_write_text(out / "results.csv", results_csv(results_rows(cv, cfg.task, cfg.representation, cfg.model)))
    write_run_manifest(out, "crossval", cfg, {"fold_plan": {p: f for p, f in sorted(plan.assignment.items())}})
    print(_metrics_line("mean", cv.mean))
    print(_metrics_line("pooled", cv.pooled))
    return EXIT_OK


def _fold_values(rows, metric: str) -> dict:
    values = {}
    for r in rows:
        if r["fold"].isdigit() and r[metric] not in ("", "NA"):
            values[int(r["fold"])] = float(r[metric])
    return values


def _read_results(path) -> list[dict]:
    try:
        rows = read_results_csv(Path(path).read_text())
    except FileNotFoundError:
        raise DataError(f"results file {path} not found") from None
    if not rows or "fold" not in rows[0]:
        raise DataError(f"{path} is not a results CSV")
    return rows


def cmd_stats(args) -> int:
    if args.metric not in METRIC_NAMES:
        raise UsageError(f"--metric must be one of {METRIC_NAMES}")
    a = _fold_values(_read_results(args.a), args.metric)
    b = _fold_values(_read_results(args.b), args.metric)
    if not a or not b:
        raise DataError(f"no per-fold {args.metric} values to compare")
    u = mann_whitney_u(list(a.values()), list(b.values()), alpha=args.alpha)
    shared = sorted(set(a) & set(b))
    if not shared:
        raise DataError("the two results files share no folds for the paired test")
    w = wilcoxon_signed_rank([a[f] for f in shared], [b[f] for f in shared], alpha=args.alpha)
    name = args.comparison or f"{Path(args.a).stem} vs. {Path(args.b).stem}"
    for label, rep in (("mann-whitney-u", u), ("wilcoxon-signed-rank", w)):
        print(f"{label}: statistic={rep.statistic:g} p={rep.p_value:.6g} method={rep.method} significant={'yes' if rep.significant else 'no'}")
    if args.out:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["comparison", "U_p", "W_p", "significant"])
        writer.writerow([name, f"{u.p_value:.6g}", f"{w.p_value:.6g}", "yes" if u.significant and w.significant else "no"])
        atomic_write_text(args.out, buf.getvalue())
    return EXIT_OK


REPORT_METRICS = ("sen", "spe", "sco", "prec")


def build_report(rows, aggregate: str = "mean") -> list[list[str]]:
    """Rows by (model, representation); one column per metric and task, values in percent."""
    cells, tasks, keys = {}, [], []
    for r in rows:
        if r["fold"] != aggregate:
            continue
        key = (r["model"], r["representation"])
        if key not in keys:
            keys.append(key)
        if r["task"] not in tasks:
            tasks.append(r["task"])
        cells[key + (r["task"],)] = r
    order = {t.value: i for i, t in enumerate(Task)}
    tasks.sort(key=lambda t: order.get(t, len(order)))
    rep_order = {r: i for i, r in enumerate(REPRESENTATIONS)}
    keys.sort(key=lambda k: (k[0], rep_order.get(k[1], len(rep_order))))
    header = ["model", "representation"] + [f"{m}_{t}" for m in REPORT_METRICS for t in tasks]
    table = [header]
    for key in keys:
        line = list(key)
        for m in REPORT_METRICS:
            for t in tasks:
                r = cells.get(key + (t,))
                v = None if r is None or r[m] in ("", "NA") else float(r[m])
                line.append("NA" if v is None else f"{100 * v:.1f}")
        table.append(line)
    return table


def cmd_report(args) -> int:
    rows = [r for path in args.results for r in _read_results(path)]
    table = build_report(rows, args.aggregate)
    if len(table) == 1:
        raise DataError(f"no '{args.aggregate}' rows in the given results files")
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(table)
    if args.out:
        atomic_write_text(args.out, buf.getvalue())
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    for row in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rsl", description="Respiratory sound classification experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {rsl.__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="build the cycle manifest and class histogram")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("features", help="extract and cache TF matrices (TFM1 files)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--representation", choices=REPRESENTATIONS, required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("render", help="write Viridis PNGs of conditioned TF matrices")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--representation", choices=REPRESENTATIONS, required=True)
    p.add_argument("--cache", default=None, help="feature cache directory from `features`")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_render)

    for name, func, help_text in (
        ("train", cmd_train, "train and test on a single fold split"),
        ("crossval", cmd_crossval, "full patient-wise cross-validation"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name == "train":
            p.add_argument("--fold", type=int, default=0, help="fold used as the test set")
        p.set_defaults(func=func)

    p = sub.add_parser("stats", help="Mann-Whitney U and Wilcoxon tests over two results CSVs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--metric", default="acc")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--comparison", default=None, help="label for the stats CSV row")
    p.add_argument("--out", default=None, help="stats CSV path")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="merge results CSVs into a per-model, per-representation table")
    p.add_argument("results", nargs="+")
    p.add_argument("--aggregate", choices=("mean", "pooled"), default="mean")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rsl {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"rsl {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericFailure as exc:
        print(f"rsl {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"rsl {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

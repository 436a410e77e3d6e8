"""Adam training with early stopping, confusion matrices, ICBHI metrics and patient-wise cross-validation."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from rsl.errors import NumericFailure, TrainingFailure
from rsl.icbhi import FoldPlan
from rsl.models import ModelParams, init_params, loss_and_grads, predict_logits
from rsl.models.autodiff import log_softmax_np

log = logging.getLogger(__name__)

RESULT_COLUMNS = ("task", "representation", "model", "fold", "acc", "sen", "spe", "prec", "sco", "epochs_ran")
METRIC_NAMES = ("acc", "sen", "spe", "prec", "sco")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 16
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if min(self.epochs, self.batch_size, self.patience) < 1 or self.learning_rate <= 0:
            raise ValueError("epochs, batch_size, patience and learning_rate must be positive")
        if self.patience > self.epochs:
            raise ValueError("patience cannot exceed epochs")


# ---------------------------------------------------------------------------
# Optimiser
# ---------------------------------------------------------------------------


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0


def adam_step(params: dict, grads: dict, state: AdamState, cfg: TrainConfig, t: int | None = None) -> tuple[dict, AdamState]:
    """One bias-corrected Adam update; returns new arrays and a new state, inputs untouched.

    ``t`` defaults to ``state.t + 1``.
    """
    t = state.t + 1 if t is None else t
    if t < 1:
        raise ValueError("Adam step index starts at 1")
    b1, b2 = cfg.beta1, cfg.beta2
    new_params, m_new, v_new = {}, {}, {}
    for name, theta in params.items():
        g = grads[name]
        m = b1 * state.m.get(name, 0.0) + (1 - b1) * g
        v = b2 * state.v.get(name, 0.0) + (1 - b2) * g * g
        m_hat = m / (1 - b1**t)
        v_hat = v / (1 - b2**t)
        new_params[name] = theta - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
        m_new[name], v_new[name] = m, v
    return new_params, AdamState(m_new, v_new, t)


class EarlyStopping:
    """Stop once the monitored loss has gone ``patience`` epochs without a new best."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best = math.inf
        self.best_epoch = 0
        self.stale = 0

    def update(self, loss: float, epoch: int) -> bool:
        """Record one epoch; returns True when training should stop."""
        if loss < self.best:
            self.best, self.best_epoch, self.stale = loss, epoch, 0
        else:
            self.stale += 1
        return self.stale >= self.patience


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass
class TrainResult:
    params: ModelParams
    history: list
    best_epoch: int
    epochs_ran: int


def validation_loss(params: ModelParams, inputs, labels) -> float:
    logits = predict_logits(params, inputs)
    return float(-log_softmax_np(logits)[np.arange(len(labels)), labels].mean())


def train(model_config, train_set, val_set, cfg: TrainConfig) -> TrainResult:
    """Fit a model from scratch.

    ``train_set`` / ``val_set`` are ``(inputs, labels)`` pairs. With an empty
    validation set the training loss drives early stopping instead.
    """
    x_train, y_train = np.asarray(train_set[0]), np.asarray(train_set[1], dtype=int)
    x_val, y_val = np.asarray(val_set[0]), np.asarray(val_set[1], dtype=int)
    if x_train.shape[0] == 0:
        raise ValueError("training set is empty")
    params = init_params(model_config, cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    state = AdamState()
    stopper = EarlyStopping(cfg.patience)
    best = params.copy()
    history = []
    n = x_train.shape[0]
    epoch = 0
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            try:
                loss, grads = loss_and_grads(params, x_train[idx], y_train[idx])
            except NumericFailure as exc:
                raise TrainingFailure(f"epoch {epoch}: {exc}", epoch) from exc
            if not math.isfinite(loss):
                raise TrainingFailure(f"epoch {epoch}: training loss is {loss}", epoch)
            new_tensors, state = adam_step(params.tensors, grads, state, cfg)
            params = ModelParams(params.kind, params.config, new_tensors, params.seed)
            total += loss * idx.shape[0]
        train_loss = total / n
        monitored = validation_loss(params, x_val, y_val) if x_val.shape[0] else train_loss
        if not math.isfinite(monitored):
            raise TrainingFailure(f"epoch {epoch}: validation loss is {monitored}", epoch)
        history.append({"epoch": epoch, "train_loss": train_loss, "val_loss": monitored})
        log.debug("epoch %d train %.5f val %.5f", epoch, train_loss, monitored)
        improved = monitored < stopper.best
        stop = stopper.update(monitored, epoch)
        if improved:
            best = params.copy()
        if stop:
            break
    return TrainResult(best, history, stopper.best_epoch, epoch)


# ---------------------------------------------------------------------------
# Confusion matrices and metrics
# ---------------------------------------------------------------------------


class ConfusionMatrix:
    """Counts with rows = true class, columns = predicted class."""

    def __init__(self, grid):
        grid = np.asarray(grid, dtype=np.int64)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1] or grid.shape[0] < 2:
            raise ValueError("confusion grid must be square with at least 2 classes")
        if np.any(grid < 0):
            raise ValueError("counts must be nonnegative")
        self.grid = grid

    @classmethod
    def from_predictions(cls, truth, predicted, n_classes: int) -> "ConfusionMatrix":
        grid = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(grid, (np.asarray(truth, dtype=int), np.asarray(predicted, dtype=int)), 1)
        return cls(grid)

    @classmethod
    def binary(cls, tp: int, tn: int, fp: int, fn: int) -> "ConfusionMatrix":
        return cls([[tn, fp], [fn, tp]])

    @property
    def n_classes(self) -> int:
        return self.grid.shape[0]

    @property
    def total(self) -> int:
        return int(self.grid.sum())

    def one_vs_rest(self, cls_index: int) -> tuple[int, int, int, int]:
        """(TP, TN, FP, FN) treating ``cls_index`` as the positive class."""
        g = self.grid
        tp = int(g[cls_index, cls_index])
        fn = int(g[cls_index].sum()) - tp
        fp = int(g[:, cls_index].sum()) - tp
        return tp, self.total - tp - fn - fp, fp, fn

    @property
    def counts(self) -> tuple[int, int, int, int]:
        if self.n_classes != 2:
            raise ValueError("TP/TN/FP/FN need a binary matrix; use one_vs_rest")
        return self.one_vs_rest(1)

    def __add__(self, other):
        return ConfusionMatrix(self.grid + other.grid)

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.grid, other.grid)

    def __repr__(self):
        return f"ConfusionMatrix({self.grid.tolist()})"


@dataclass(frozen=True)
class MetricSet:
    """ICBHI metrics in [0, 1]; ``None`` marks a metric whose denominator is zero."""

    acc: float | None
    sen: float | None
    spe: float | None
    prec: float | None
    sco: float | None

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _ratio(num: int, den: int):
    return num / den if den else None


def _score(sen, spe):
    return None if sen is None or spe is None else (sen + spe) / 2


def _mean_defined(values):
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def compute_metrics(cm: ConfusionMatrix) -> MetricSet:
    """Acc, Sen, Spe, Prec and Sco = (Sen + Spe) / 2.

    Binary matrices use class 1 as the adventitious (positive) class. Larger
    matrices report overall accuracy and the macro average of one-vs-rest
    Sen/Spe/Prec over the classes where each is defined.
    """
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    acc = float(np.trace(cm.grid)) / cm.total
    if cm.n_classes == 2:
        tp, tn, fp, fn = cm.counts
        sen, spe, prec = _ratio(tp, tp + fn), _ratio(tn, tn + fp), _ratio(tp, tp + fp)
    else:
        per_class = [cm.one_vs_rest(c) for c in range(cm.n_classes)]
        sen = _mean_defined(_ratio(tp, tp + fn) for tp, tn, fp, fn in per_class)
        spe = _mean_defined(_ratio(tn, tn + fp) for tp, tn, fp, fn in per_class)
        prec = _mean_defined(_ratio(tp, tp + fp) for tp, tn, fp, fn in per_class)
    return MetricSet(acc, sen, spe, prec, _score(sen, spe))


def mean_metrics(sets) -> MetricSet:
    """Average each metric over the sets where it is defined; Sco recomputed from the means."""
    sets = list(sets)
    acc, sen, spe, prec = (_mean_defined(getattr(s, name) for s in sets) for name in ("acc", "sen", "spe", "prec"))
    return MetricSet(acc, sen, spe, prec, _score(sen, spe))


def evaluate(params: ModelParams, inputs, labels, n_classes: int | None = None) -> ConfusionMatrix:
    """Argmax predictions (ties go to the lower class index) tallied against ``labels``."""
    n_classes = n_classes or params.config.n_classes
    labels = np.asarray(labels, dtype=int)
    if labels.shape[0] == 0:
        return ConfusionMatrix(np.zeros((n_classes, n_classes), dtype=np.int64))
    predicted = predict_logits(params, inputs).argmax(axis=1)
    return ConfusionMatrix.from_predictions(labels, predicted, n_classes)


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------


@dataclass
class FoldResult:
    fold: int
    confusion: ConfusionMatrix
    metrics: MetricSet
    epochs_ran: int
    history: list
    test_patients: list
    train_patients: list
    val_patients: list


@dataclass
class CVResult:
    folds: list
    mean: MetricSet
    pooled: MetricSet

    @property
    def pooled_confusion(self) -> ConfusionMatrix:
        total = self.folds[0].confusion
        for f in self.folds[1:]:
            total = total + f.confusion
        return total


def fold_split(plan: FoldPlan, fold: int) -> tuple[set, set, set]:
    """(train, validation, test) patient sets: test = fold, validation = the next fold, train = the rest."""
    test = set(plan.patients_in(fold))
    val = set(plan.patients_in((fold + 1) % plan.k)) if plan.k > 2 else set()
    train_set = set(plan.assignment) - test - val
    return train_set, val, test


def _run_fold(job):
    fold, inputs, labels, patients, plan, model_config, cfg = job
    train_p, val_p, test_p = fold_split(plan, fold)
    mask = {name: np.array([p in group for p in patients]) for name, group in (("train", train_p), ("val", val_p), ("test", test_p))}
    fold_cfg = replace(cfg, seed=cfg.seed + fold)
    result = train(
        model_config,
        (inputs[mask["train"]], labels[mask["train"]]),
        (inputs[mask["val"]], labels[mask["val"]]),
        fold_cfg,
    )
    cm = evaluate(result.params, inputs[mask["test"]], labels[mask["test"]], model_config.n_classes)
    metrics = compute_metrics(cm) if cm.total else MetricSet(None, None, None, None, None)
    return FoldResult(fold, cm, metrics, result.epochs_ran, result.history, sorted(test_p), sorted(train_p), sorted(val_p))


def cross_validate(inputs, labels, patient_ids, plan: FoldPlan, model_config, cfg: TrainConfig, workers: int = 1) -> CVResult:
    """Run every fold as the test set once; folds may run in parallel processes.

    Each fold trains with seed ``cfg.seed + fold``, so results do not depend
    on ``workers``.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=int)
    patients = list(patient_ids)
    if not (inputs.shape[0] == labels.shape[0] == len(patients)):
        raise ValueError("inputs, labels and patient_ids must have the same length")
    missing = set(patients) - set(plan.assignment)
    if missing:
        raise ValueError(f"patients missing from the fold plan: {sorted(missing)[:5]}")
    jobs = [(fold, inputs, labels, patients, plan, model_config, cfg) for fold in range(plan.k)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=min(workers, plan.k)) as pool:
            folds = list(pool.map(_run_fold, jobs))
    else:
        folds = [_run_fold(job) for job in jobs]
    folds.sort(key=lambda f: f.fold)
    cv = CVResult(folds, mean_metrics(f.metrics for f in folds), None)
    cv.pooled = compute_metrics(cv.pooled_confusion)
    return cv


def _fmt(value) -> str:
    return "NA" if value is None else f"{value:.6f}"


def results_rows(cv: CVResult, task: str, representation: str, model: str) -> list[dict]:
    rows = []
    for f in cv.folds:
        rows.append({"task": task, "representation": representation, "model": model, "fold": str(f.fold),
                     **{k: _fmt(v) for k, v in f.metrics.as_dict().items()}, "epochs_ran": str(f.epochs_ran)})
    for label, ms in (("mean", cv.mean), ("pooled", cv.pooled)):
        rows.append({"task": task, "representation": representation, "model": model, "fold": label,
                     **{k: _fmt(v) for k, v in ms.as_dict().items()}, "epochs_ran": ""})
    return rows


def results_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RESULT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def read_results_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))

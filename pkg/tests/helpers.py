"""Shared test oracles: tiny model configs and a central finite-difference gradient checker."""

import itertools
from fractions import Fraction

import numpy as np

from rsl.models import CNNConfig, ViTConfig, init_params, loss_and_grads
from rsl.models import autodiff as ad
from rsl.models.cnn import cnn_logits
from rsl.models.vit import vit_logits

TINY_VIT = ViTConfig(grid_rows=16, grid_cols=24, patch_rows=4, patch_cols=4, d_model=32, n_layers=2, n_heads=2, d_ff=64, n_classes=3)
TINY_CNN = CNNConfig(grid_rows=16, grid_cols=20, conv1_channels=4, conv2_channels=8, hidden=16, n_classes=3)


def generic_params(cfg, seed=0):
    """Initialised params moved off the zero/one init so every gradient path is exercised."""
    params = init_params(cfg, seed)
    rng = np.random.default_rng(seed + 1000)
    for name, arr in params.tensors.items():
        if name.endswith(("b", "bq", "bk", "bv", "bo", "beta", "cls")):
            params[name] = rng.normal(0.0, 0.1, arr.shape)
        elif name.endswith("gamma"):
            params[name] = 1.0 + rng.normal(0.0, 0.1, arr.shape)
    return params


def batch_loss(params, inputs, labels) -> float:
    tensors = {k: ad.Tensor(v) for k, v in params.tensors.items()}
    fn = vit_logits if params.kind == "vit" else cnn_logits
    return float(ad.cross_entropy(fn(inputs, tensors, params.config), labels).data)


def _central(params, inputs, labels, flat, i, eps):
    orig = flat[i]
    flat[i] = orig + eps
    up = batch_loss(params, inputs, labels)
    flat[i] = orig - eps
    down = batch_loss(params, inputs, labels)
    flat[i] = orig
    return (up - down) / (2 * eps)


def _rel(a, n):
    return abs(a - n) / max(abs(a), abs(n), 1e-7)


def gradient_check(params, inputs, labels, coords=200, eps=1e-3, tol=1e-3, seed=0):
    """Max relative error per tensor between reverse-mode and central differences.

    Samples ``coords`` coordinates per tensor (all of them when the tensor is
    smaller). Relative error is |a - n| / max(|a|, |n|, 1e-7). A coordinate
    whose +-eps stencil straddles a LeakyReLU or max-pool switch is not
    differentiable across the stencil; any coordinate over ``tol`` is retried
    once with eps / 100 and the retry count is returned. Real gradient bugs do
    not shrink with the step, so the retry cannot hide them.
    """
    _, grads = loss_and_grads(params, inputs, labels)
    rng = np.random.default_rng(seed)
    errors, counts, retries = {}, {}, 0
    for name, arr in params.tensors.items():
        flat = arr.reshape(-1)
        idx = np.arange(flat.size) if flat.size <= coords else rng.choice(flat.size, coords, replace=False)
        worst = 0.0
        for i in idx:
            analytic = grads[name].reshape(-1)[i]
            err = _rel(analytic, _central(params, inputs, labels, flat, i, eps))
            if err >= tol:
                retries += 1
                err = _rel(analytic, _central(params, inputs, labels, flat, i, eps / 100))
            worst = max(worst, err)
        errors[name], counts[name] = worst, len(idx)
    return errors, counts, retries


def random_batch(cfg, n, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, (n, cfg.grid_rows, cfg.grid_cols))
    y = rng.integers(0, cfg.n_classes, n)
    return x, y


def brute_mwu_p(xs, ys) -> Fraction:
    """Two-sided exact p by enumerating every split of the pooled sample.

    U1 is recomputed by pairwise comparison for each split; p counts splits at
    least as far from n*m/2 as the observed one.
    """
    pooled = list(xs) + list(ys)
    n, m = len(xs), len(ys)

    def u1(idx):
        chosen = set(idx)
        a = [pooled[i] for i in idx]
        b = [pooled[i] for i in range(n + m) if i not in chosen]
        return sum((p > q) + 0.5 * (p == q) for p in a for q in b)

    observed = abs(2 * u1(range(n)) - n * m)
    hits = total = 0
    for idx in itertools.combinations(range(n + m), n):
        total += 1
        hits += abs(2 * u1(idx) - n * m) >= observed
    return Fraction(hits, total)


def brute_wilcoxon_p(xs, ys) -> Fraction:
    """Two-sided exact p by flipping every sign pattern of the nonzero differences."""
    d = [a - b for a, b in zip(xs, ys) if a != b]
    mags = [abs(v) for v in d]
    ranks = [sum(q < r for q in mags) + (sum(q == r for q in mags) + 1) / 2 for r in mags]
    total = sum(ranks)
    observed = abs(2 * sum(r for r, v in zip(ranks, d) if v > 0) - total)
    hits = 0
    for signs in itertools.product((False, True), repeat=len(d)):
        hits += abs(2 * sum(r for r, s in zip(ranks, signs) if s) - total) >= observed
    return Fraction(hits, 2 ** len(d))

"""Classifiers (ViT, baseline CNN) over the numpy autodiff engine."""

from __future__ import annotations

import numpy as np

from rsl.models import autodiff as ad
from rsl.models.autodiff import Tensor, cross_entropy, softmax_cross_entropy
from rsl.models.cnn import CNNConfig, baseline_cnn_forward, cnn_logits, init_cnn
from rsl.models.params import ModelParams, load_checkpoint, save_checkpoint
from rsl.models.vit import (
    ViTConfig,
    init_vit,
    multi_head_self_attention,
    patchify,
    unpatchify,
    vit_forward,
    vit_logits,
)

MODEL_KINDS = ("vit", "baseline-cnn")


def init_params(cfg, seed: int) -> ModelParams:
    if isinstance(cfg, ViTConfig):
        return init_vit(cfg, seed)
    if isinstance(cfg, CNNConfig):
        return init_cnn(cfg, seed)
    raise TypeError(f"unsupported config {type(cfg).__name__}")


def config_from_dict(kind: str, values: dict):
    if kind == "vit":
        return ViTConfig(**values)
    if kind == "baseline-cnn":
        return CNNConfig(**values)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


def _graph_logits(params: ModelParams, inputs, tensors: dict):
    if params.kind == "vit":
        return vit_logits(inputs, tensors, params.config)
    return cnn_logits(inputs, tensors, params.config)


def predict_logits(params: ModelParams, inputs, batch_size: int = 64) -> np.ndarray:
    """Logits for a batch of inputs, evaluated in fixed-size chunks."""
    tensors = {k: Tensor(v) for k, v in params.tensors.items()}
    x = np.asarray(inputs, dtype=np.float64)
    chunks = [_graph_logits(params, x[i : i + batch_size], tensors).data for i in range(0, x.shape[0], batch_size)]
    return np.concatenate(chunks, axis=0)


def loss_and_grads(params: ModelParams, inputs, labels, loss_scale: float = 1.0):
    """Mean cross-entropy over the batch and its exact gradient for every parameter.

    Parameters the loss does not depend on receive zero gradients.
    """
    tensors = {k: ad.parameter(v, name=k) for k, v in params.tensors.items()}
    loss = cross_entropy(_graph_logits(params, inputs, tensors), labels)
    if loss_scale != 1.0:
        loss = ad.mul(loss, loss_scale)
    loss.backward()
    grads = {k: (t.grad if t.grad is not None else np.zeros_like(t.data)) for k, t in tensors.items()}
    return float(loss.data), grads


__all__ = [
    "CNNConfig",
    "MODEL_KINDS",
    "ModelParams",
    "Tensor",
    "ViTConfig",
    "baseline_cnn_forward",
    "config_from_dict",
    "cross_entropy",
    "init_params",
    "load_checkpoint",
    "loss_and_grads",
    "multi_head_self_attention",
    "patchify",
    "predict_logits",
    "save_checkpoint",
    "softmax_cross_entropy",
    "unpatchify",
    "vit_forward",
]

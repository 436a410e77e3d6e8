"""Two-convolution baseline CNN with LeakyReLU activations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rsl.models import autodiff as ad
from rsl.models.params import ModelParams, draw


@dataclass(frozen=True)
class CNNConfig:
    grid_rows: int = 64
    grid_cols: int = 144
    in_channels: int = 1
    conv1_channels: int = 16
    conv1_kernel: int = 5
    conv2_channels: int = 32
    conv2_kernel: int = 3
    hidden: int = 128
    n_classes: int = 2
    leak: float = 0.01

    def __post_init__(self):
        if self.flat_features < 1:
            raise ValueError(f"grid {self.grid_rows}x{self.grid_cols} too small for the conv/pool stack")

    @property
    def feature_map(self) -> tuple[int, int]:
        h = (self.grid_rows - self.conv1_kernel + 1) // 2
        w = (self.grid_cols - self.conv1_kernel + 1) // 2
        return (h - self.conv2_kernel + 1) // 2, (w - self.conv2_kernel + 1) // 2

    @property
    def flat_features(self) -> int:
        h, w = self.feature_map
        return self.conv2_channels * max(h, 0) * max(w, 0)


def cnn_layout(cfg: CNNConfig):
    k1, k2 = cfg.conv1_kernel, cfg.conv2_kernel
    return [
        ("conv1.w", (cfg.conv1_channels, cfg.in_channels, k1, k1), "xavier"),
        ("conv1.b", (cfg.conv1_channels,), "zero"),
        ("conv2.w", (cfg.conv2_channels, cfg.conv1_channels, k2, k2), "xavier"),
        ("conv2.b", (cfg.conv2_channels,), "zero"),
        ("dense.w", (cfg.flat_features, cfg.hidden), "xavier"),
        ("dense.b", (cfg.hidden,), "zero"),
        ("head.w", (cfg.hidden, cfg.n_classes), "xavier"),
        ("head.b", (cfg.n_classes,), "zero"),
    ]


def init_cnn(cfg: CNNConfig, seed: int) -> ModelParams:
    return ModelParams("baseline-cnn", cfg, draw(cnn_layout(cfg), seed), seed)


def cnn_logits(inputs, params: dict, cfg: CNNConfig):
    """inputs: (B, rows, cols) single channel or (B, C, rows, cols)."""
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim == 3:
        x = x[:, None]
    if x.shape[1:] != (cfg.in_channels, cfg.grid_rows, cfg.grid_cols):
        raise ValueError(f"input {x.shape[1:]} does not match config")
    h = ad.leaky_relu(ad.conv2d(x, params["conv1.w"], params["conv1.b"]), cfg.leak)
    h = ad.max_pool2d(h, 2)
    h = ad.leaky_relu(ad.conv2d(h, params["conv2.w"], params["conv2.b"]), cfg.leak)
    h = ad.max_pool2d(h, 2)
    h = ad.reshape(h, (x.shape[0], cfg.flat_features))
    h = ad.leaky_relu(ad.matmul(h, params["dense.w"]) + params["dense.b"], cfg.leak)
    return ad.matmul(h, params["head.w"]) + params["head.b"]


def baseline_cnn_forward(grid, params: ModelParams) -> np.ndarray:
    """Logits for one input or a batch; softmax is left to the loss."""
    x = np.asarray(grid, dtype=np.float64)
    cfg = params.config
    single = x.ndim == 2 or (x.ndim == 3 and cfg.in_channels > 1 and x.shape[0] == cfg.in_channels)
    tensors = {k: ad.Tensor(v) for k, v in params.tensors.items()}
    out = cnn_logits(x[None] if single else x, tensors, cfg).data
    return out[0] if single else out

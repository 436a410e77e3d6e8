"""Encoder-only Vision Transformer with a class token and post-norm residual blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rsl.errors import NumericFailure
from rsl.models import autodiff as ad
from rsl.models.params import ModelParams, draw


@dataclass(frozen=True)
class ViTConfig:
    grid_rows: int = 64
    grid_cols: int = 144
    patch_rows: int = 8
    patch_cols: int = 8
    d_model: int = 512
    n_layers: int = 6
    n_heads: int = 8
    d_ff: int = 2048
    n_classes: int = 2

    def __post_init__(self):
        if self.grid_rows % self.patch_rows or self.grid_cols % self.patch_cols:
            raise ValueError(
                f"grid {self.grid_rows}x{self.grid_cols} not divisible by patch {self.patch_rows}x{self.patch_cols}"
            )
        if self.d_model % self.n_heads:
            raise ValueError(f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if min(self.d_model, self.n_layers, self.n_heads, self.d_ff, self.n_classes) < 1:
            raise ValueError("all ViT sizes must be positive")

    @property
    def n_patches(self) -> int:
        return (self.grid_rows // self.patch_rows) * (self.grid_cols // self.patch_cols)

    @property
    def patch_dim(self) -> int:
        return self.patch_rows * self.patch_cols


def vit_layout(cfg: ViTConfig):
    d = cfg.d_model
    layout = [
        ("patch.w", (cfg.patch_dim, d), "xavier"),
        ("patch.b", (d,), "zero"),
        ("cls", (d,), "zero"),
        ("pos", (cfg.n_patches + 1, d), "pos"),
    ]
    for i in range(cfg.n_layers):
        p = f"layer{i}."
        for proj in ("wq", "wk", "wv", "wo"):
            layout.append((p + "attn." + proj, (d, d), "xavier"))
            layout.append((p + "attn.b" + proj[1], (d,), "zero"))
        layout += [
            (p + "ln1.gamma", (d,), "one"),
            (p + "ln1.beta", (d,), "zero"),
            (p + "ff1.w", (d, cfg.d_ff), "xavier"),
            (p + "ff1.b", (cfg.d_ff,), "zero"),
            (p + "ff2.w", (cfg.d_ff, d), "xavier"),
            (p + "ff2.b", (d,), "zero"),
            (p + "ln2.gamma", (d,), "one"),
            (p + "ln2.beta", (d,), "zero"),
        ]
    layout += [("head.w", (d, cfg.n_classes), "xavier"), ("head.b", (cfg.n_classes,), "zero")]
    return layout


def init_vit(cfg: ViTConfig, seed: int) -> ModelParams:
    return ModelParams("vit", cfg, draw(vit_layout(cfg), seed), seed)


def patchify(grid, cfg: ViTConfig) -> np.ndarray:
    """Split (..., rows, cols) into (..., n_patches, pr*pc) in row-major patch order."""
    g = np.asarray(grid, dtype=np.float64)
    rows, cols = g.shape[-2:]
    pr, pc = cfg.patch_rows, cfg.patch_cols
    if rows % pr or cols % pc:
        raise ValueError(f"grid {rows}x{cols} not divisible by patch {pr}x{pc}")
    lead = g.shape[:-2]
    g = g.reshape(*lead, rows // pr, pr, cols // pc, pc)
    g = np.moveaxis(g, -3, -2)
    return g.reshape(*lead, (rows // pr) * (cols // pc), pr * pc)


def unpatchify(patches, cfg: ViTConfig, rows: int, cols: int) -> np.ndarray:
    p = np.asarray(patches)
    pr, pc = cfg.patch_rows, cfg.patch_cols
    lead = p.shape[:-2]
    g = p.reshape(*lead, rows // pr, cols // pc, pr, pc)
    g = np.moveaxis(g, -2, -3)
    return g.reshape(*lead, rows, cols)


def multi_head_self_attention(x, params: dict, prefix: str, n_heads: int, return_weights: bool = False):
    """Scaled dot-product self-attention over (B, T, d) tokens.

    ``params`` maps names to Tensors (or arrays); ``prefix`` selects the layer,
    e.g. ``"layer0.attn."``. Returns the (B, T, d) output, and the (B, h, T, T)
    attention weights when requested.
    """
    x = ad.as_tensor(x)
    bsz, t, d = x.shape
    dh = d // n_heads

    def proj(name):
        y = ad.matmul(x, params[prefix + "w" + name]) + params[prefix + "b" + name]
        return ad.transpose(ad.reshape(y, (bsz, t, n_heads, dh)), (0, 2, 1, 3))

    q, k, v = proj("q"), proj("k"), proj("v")
    scores = ad.mul(ad.matmul(q, ad.transpose(k, (0, 1, 3, 2))), 1.0 / np.sqrt(dh))
    weights = ad.softmax(scores, axis=-1)
    ctx = ad.reshape(ad.transpose(ad.matmul(weights, v), (0, 2, 1, 3)), (bsz, t, d))
    out = ad.matmul(ctx, params[prefix + "wo"]) + params[prefix + "bo"]
    return (out, weights) if return_weights else out


def encoder_block(x, params: dict, layer: int, cfg: ViTConfig):
    """x <- LN(x + MHSA(x)); x <- LN(x + FFN(x))."""
    p = f"layer{layer}."
    x = ad.layer_norm(x + multi_head_self_attention(x, params, p + "attn.", cfg.n_heads), params[p + "ln1.gamma"], params[p + "ln1.beta"])
    hidden = ad.gelu(ad.matmul(x, params[p + "ff1.w"]) + params[p + "ff1.b"])
    ff = ad.matmul(hidden, params[p + "ff2.w"]) + params[p + "ff2.b"]
    return ad.layer_norm(x + ff, params[p + "ln2.gamma"], params[p + "ln2.beta"])


def vit_logits(grids, params: dict, cfg: ViTConfig):
    """Differentiable forward pass; ``grids`` is (B, rows, cols), ``params`` maps names to Tensors."""
    g = np.asarray(grids, dtype=np.float64)
    if g.shape[-2:] != (cfg.grid_rows, cfg.grid_cols):
        raise ValueError(f"grid {g.shape[-2:]} does not match config {cfg.grid_rows}x{cfg.grid_cols}")
    patches = patchify(g, cfg)
    bsz = patches.shape[0]
    tokens = ad.matmul(patches, params["patch.w"]) + params["patch.b"]
    cls = ad.broadcast_to(ad.reshape(params["cls"], (1, 1, cfg.d_model)), (bsz, 1, cfg.d_model))
    x = ad.concat([cls, tokens], axis=1) + params["pos"]
    for layer in range(cfg.n_layers):
        try:
            x = encoder_block(x, params, layer, cfg)
        except NumericFailure as exc:
            raise NumericFailure(f"encoder layer {layer}: {exc}", layer=layer) from exc
    return ad.matmul(ad.take(x, 0, axis=1), params["head.w"]) + params["head.b"]


def vit_forward(tf_grid, params: ModelParams) -> np.ndarray:
    """Class logits for one (rows, cols) grid or a (B, rows, cols) batch."""
    grid = np.asarray(tf_grid, dtype=np.float64)
    single = grid.ndim == 2
    tensors = {k: ad.Tensor(v) for k, v in params.tensors.items()}
    out = vit_logits(grid[None] if single else grid, tensors, params.config).data
    return out[0] if single else out

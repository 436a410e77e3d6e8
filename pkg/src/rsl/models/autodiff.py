"""Minimal reverse-mode automatic differentiation over numpy arrays.

Every op records a closure that pushes the output gradient to its parents;
``Tensor.backward`` replays them in reverse topological order. Composite
layers (layer norm, softmax, convolution, pooling, cross-entropy) are single
fused ops with hand-written adjoints.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import erf

from rsl.errors import NumericFailure

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_backward", "_op")

    def __init__(self, data, parents=(), backward=None, requires_grad=False, name=None, op=""):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents = parents
        self._backward = backward
        self._op = op

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, op={self._op or 'leaf'})"

    def _accumulate(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64, copy=True)
        else:
            self.grad += g

    def backward(self, grad=None):
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without a seed gradient needs a scalar output")
            grad = np.ones_like(self.data)
        order, seen, stack = [], set(), [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if p.requires_grad and id(p) not in seen:
                    stack.append((p, False))
        self._accumulate(grad)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # Operator sugar
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(as_tensor(other), -1.0))

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def parameter(data, name=None) -> Tensor:
    return Tensor(data, requires_grad=True, name=name)


def _check(data, op):
    if not np.all(np.isfinite(data)):
        raise NumericFailure(f"non-finite value produced by {op}")
    return data


def _result(data, parents, backward, op):
    parents = tuple(p for p in parents if isinstance(p, Tensor))
    needs = any(p.requires_grad for p in parents)
    return Tensor(_check(data, op), parents if needs else (), backward if needs else None, needs, op=op)


def _unbroadcast(g, shape):
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# Elementwise and linear algebra
# ---------------------------------------------------------------------------


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g, b.shape))

    return _result(a.data + b.data, (a, b), backward, "add")


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g * b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(g * a.data, b.shape))

    return _result(a.data * b.data, (a, b), backward, "mul")


def matmul(a, b):
    a, b = as_tensor(a), as_tensor(b)

    def backward(g):
        if a.requires_grad:
            a._accumulate(_unbroadcast(g @ np.swapaxes(b.data, -1, -2), a.shape))
        if b.requires_grad:
            if b.data.ndim == 2 and a.data.ndim > 2:
                # shared weight: fold the batch axes into one product instead of summing per-sample outer products
                b._accumulate(a.data.reshape(-1, a.shape[-1]).T @ g.reshape(-1, g.shape[-1]))
            else:
                b._accumulate(_unbroadcast(np.swapaxes(a.data, -1, -2) @ g, b.shape))

    return _result(a.data @ b.data, (a, b), backward, "matmul")


def reshape(a, shape):
    a = as_tensor(a)
    return _result(a.data.reshape(shape), (a,), lambda g: a._accumulate(g.reshape(a.shape)), "reshape")


def transpose(a, axes):
    a = as_tensor(a)
    inverse = np.argsort(axes)
    return _result(a.data.transpose(axes), (a,), lambda g: a._accumulate(g.transpose(inverse)), "transpose")


def concat(tensors, axis):
    tensors = [as_tensor(t) for t in tensors]
    sizes = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        for t, piece in zip(tensors, np.split(g, sizes, axis=axis)):
            if t.requires_grad:
                t._accumulate(piece)

    return _result(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward, "concat")


def take(a, index, axis):
    """Select a single index along ``axis`` (dropping that axis)."""
    a = as_tensor(a)

    def backward(g):
        full = np.zeros_like(a.data)
        np.moveaxis(full, axis, 0)[index] = g
        a._accumulate(full)

    return _result(np.take(a.data, index, axis=axis), (a,), backward, "take")


def broadcast_to(a, shape):
    a = as_tensor(a)
    return _result(np.broadcast_to(a.data, shape).copy(), (a,), lambda g: a._accumulate(_unbroadcast(g, a.shape)), "broadcast")


def sum_all(a):
    a = as_tensor(a)
    return _result(a.data.sum(), (a,), lambda g: a._accumulate(np.broadcast_to(g, a.shape)), "sum")


# ---------------------------------------------------------------------------
# Activations and normalisation
# ---------------------------------------------------------------------------


def gelu(a):
    a = as_tensor(a)
    x = a.data
    cdf = 0.5 * (1.0 + erf(x / _SQRT2))

    def backward(g):
        a._accumulate(g * (cdf + x * _INV_SQRT_2PI * np.exp(-0.5 * x * x)))

    return _result(x * cdf, (a,), backward, "gelu")


def leaky_relu(a, slope=0.01):
    a = as_tensor(a)
    scale = np.where(a.data > 0, 1.0, slope)
    return _result(a.data * scale, (a,), lambda g: a._accumulate(g * scale), "leaky_relu")


def softmax(a, axis=-1):
    a = as_tensor(a)
    z = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        a._accumulate(y * (g - (g * y).sum(axis=axis, keepdims=True)))

    return _result(y, (a,), backward, "softmax")


def layer_norm(a, gamma, beta, eps=1e-6):
    """Normalise over the last axis, then apply per-feature scale and shift."""
    a, gamma, beta = as_tensor(a), as_tensor(gamma), as_tensor(beta)
    mu = a.data.mean(axis=-1, keepdims=True)
    centred = a.data - mu
    inv_std = 1.0 / np.sqrt((centred**2).mean(axis=-1, keepdims=True) + eps)
    xhat = centred * inv_std

    def backward(g):
        if gamma.requires_grad:
            gamma._accumulate(_unbroadcast(g * xhat, gamma.shape))
        if beta.requires_grad:
            beta._accumulate(_unbroadcast(g, beta.shape))
        if a.requires_grad:
            dxhat = g * gamma.data
            a._accumulate(
                inv_std
                * (dxhat - dxhat.mean(axis=-1, keepdims=True) - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True))
            )

    return _result(xhat * gamma.data + beta.data, (a, gamma, beta), backward, "layer_norm")


# ---------------------------------------------------------------------------
# Convolution and pooling
# ---------------------------------------------------------------------------


def conv2d(x, w, b):
    """Valid 2-D convolution (kernel flipped, as in the signal-processing definition).

    x: (B, C, H, W); w: (O, C, kh, kw); b: (O,) -> (B, O, H-kh+1, W-kw+1).
    """
    x, w, b = as_tensor(x), as_tensor(w), as_tensor(b)
    kh, kw = w.shape[2:]
    flipped = w.data[:, :, ::-1, ::-1]
    windows = sliding_window_view(x.data, (kh, kw), axis=(2, 3))
    out = np.tensordot(windows, flipped, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2) + b.data[None, :, None, None]

    def backward(g):
        if b.requires_grad:
            b._accumulate(g.sum(axis=(0, 2, 3)))
        if w.requires_grad:
            d_flipped = np.tensordot(g, windows, axes=([0, 2, 3], [0, 2, 3]))
            w._accumulate(d_flipped[:, :, ::-1, ::-1])
        if x.requires_grad:
            padded = np.pad(g, ((0, 0), (0, 0), (kh - 1, kh - 1), (kw - 1, kw - 1)))
            gw = sliding_window_view(padded, (kh, kw), axis=(2, 3))
            x._accumulate(np.tensordot(gw, w.data, axes=([1, 4, 5], [0, 2, 3])).transpose(0, 3, 1, 2))

    return _result(out, (x, w, b), backward, "conv2d")


def max_pool2d(x, size=2):
    """Non-overlapping size x size max pooling; trailing rows/cols that do not fill a window are dropped."""
    x = as_tensor(x)
    bsz, ch, h, wd = x.shape
    ho, wo = h // size, wd // size
    cropped = x.data[:, :, : ho * size, : wo * size]
    blocks = cropped.reshape(bsz, ch, ho, size, wo, size).transpose(0, 1, 2, 4, 3, 5).reshape(bsz, ch, ho, wo, size * size)
    arg = blocks.argmax(axis=-1)
    out = np.take_along_axis(blocks, arg[..., None], axis=-1)[..., 0]

    def backward(g):
        gb = np.zeros_like(blocks)
        np.put_along_axis(gb, arg[..., None], g[..., None], axis=-1)
        gx = np.zeros_like(x.data)
        gx[:, :, : ho * size, : wo * size] = (
            gb.reshape(bsz, ch, ho, wo, size, size).transpose(0, 1, 2, 4, 3, 5).reshape(bsz, ch, ho * size, wo * size)
        )
        x._accumulate(gx)

    return _result(out, (x,), backward, "max_pool2d")


# ---------------------------------------------------------------------------
# Loss
# ---------------------------------------------------------------------------


def log_softmax_np(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def softmax_cross_entropy(logits, class_index: int):
    """Loss -log softmax(logits)[class] and its gradient softmax - onehot, for one example."""
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= class_index < logits.shape[-1]:
        raise ValueError(f"class index {class_index} out of range for {logits.shape[-1]} classes")
    logp = log_softmax_np(logits)
    grad = np.exp(logp)
    grad[class_index] -= 1.0
    return float(-logp[class_index]), grad


def cross_entropy(logits, labels):
    """Mean softmax cross-entropy over a batch of (B, C) logits."""
    logits = as_tensor(logits)
    labels = np.asarray(labels, dtype=int)
    bsz = labels.shape[0]
    logp = log_softmax_np(logits.data)
    loss = -logp[np.arange(bsz), labels].mean()

    def backward(g):
        d = np.exp(logp)
        d[np.arange(bsz), labels] -= 1.0
        logits._accumulate(g * d / bsz)

    return _result(np.asarray(loss), (logits,), backward, "cross_entropy")

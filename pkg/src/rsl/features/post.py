"""Post-processing of TF matrices: compression, normalisation, resizing, rendering and persistence."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

from rsl._io import atomic_write
from rsl.errors import DataError
from rsl.features._viridis import VIRIDIS_256
from rsl.features.spectral import TF_KINDS, TFMatrix

LOG_COMPRESS_REF = 1e-6

_VIRIDIS = np.asarray(VIRIDIS_256, dtype=np.float64)
_TFM_MAGIC = b"TFM1"
_TFM_HEADER = struct.Struct("<4sIIdB")


def minmax_normalize(tf: TFMatrix) -> TFMatrix:
    """Scale to [0, 1] per matrix; a constant matrix maps to all zeros."""
    v = tf.values
    lo, hi = v.min(), v.max()
    out = np.zeros_like(v) if hi <= lo else (v - lo) / (hi - lo)
    return TFMatrix(out, tf.freq_axis_hz, tf.frame_hop_s, tf.kind)


def log_compress_normalize(tf: TFMatrix, ref: float = LOG_COMPRESS_REF) -> TFMatrix:
    """v' = log(1 + v / ref), then min-max to [0, 1]. Not defined for MFCCs."""
    if tf.kind == "mfcc":
        raise ValueError("MFCCs are already log-domain; use minmax_normalize")
    compressed = TFMatrix(np.log1p(tf.values / ref), tf.freq_axis_hz, tf.frame_hop_s, tf.kind)
    return minmax_normalize(compressed)


def condition(tf: TFMatrix) -> TFMatrix:
    """Classifier input conditioning: log compression for magnitudes, plain min-max for MFCCs."""
    return minmax_normalize(tf) if tf.kind == "mfcc" else log_compress_normalize(tf)


def _interp_axis(n_in: int, n_out: int):
    if n_out == 1:
        pos = np.array([(n_in - 1) / 2.0])
    else:
        pos = np.linspace(0.0, n_in - 1, n_out)
    lo = np.clip(np.floor(pos).astype(int), 0, n_in - 1)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, pos - lo


def resize_to_grid(tf: TFMatrix, rows: int, cols: int) -> TFMatrix:
    """Bilinear resampling with corner-aligned sample positions."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    k, l = tf.shape
    if (k, l) == (rows, cols):
        return tf
    r0, r1, rf = _interp_axis(k, rows)
    c0, c1, cf = _interp_axis(l, cols)
    v = tf.values
    top = v[r0][:, c0] * (1 - cf) + v[r0][:, c1] * cf
    bottom = v[r1][:, c0] * (1 - cf) + v[r1][:, c1] * cf
    out = top * (1 - rf)[:, None] + bottom * rf[:, None]
    freqs = tf.freq_axis_hz[r0] * (1 - rf) + tf.freq_axis_hz[r1] * rf
    hop = tf.frame_hop_s * (l - 1) / (cols - 1) if cols > 1 and l > 1 else tf.frame_hop_s
    return TFMatrix(out, freqs, hop, tf.kind)


def viridis_rgb(values) -> np.ndarray:
    """Map values in [0, 1] to uint8 RGB by linear interpolation in the 256-entry table."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    pos = v * 255.0
    lo = np.minimum(np.floor(pos).astype(int), 254)
    frac = (pos - lo)[..., None]
    rgb = _VIRIDIS[lo] * (1 - frac) + _VIRIDIS[lo + 1] * frac
    return np.round(rgb).astype(np.uint8)


def viridis_image(tf: TFMatrix) -> np.ndarray:
    """H x W x 3 image, lowest frequency in the bottom row."""
    return viridis_rgb(tf.values[::-1])


def render_viridis(tf: TFMatrix, path) -> Path:
    """Write a PNG with one pixel per cell."""
    if tf.values.size and (tf.values.min() < 0 or tf.values.max() > 1):
        raise ValueError("render_viridis expects values normalised to [0, 1]")
    img = Image.fromarray(viridis_image(tf), mode="RGB")
    path = Path(path)
    try:
        atomic_write(path, writer=lambda fh: img.save(fh, format="PNG"))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def encode_tfm(tf: TFMatrix) -> bytes:
    k, l = tf.shape
    header = _TFM_HEADER.pack(_TFM_MAGIC, k, l, tf.frame_hop_s, TF_KINDS.index(tf.kind))
    return header + tf.values.astype("<f4").tobytes(order="C") + tf.freq_axis_hz.astype("<f4").tobytes()


def decode_tfm(blob: bytes) -> TFMatrix:
    if len(blob) < _TFM_HEADER.size:
        raise DataError("TFM1 container truncated")
    magic, k, l, hop, kind = _TFM_HEADER.unpack_from(blob, 0)
    if magic != _TFM_MAGIC:
        raise DataError(f"bad TFM magic {magic!r}")
    if kind >= len(TF_KINDS):
        raise DataError(f"bad TFM kind byte {kind}")
    body = blob[_TFM_HEADER.size :]
    if len(body) != 4 * (k * l + k):
        raise DataError(f"TFM1 payload has {len(body)} bytes, expected {4 * (k * l + k)}")
    values = np.frombuffer(body, dtype="<f4", count=k * l).reshape(k, l)
    freqs = np.frombuffer(body, dtype="<f4", offset=4 * k * l, count=k)
    return TFMatrix(values.astype(np.float64), freqs.astype(np.float64), hop, TF_KINDS[kind])


def save_tfm(tf: TFMatrix, path) -> Path:
    path = Path(path)
    atomic_write(path, encode_tfm(tf))
    return path


def load_tfm(path) -> TFMatrix:
    return decode_tfm(Path(path).read_bytes())


def quantize_f32(tf: TFMatrix) -> TFMatrix:
    """Round values and axis through float32, exactly as a save/load round trip would."""
    return TFMatrix(
        tf.values.astype(np.float32).astype(np.float64),
        tf.freq_axis_hz.astype(np.float32).astype(np.float64),
        tf.frame_hop_s,
        tf.kind,
    )

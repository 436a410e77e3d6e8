"""Audio primitives: WAV I/O, resampling, windowing/framing and a reference DFT."""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import firwin, resample_poly

from rsl._io import atomic_write
from rsl.errors import DataError

log = logging.getLogger(__name__)

WINDOW_KINDS = ("hann", "rectangular", "blackman-harris")

# Resampler design: Kaiser-windowed sinc, 64 taps per polyphase branch.
RESAMPLE_TAPS_PER_PHASE = 64
RESAMPLE_KAISER_BETA = 8.0
RESAMPLE_CUTOFF_FRACTION = 0.45

_PCM16_SCALE = 1.0 / 32768.0
_FORMAT_PCM = 1
_FORMAT_FLOAT = 3
_FORMAT_EXTENSIBLE = 0xFFFE


class WavFormatError(DataError):
    """Malformed RIFF/WAVE structure."""


class UnsupportedEncodingError(DataError):
    """Valid WAV header but a sample encoding this reader does not handle."""


class EmptyFramesError(ValueError):
    """Signal shorter than a single analysis frame."""


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {samples.shape}")
        if int(self.sample_rate_hz) <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz


@dataclass(frozen=True)
class FramePlan:
    frame_len_samples: int
    hop_samples: int
    window_kind: str = "hann"

    def __post_init__(self):
        if self.frame_len_samples <= 0:
            raise ValueError("frame_len_samples must be positive")
        if not 0 < self.hop_samples <= self.frame_len_samples:
            raise ValueError("hop_samples must satisfy 0 < hop <= frame_len")
        if self.window_kind not in WINDOW_KINDS:
            raise ValueError(f"unknown window kind {self.window_kind!r}; expected one of {WINDOW_KINDS}")

    def frame_count(self, n_samples: int) -> int:
        if n_samples < self.frame_len_samples:
            return 0
        return (n_samples - self.frame_len_samples) // self.hop_samples + 1


# ---------------------------------------------------------------------------
# WAV
# ---------------------------------------------------------------------------


def _iter_chunks(blob: bytes):
    pos = 12
    while pos + 8 <= len(blob):
        cid, size = struct.unpack_from("<4sI", blob, pos)
        body = blob[pos + 8 : pos + 8 + size]
        if len(body) < size and cid != b"data":
            raise WavFormatError(f"chunk {cid!r} truncated")
        yield cid, body
        pos += 8 + size + (size & 1)


def read_wav(path) -> Waveform:
    """Decode a PCM16 or float32 RIFF/WAVE file, averaging channels to mono."""
    blob = Path(path).read_bytes()
    if len(blob) < 12 or blob[:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    for cid, body in _iter_chunks(blob):
        if cid == b"fmt ":
            if len(body) < 16:
                raise WavFormatError(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _FORMAT_EXTENSIBLE:
                if len(body) < 26:
                    raise WavFormatError(f"{path}: extensible fmt chunk too short")
                # First two bytes of the sub-format GUID carry the real format tag.
                (sub_tag,) = struct.unpack_from("<H", body, 24)
                fmt = (sub_tag,) + fmt[1:]
        elif cid == b"data":
            data = body
    if fmt is None:
        raise WavFormatError(f"{path}: missing fmt chunk")
    if data is None:
        raise WavFormatError(f"{path}: missing data chunk")

    tag, channels, rate, _, block_align, bits = fmt
    if channels < 1 or rate < 1:
        raise WavFormatError(f"{path}: invalid channel count or sample rate")
    if tag == _FORMAT_PCM and bits == 16:
        dtype = np.dtype("<i2")
    elif tag == _FORMAT_FLOAT and bits == 32:
        dtype = np.dtype("<f4")
    else:
        raise UnsupportedEncodingError(f"{path}: format tag {tag} with {bits} bits/sample is not supported")
    if block_align != channels * dtype.itemsize:
        raise WavFormatError(f"{path}: block_align {block_align} inconsistent with {channels}x{bits} bits")

    n_frames = len(data) // block_align
    raw = np.frombuffer(data[: n_frames * block_align], dtype=dtype).reshape(n_frames, channels)
    samples = raw.astype(np.float64)
    if dtype.kind == "i":
        samples *= _PCM16_SCALE
    return Waveform(samples.mean(axis=1) if channels > 1 else samples[:, 0], rate)


def write_wav(path, samples, sample_rate_hz: int, encoding: str = "pcm16") -> None:
    """Write mono or (n, channels) samples as PCM16 or float32."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    channels = arr.shape[1]
    if encoding == "pcm16":
        payload = np.clip(np.round(arr * 32768.0), -32768, 32767).astype("<i2").tobytes()
        tag, width = _FORMAT_PCM, 2
    elif encoding == "float32":
        payload = arr.astype("<f4").tobytes()
        tag, width = _FORMAT_FLOAT, 4
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    block = channels * width
    fmt = struct.pack("<HHIIHH", tag, channels, sample_rate_hz, sample_rate_hz * block, block, width * 8)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt + b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) & 1:
        body += b"\x00"
    atomic_write(path, b"RIFF" + struct.pack("<I", len(body)) + body)


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------


def resample(w: Waveform, target_rate_hz: int) -> Waveform:
    """Rational-ratio polyphase resampling with a Kaiser windowed-sinc low-pass.

    The anti-alias cutoff sits at 0.45 of the lower of the two rates.
    """
    if target_rate_hz is None or int(target_rate_hz) <= 0:
        raise ValueError(f"target_rate_hz must be positive, got {target_rate_hz}")
    target_rate_hz = int(target_rate_hz)
    if target_rate_hz == w.sample_rate_hz:
        return Waveform(w.samples.copy(), target_rate_hz)
    g = math.gcd(target_rate_hz, w.sample_rate_hz)
    up, down = target_rate_hz // g, w.sample_rate_hz // g
    if len(w) == 0:
        return Waveform(np.zeros(0), target_rate_hz)
    taps = _resample_filter(up, down)
    out = resample_poly(w.samples, up, down, window=taps)
    return Waveform(out, target_rate_hz)


def _resample_filter(up: int, down: int) -> np.ndarray:
    phases = max(up, down)
    # Cutoff relative to the Nyquist of the upsampled stream.
    cutoff = 2.0 * RESAMPLE_CUTOFF_FRACTION / phases
    return firwin(RESAMPLE_TAPS_PER_PHASE * phases + 1, cutoff, window=("kaiser", RESAMPLE_KAISER_BETA))


# ---------------------------------------------------------------------------
# Transforms and framing
# ---------------------------------------------------------------------------


def dft(frame) -> np.ndarray:
    """Direct O(N^2) DFT, X(k) = sum_n x(n) exp(-j 2 pi k n / N).

    Phase indices are reduced modulo N in integer arithmetic before the
    exponential, which keeps large-N results accurate to ~1e-12.
    """
    x = np.asarray(frame)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError("dft expects a non-empty 1-D frame")
    n = x.shape[0]
    idx = np.arange(n)
    phase = np.outer(idx, idx) % n
    return np.exp(-2j * np.pi * phase / n) @ x


def idft(spectrum) -> np.ndarray:
    X = np.asarray(spectrum, dtype=np.complex128)
    n = X.shape[0]
    idx = np.arange(n)
    phase = np.outer(idx, idx) % n
    return (np.exp(2j * np.pi * phase / n) @ X) / n


def window(kind: str, n: int) -> np.ndarray:
    """Symmetric analysis window of length n."""
    if kind not in WINDOW_KINDS:
        raise ValueError(f"unknown window kind {kind!r}")
    if kind == "rectangular" or n == 1:
        return np.ones(n)
    t = 2.0 * np.pi * np.arange(n) / (n - 1)
    if kind == "hann":
        return 0.5 * (1.0 - np.cos(t))
    a0, a1, a2, a3 = 0.35875, 0.48829, 0.14128, 0.01168
    return a0 - a1 * np.cos(t) + a2 * np.cos(2 * t) - a3 * np.cos(3 * t)


def window_at(kind: str, u) -> np.ndarray:
    """Continuous window on u in [-1/2, 1/2], zero outside (used for real-length atoms)."""
    u = np.asarray(u, dtype=np.float64)
    inside = np.abs(u) <= 0.5
    t = 2.0 * np.pi * (u + 0.5)
    if kind == "rectangular":
        vals = np.ones_like(u)
    elif kind == "hann":
        vals = 0.5 * (1.0 - np.cos(t))
    elif kind == "blackman-harris":
        vals = 0.35875 - 0.48829 * np.cos(t) + 0.14128 * np.cos(2 * t) - 0.01168 * np.cos(3 * t)
    else:
        raise ValueError(f"unknown window kind {kind!r}")
    return np.where(inside, vals, 0.0)


def frame_signal(w: Waveform, plan: FramePlan) -> np.ndarray:
    """Return an (L, N) array of windowed frames; trailing partial frames are dropped."""
    x = w.samples if isinstance(w, Waveform) else np.asarray(w, dtype=np.float64)
    n_frames = plan.frame_count(x.shape[0])
    if n_frames == 0:
        raise EmptyFramesError(
            f"signal of {x.shape[0]} samples is shorter than one {plan.frame_len_samples}-sample frame"
        )
    starts = np.arange(n_frames) * plan.hop_samples
    idx = starts[:, None] + np.arange(plan.frame_len_samples)[None, :]
    return x[idx] * window(plan.window_kind, plan.frame_len_samples)[None, :]

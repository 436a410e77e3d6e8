"""Gammatone filterbank cochleogram."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from rsl.audio import WINDOW_KINDS, FramePlan, Waveform, frame_signal, window
from rsl.features.spectral import TFMatrix


def erb(fc_hz):
    """Equivalent rectangular bandwidth in Hz: 24.7 (4.37 fc / 1000 + 1)."""
    return 24.7 * (4.37 * np.asarray(fc_hz, dtype=np.float64) / 1000.0 + 1.0)


def gammatone_bandwidth(fc_hz):
    """Decay coefficient b(fc) = 1.019 ERB(fc)."""
    return 1.019 * erb(fc_hz)


def erb_number(f_hz):
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(f_hz, dtype=np.float64))


def erb_number_to_hz(e):
    return (np.power(10.0, np.asarray(e, dtype=np.float64) / 21.4) - 1.0) / 0.00437


CHANNEL_GAINS = ("centre", "peak")


@dataclass(frozen=True)
class CochleaConfig:
    n_filters: int = 64
    fc_min_hz: float = 100.0
    fc_max_hz: float | None = None
    order: int = 4
    frame_len_s: float = 0.084
    hop_s: float = 0.042
    window_kind: str = "hann"
    max_ir_s: float = 0.128
    ir_floor: float = 1e-5
    channel_gain: str = "centre"

    def __post_init__(self):
        if self.n_filters < 1:
            raise ValueError("n_filters must be >= 1")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.fc_min_hz <= 0:
            raise ValueError("fc_min_hz must be positive")
        if self.fc_max_hz is not None and not self.fc_min_hz < self.fc_max_hz:
            raise ValueError("need fc_min_hz < fc_max_hz")
        if self.window_kind not in WINDOW_KINDS:
            raise ValueError(f"unknown window kind {self.window_kind!r}")
        if self.channel_gain not in CHANNEL_GAINS:
            raise ValueError(f"channel_gain must be one of {CHANNEL_GAINS}")

    def centre_frequencies(self, sample_rate_hz: int) -> np.ndarray:
        """K centres evenly spaced in ERB number over [fc_min, fc_max).

        The upper end is excluded so the default fc_max = fs/2 never places a
        channel on the Nyquist frequency.
        """
        fc_max = sample_rate_hz / 2 if self.fc_max_hz is None else self.fc_max_hz
        if not self.fc_min_hz < fc_max:
            raise ValueError("need fc_min_hz < fc_max_hz")
        lo, hi = erb_number(self.fc_min_hz), erb_number(fc_max)
        return erb_number_to_hz(lo + (hi - lo) * np.arange(self.n_filters) / self.n_filters)

    def frame_plan(self, sample_rate_hz: int) -> FramePlan:
        return FramePlan(
            int(round(self.frame_len_s * sample_rate_hz)),
            int(round(self.hop_s * sample_rate_hz)),
            self.window_kind,
        )


def gammatone_impulse_response(fc_hz: float, cfg: CochleaConfig, duration_s: float, sample_rate_hz: int) -> np.ndarray:
    """g(t) = t^(o-1) exp(-2 pi b(fc) t) cos(2 pi fc t) at t = n / fs, scaled so max |g| = 1."""
    if fc_hz <= 0:
        raise ValueError("fc_hz must be positive")
    if fc_hz >= sample_rate_hz / 2:
        raise ValueError(f"fc_hz {fc_hz} must be below Nyquist {sample_rate_hz / 2}")
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    n = max(1, int(round(duration_s * sample_rate_hz)))
    t = np.arange(n) / sample_rate_hz
    g = t ** (cfg.order - 1) * np.exp(-2 * np.pi * gammatone_bandwidth(fc_hz) * t) * np.cos(2 * np.pi * fc_hz * t)
    peak = np.abs(g).max()
    return g / peak if peak > 0 else g


def impulse_response_duration(fc_hz: float, cfg: CochleaConfig, sample_rate_hz: int) -> float:
    """Truncation length: max_ir_s, or earlier once the envelope decays below ir_floor of its peak."""
    n_max = max(1, int(round(cfg.max_ir_s * sample_rate_hz)))
    t = np.arange(1, n_max + 1) / sample_rate_hz
    # Log-envelope avoids underflow for fast-decaying low-order filters.
    log_env = (cfg.order - 1) * np.log(t) - 2 * np.pi * gammatone_bandwidth(fc_hz) * t
    peak_idx = int(np.argmax(log_env))
    below = np.nonzero(log_env[peak_idx:] < log_env[peak_idx] + np.log(cfg.ir_floor))[0]
    if below.size == 0:
        return n_max / sample_rate_hz
    return (peak_idx + below[0] + 1) / sample_rate_hz


def centre_gain(g: np.ndarray, fc_hz: float, sample_rate_hz: int) -> float:
    """|G(fc)| of a sampled impulse response."""
    n = np.arange(g.shape[0])
    return float(np.abs(np.sum(g * np.exp(-2j * np.pi * fc_hz * n / sample_rate_hz))))


def gammatone_filterbank(cfg: CochleaConfig, sample_rate_hz: int) -> list[np.ndarray]:
    """Truncated, peak-normalised impulse responses, one per channel.

    With ``channel_gain="centre"`` each response is further scaled to unit gain
    at its own centre frequency. Sampled peaks jitter by tens of percent near
    Nyquist, which is enough to let a neighbouring channel win on a pure tone.
    """
    bank = []
    for fc in cfg.centre_frequencies(sample_rate_hz):
        g = gammatone_impulse_response(fc, cfg, impulse_response_duration(fc, cfg, sample_rate_hz), sample_rate_hz)
        if cfg.channel_gain == "centre":
            g = g / centre_gain(g, fc, sample_rate_hz)
        bank.append(g)
    return bank


def gammatone_filter(w: Waveform, cfg: CochleaConfig) -> np.ndarray:
    """Causal FIR filtering by each channel; returns K x len(w)."""
    x = w.samples
    bank = gammatone_filterbank(cfg, w.sample_rate_hz)
    return np.stack([fftconvolve(x, g)[: x.shape[0]] for g in bank])


def cochleogram(w: Waveform, cfg: CochleaConfig | None = None) -> TFMatrix:
    """C(k, m) = sum_n |x_k(mJ + n)| w(n) over each analysis frame."""
    cfg = cfg or CochleaConfig()
    plan = cfg.frame_plan(w.sample_rate_hz)
    filtered = np.abs(gammatone_filter(w, cfg))
    rect = FramePlan(plan.frame_len_samples, plan.hop_samples, "rectangular")
    win = window(plan.window_kind, plan.frame_len_samples)
    values = np.stack([frame_signal(row, rect) @ win for row in filtered])
    return TFMatrix(values, cfg.centre_frequencies(w.sample_rate_hz), plan.hop_samples / w.sample_rate_hz, "cochleogram")

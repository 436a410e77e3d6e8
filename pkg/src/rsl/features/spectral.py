"""TFMatrix container, STFT magnitude spectrogram, and the mel/MFCC front end."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from rsl.audio import FramePlan, Waveform, frame_signal

TF_KINDS = ("stft", "mel", "mfcc", "cqt", "cochleogram")

LOG_ENERGY_FLOOR = 1e-10


class DegenerateFilterbankError(ValueError):
    """Adjacent mel filters collapse onto the same FFT bin."""


@dataclass(frozen=True)
class TFMatrix:
    """K x L time-frequency grid; rows follow ``freq_axis_hz`` from low to high."""

    values: np.ndarray
    freq_axis_hz: np.ndarray
    frame_hop_s: float
    kind: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        freqs = np.asarray(self.freq_axis_hz, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {values.shape}")
        if self.kind not in TF_KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if freqs.shape != (values.shape[0],):
            raise ValueError(f"freq_axis_hz has {freqs.shape} entries for {values.shape[0]} rows")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if self.kind != "mfcc" and values.size and values.min() < 0:
            raise ValueError(f"{self.kind} values must be nonnegative")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "freq_axis_hz", freqs)
        object.__setattr__(self, "frame_hop_s", float(self.frame_hop_s))

    @property
    def shape(self):
        return self.values.shape


def stft(w: Waveform, plan: FramePlan) -> TFMatrix:
    """Magnitude STFT, rows k = 0..N/2 (phase discarded)."""
    frames = frame_signal(w, plan)
    mag = np.abs(np.fft.rfft(frames, axis=1)).T
    n = plan.frame_len_samples
    freqs = np.arange(mag.shape[0]) * w.sample_rate_hz / n
    return TFMatrix(mag, freqs, plan.hop_samples / w.sample_rate_hz, "stft")


# ---------------------------------------------------------------------------
# Mel scale / MFCC
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MelConfig:
    n_filters: int = 64
    n_coeffs: int = 64
    fmin_hz: float = 0.0
    fmax_hz: float | None = None
    plan: FramePlan = field(default_factory=lambda: FramePlan(256, 128, "hann"))

    def __post_init__(self):
        if not 0 < self.n_coeffs <= self.n_filters:
            raise ValueError("need 0 < n_coeffs <= n_filters")
        if self.fmin_hz < 0:
            raise ValueError("fmin_hz must be nonnegative")
        if self.fmax_hz is not None and not self.fmin_hz < self.fmax_hz:
            raise ValueError("need fmin_hz < fmax_hz")

    def upper_hz(self, sample_rate_hz: int) -> float:
        fmax = sample_rate_hz / 2 if self.fmax_hz is None else self.fmax_hz
        if fmax > sample_rate_hz / 2:
            raise ValueError(f"fmax_hz {fmax} exceeds Nyquist {sample_rate_hz / 2}")
        if not self.fmin_hz < fmax:
            raise ValueError("need fmin_hz < fmax_hz")
        return fmax


def mel_scale(f_hz):
    """Mel(f) = 1127 ln(1 + f/700). Accepts scalars or arrays."""
    f = np.asarray(f_hz, dtype=np.float64)
    if np.any(f < 0):
        raise ValueError("frequency must be nonnegative")
    out = 1127.0 * np.log1p(f / 700.0)
    return float(out) if out.ndim == 0 else out


def mel_to_hz(mel):
    m = np.asarray(mel, dtype=np.float64)
    out = 700.0 * np.expm1(m / 1127.0)
    return float(out) if out.ndim == 0 else out


def mel_edge_frequencies(cfg: MelConfig, sample_rate_hz: int) -> np.ndarray:
    """M + 2 frequencies uniformly spaced in mel; entries 1..M are the filter peaks."""
    lo = mel_scale(cfg.fmin_hz)
    hi = mel_scale(cfg.upper_hz(sample_rate_hz))
    return mel_to_hz(np.linspace(lo, hi, cfg.n_filters + 2))


def mel_filterbank(cfg: MelConfig, n_fft_bins: int, sample_rate_hz: int) -> np.ndarray:
    """M x K triangular weights over the K = N/2 + 1 one-sided FFT bins.

    Edge frequencies are snapped to their nearest bin so each filter peaks at
    exactly 1.0 on its centre bin and reaches 0.0 on its neighbours' centres.
    """
    if n_fft_bins < 2:
        raise DegenerateFilterbankError("need at least two FFT bins")
    bin_hz = sample_rate_hz / (2.0 * (n_fft_bins - 1))
    edges = np.round(mel_edge_frequencies(cfg, sample_rate_hz) / bin_hz).astype(int)
    if np.any(np.diff(edges) <= 0):
        raise DegenerateFilterbankError(
            f"{n_fft_bins} bins cannot separate {cfg.n_filters} mel filters "
            f"({bin_hz:.2f} Hz per bin); use a longer frame or fewer filters"
        )
    k = np.arange(n_fft_bins)
    bank = np.zeros((cfg.n_filters, n_fft_bins))
    for m in range(cfg.n_filters):
        left, centre, right = edges[m], edges[m + 1], edges[m + 2]
        rising = (k >= left) & (k <= centre)
        falling = (k > centre) & (k <= right)
        bank[m, rising] = (k[rising] - left) / (centre - left)
        bank[m, falling] = (right - k[falling]) / (right - centre)
    return bank


def mel_cepstrum(log_energies, n_coeffs: int) -> np.ndarray:
    """DCT-II with a uniform sqrt(2/M) scale (no special case for n = 0).

    ``log_energies`` has M values along its last axis; returns ``n_coeffs`` values.
    """
    s = np.asarray(log_energies, dtype=np.float64)
    m_count = s.shape[-1]
    n = np.arange(n_coeffs)[:, None]
    m = np.arange(m_count)[None, :]
    basis = np.sqrt(2.0 / m_count) * np.cos(np.pi * n / m_count * (m + 0.5))
    return s @ basis.T


def _filter_energies(w: Waveform, cfg: MelConfig) -> tuple[np.ndarray, TFMatrix]:
    spec = stft(w, cfg.plan)
    bank = mel_filterbank(cfg, spec.shape[0], w.sample_rate_hz)
    return bank @ (spec.values**2), spec


def mel_spectrogram(w: Waveform, cfg: MelConfig | None = None) -> TFMatrix:
    """Mel filterbank energies (power), M x L."""
    cfg = cfg or MelConfig()
    energies, spec = _filter_energies(w, cfg)
    centres = mel_edge_frequencies(cfg, w.sample_rate_hz)[1:-1]
    return TFMatrix(energies, centres, spec.frame_hop_s, "mel")


def mfcc(w: Waveform, cfg: MelConfig | None = None) -> TFMatrix:
    """MFCCs, n_coeffs x L. Row axis carries the coefficient index, not Hz."""
    cfg = cfg or MelConfig()
    energies, spec = _filter_energies(w, cfg)
    log_e = np.log(energies + LOG_ENERGY_FLOOR)
    coeffs = mel_cepstrum(log_e.T, cfg.n_coeffs).T
    return TFMatrix(coeffs, np.arange(cfg.n_coeffs, dtype=np.float64), spec.frame_hop_s, "mfcc")

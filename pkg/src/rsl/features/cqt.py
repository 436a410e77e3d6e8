"""Constant-Q transform by direct atom correlation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from rsl.audio import WINDOW_KINDS, Waveform, window_at
from rsl.features.spectral import TFMatrix


class AtomTooLongError(ValueError):
    """The lowest-frequency atom is longer than the signal."""


@dataclass(frozen=True)
class CQTConfig:
    f1_hz: float = 100.0
    bins_per_octave: int = 12
    n_bins: int = 52
    window_kind: str = "hann"
    hop_samples: int = 128

    def __post_init__(self):
        if self.f1_hz <= 0:
            raise ValueError("f1_hz must be positive")
        if self.bins_per_octave < 1 or self.n_bins < 1:
            raise ValueError("bins_per_octave and n_bins must be >= 1")
        if self.window_kind not in WINDOW_KINDS:
            raise ValueError(f"unknown window kind {self.window_kind!r}")
        if self.hop_samples < 1:
            raise ValueError("hop_samples must be >= 1")

    @property
    def q_factor(self) -> float:
        """Bin spacing equals bandwidth: Q = 1 / (2^(1/b) - 1)."""
        return 1.0 / (2.0 ** (1.0 / self.bins_per_octave) - 1.0)

    def check_rate(self, sample_rate_hz: int) -> None:
        top = self.centre_frequencies()[-1]
        if top > sample_rate_hz / 2:
            raise ValueError(f"top CQT bin {top:.1f} Hz exceeds Nyquist {sample_rate_hz / 2} Hz")

    def centre_frequencies(self) -> np.ndarray:
        """f_k = f1 * 2^(k/b); the octave factor is applied separately so f[k+b] == 2 f[k] exactly."""
        k = np.arange(self.n_bins)
        octave, step = np.divmod(k, self.bins_per_octave)
        return self.f1_hz * np.exp2(octave.astype(np.float64)) * np.exp2(step / self.bins_per_octave)

    def atom_lengths(self, sample_rate_hz: int) -> np.ndarray:
        """Real-valued N_k = Q fs / f_k."""
        return self.q_factor * sample_rate_hz / self.centre_frequencies()


def cqt_atoms(cfg: CQTConfig, sample_rate_hz: int) -> list[np.ndarray]:
    """Atoms a_k(n) = w(n/N_k) exp(-i 2 pi n f_k / fs) / N_k for integer |n| <= N_k/2, centred."""
    atoms = []
    for fk, nk in zip(cfg.centre_frequencies(), cfg.atom_lengths(sample_rate_hz)):
        half = int(np.floor(nk / 2))
        n = np.arange(-half, half + 1)
        atoms.append(window_at(cfg.window_kind, n / nk) * np.exp(-2j * np.pi * n * fk / sample_rate_hz) / nk)
    return atoms


def cqt(w: Waveform, cfg: CQTConfig | None = None) -> TFMatrix:
    """|X(k, n_m)| with atoms centred on n_m = m * hop; samples outside the signal count as zero."""
    cfg = cfg or CQTConfig()
    cfg.check_rate(w.sample_rate_hz)
    x = w.samples
    atoms = cqt_atoms(cfg, w.sample_rate_hz)
    if atoms[0].shape[0] > x.shape[0]:
        raise AtomTooLongError(
            f"lowest atom spans {atoms[0].shape[0]} samples but the signal has {x.shape[0]}"
        )
    centres = np.arange(0, x.shape[0], cfg.hop_samples)
    out = np.empty((cfg.n_bins, centres.shape[0]))
    for k, atom in enumerate(atoms):
        half = atom.shape[0] // 2
        # Correlation with conj(atom), expressed as convolution with the reversed conjugate.
        full = fftconvolve(x, np.conj(atom)[::-1])
        out[k] = np.abs(full[centres + half])
    return TFMatrix(out, cfg.centre_frequencies(), cfg.hop_samples / w.sample_rate_hz, "cqt")

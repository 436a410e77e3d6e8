"""Synthetic ICBHI-shaped corpora: tone-burst wheezes, noise-burst crackles and quiet normal cycles."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from rsl._io import atomic_write_text
from rsl.audio import write_wav
from rsl.icbhi import CycleAnnotation, serialize_annotations

CLASS_FLAGS = {"normal": (False, False), "crackle": (True, False), "wheeze": (False, True), "both": (True, True)}


@dataclass(frozen=True)
class SynthSpec:
    n_patients: int = 20
    cycles_per_patient: int = 10
    classes: tuple = ("normal", "crackle", "wheeze")
    sample_rate_hz: int = 4000
    min_cycle_s: float = 2.0
    max_cycle_s: float = 5.0
    noise_level: float = 0.01
    seed: int = 0

    def __post_init__(self):
        unknown = set(self.classes) - set(CLASS_FLAGS)
        if unknown:
            raise ValueError(f"unknown classes {sorted(unknown)}")
        if not 0 < self.min_cycle_s <= self.max_cycle_s:
            raise ValueError("need 0 < min_cycle_s <= max_cycle_s")


def _taper(n: int) -> np.ndarray:
    return np.hanning(n) if n > 2 else np.ones(n)


def tone_burst(n: int, rate: int, rng) -> np.ndarray:
    """One or two tapered sinusoidal bursts between 200 and 800 Hz."""
    out = np.zeros(n)
    for _ in range(rng.integers(1, 3)):
        length = min(n, int(rng.uniform(0.3, 1.0) * rate))
        start = rng.integers(0, n - length + 1)
        f = rng.uniform(200.0, 800.0)
        t = np.arange(length) / rate
        out[start : start + length] += 0.3 * np.sin(2 * np.pi * f * t + rng.uniform(0, 2 * np.pi)) * _taper(length)
    return out


def noise_bursts(n: int, rate: int, rng) -> np.ndarray:
    """Five to fifteen 5-15 ms white-noise clicks."""
    out = np.zeros(n)
    for _ in range(rng.integers(5, 16)):
        length = min(n, max(2, int(rng.uniform(0.005, 0.015) * rate)))
        start = rng.integers(0, n - length + 1)
        out[start : start + length] += 0.5 * rng.standard_normal(length) * _taper(length)
    return out


def synth_cycle(kind: str, n: int, rate: int, rng, noise_level: float = 0.01) -> np.ndarray:
    crackle, wheeze = CLASS_FLAGS[kind]
    x = noise_level * rng.standard_normal(n)
    if wheeze:
        x += tone_burst(n, rate, rng)
    if crackle:
        x += noise_bursts(n, rate, rng)
    return np.clip(x, -1.0, 1.0 - 1.0 / 32768)


def write_synthetic_corpus(out_dir, spec: SynthSpec = SynthSpec()) -> list[Path]:
    """One recording per patient, cycles back to back with labels cycling through ``spec.classes``.

    Returns the written ``.wav`` paths. Patient ids start at 101 as in ICBHI.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    rate = spec.sample_rate_hz
    paths = []
    k = 0
    for p in range(spec.n_patients):
        rec_id = f"{101 + p}_1b1_Al_sc_Synth"
        pieces, anns, t0 = [], [], 0
        for _ in range(spec.cycles_per_patient):
            kind = spec.classes[k % len(spec.classes)]
            k += 1
            n = int(rng.uniform(spec.min_cycle_s, spec.max_cycle_s) * rate)
            pieces.append(synth_cycle(kind, n, rate, rng, spec.noise_level))
            crackle, wheeze = CLASS_FLAGS[kind]
            anns.append(CycleAnnotation(t0 / rate, (t0 + n) / rate, crackle, wheeze))
            t0 += n
        wav = out / f"{rec_id}.wav"
        write_wav(wav, np.concatenate(pieces), rate)
        atomic_write_text(out / f"{rec_id}.txt", serialize_annotations(anns))
        paths.append(wav)
    return paths

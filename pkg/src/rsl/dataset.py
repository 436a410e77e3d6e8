"""Corpus to classifier inputs: decode, resample, cut cycles, extract features, condition and resize."""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path

import numpy as np

from rsl.audio import read_wav, resample
from rsl.features import condition, extract, load_tfm, quantize_f32, resize_to_grid, save_tfm
from rsl.icbhi import PROTOCOL_RATE_HZ, Task, assign_label, extract_and_fix_cycles, scan_corpus

log = logging.getLogger(__name__)

GRID_ROWS = 64
GRID_COLS = 144


def load_cycles(corpus_dir) -> list:
    """Every annotated cycle in the corpus, resampled to the protocol rate and fixed to 6 s."""
    cycles = []
    for rec in scan_corpus(corpus_dir):
        w = resample(read_wav(rec.wav_path), PROTOCOL_RATE_HZ)
        cycles.extend(extract_and_fix_cycles(w, rec.annotations, rec.patient_id, rec.recording_id))
    return cycles


def cache_name(cycle, representation: str) -> str:
    return f"{cycle.recording_id}_{cycle.cycle_index:03d}_{representation}.tfm"


def raw_features(cycle, representation: str, cache_dir=None):
    """float32-rounded TF matrix, read from ``cache_dir`` when a cached copy exists."""
    if cache_dir is not None:
        path = Path(cache_dir) / cache_name(cycle, representation)
        if path.exists():
            return load_tfm(path)
    return quantize_f32(extract(representation, cycle.audio))


def write_feature_cache(cycles, representation: str, cache_dir) -> list[Path]:
    out = []
    for c in cycles:
        out.append(save_tfm(quantize_f32(extract(representation, c.audio)), Path(cache_dir) / cache_name(c, representation)))
    return out


def classifier_grid(tf, rows: int = GRID_ROWS, cols: int = GRID_COLS) -> np.ndarray:
    return resize_to_grid(condition(tf), rows, cols).values


def build_dataset(cycles, representation: str, task, cache_dir=None, rows: int = GRID_ROWS, cols: int = GRID_COLS):
    """(inputs (N, rows, cols), labels (N,), patient ids) for one representation and task."""
    task = Task(task)
    grids = np.empty((len(cycles), rows, cols))
    for i, c in enumerate(cycles):
        grids[i] = classifier_grid(raw_features(c, representation, cache_dir), rows, cols)
    labels = np.array([assign_label(c, task).value for c in cycles], dtype=int)
    return grids, labels, [c.patient_id for c in cycles]


def corpus_hash(corpus_dir) -> dict:
    """SHA-256 of every .wav and .txt file, keyed by file name."""
    root = Path(corpus_dir)
    digests = {}
    for path in sorted(list(root.glob("*.wav")) + list(root.glob("*.txt"))):
        digests[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    return digests

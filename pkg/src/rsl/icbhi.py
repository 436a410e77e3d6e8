"""ICBHI protocol: annotation files, fixed-length cycles, task labels, patient folds."""

from __future__ import annotations

import csv
import logging
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from rsl.audio import Waveform
from rsl.errors import DataError

log = logging.getLogger(__name__)

PROTOCOL_RATE_HZ = 4000
CYCLE_SECONDS = 6
CYCLE_SAMPLES = PROTOCOL_RATE_HZ * CYCLE_SECONDS

FOUR_CLASS_NAMES = ("normal", "crackle", "wheeze", "both")

MANIFEST_COLUMNS = ("recording_id", "patient_id", "cycle_index", "start_s", "end_s", "crackle", "wheeze", "fold")


class Task(str, Enum):
    WHEEZE = "wheeze-binary"
    CRACKLE = "crackle-binary"
    FOUR_CLASS = "four-class"

    @property
    def n_classes(self) -> int:
        return 4 if self is Task.FOUR_CLASS else 2


class AnnotationParseError(DataError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class CycleAnnotation:
    start_s: float
    end_s: float
    crackle: bool
    wheeze: bool

    def __post_init__(self):
        if not 0 <= self.start_s < self.end_s:
            raise ValueError(f"need 0 <= start < end, got [{self.start_s}, {self.end_s})")


@dataclass(frozen=True)
class RespiratoryCycle:
    patient_id: str
    recording_id: str
    audio: Waveform
    crackle: bool
    wheeze: bool
    cycle_index: int = 0

    def __post_init__(self):
        if self.audio.sample_rate_hz != PROTOCOL_RATE_HZ or len(self.audio) != CYCLE_SAMPLES:
            raise ValueError(
                f"cycle must be {CYCLE_SAMPLES} samples at {PROTOCOL_RATE_HZ} Hz, "
                f"got {len(self.audio)} at {self.audio.sample_rate_hz}"
            )


@dataclass(frozen=True)
class Label:
    task: Task
    value: int

    def __post_init__(self):
        if not 0 <= self.value < Task(self.task).n_classes:
            raise ValueError(f"label {self.value} out of range for {self.task}")


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: dict = field(hash=False)
    seed: int

    def fold_of(self, patient_id: str) -> int:
        return self.assignment[patient_id]

    def patients_in(self, fold: int) -> list[str]:
        return sorted(p for p, f in self.assignment.items() if f == fold)


# ---------------------------------------------------------------------------
# Annotations
# ---------------------------------------------------------------------------


def _parse_flag(token: str, line: int, name: str) -> bool:
    if token not in ("0", "1"):
        raise AnnotationParseError(f"{name} flag must be 0 or 1, got {token!r}", line)
    return token == "1"


def parse_annotations(text: str) -> list[CycleAnnotation]:
    """Parse ``start<TAB>end<TAB>crackle<TAB>wheeze`` lines; blank lines are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            # Some redistributions use spaces; accept any whitespace as a fallback.
            fields = line.split()
        if len(fields) != 4:
            raise AnnotationParseError(f"expected 4 fields, got {len(fields)}", lineno)
        try:
            start, end = float(fields[0]), float(fields[1])
        except ValueError:
            raise AnnotationParseError(f"non-numeric time in {line!r}", lineno) from None
        if not (math.isfinite(start) and math.isfinite(end)):
            raise AnnotationParseError("times must be finite", lineno)
        if start < 0:
            raise AnnotationParseError(f"negative start {start}", lineno)
        if end <= start:
            raise AnnotationParseError(f"end {end} <= start {start}", lineno)
        out.append(
            CycleAnnotation(start, end, _parse_flag(fields[2], lineno, "crackle"), _parse_flag(fields[3], lineno, "wheeze"))
        )
    return out


def serialize_annotations(anns) -> str:
    return "".join(f"{a.start_s!r}\t{a.end_s!r}\t{int(a.crackle)}\t{int(a.wheeze)}\n" for a in anns)


def patient_id_from_recording(recording_id: str) -> str:
    """ICBHI file names start with the patient number, e.g. ``101_1b1_Al_sc_Meditron``."""
    return Path(recording_id).stem.split("_", 1)[0]


# ---------------------------------------------------------------------------
# Cycles and labels
# ---------------------------------------------------------------------------


def fix_length(samples: np.ndarray, n: int = CYCLE_SAMPLES) -> np.ndarray:
    """Zero-pad symmetrically (odd remainder at the end) or centre-crop to n samples."""
    m = samples.shape[0]
    if m == n:
        return samples.copy()
    if m < n:
        left = (n - m) // 2
        out = np.zeros(n)
        out[left : left + m] = samples
        return out
    start = (m - n) // 2
    return samples[start : start + n].copy()


def extract_and_fix_cycles(w: Waveform, anns, patient_id: str, recording_id: str) -> list[RespiratoryCycle]:
    if w.sample_rate_hz != PROTOCOL_RATE_HZ:
        raise ValueError(f"resample to {PROTOCOL_RATE_HZ} Hz first (got {w.sample_rate_hz})")
    n_total = len(w)
    cycles = []
    for idx, ann in enumerate(anns):
        start = int(round(ann.start_s * PROTOCOL_RATE_HZ))
        end = int(round(ann.end_s * PROTOCOL_RATE_HZ))
        if end > n_total:
            warnings.warn(
                f"{recording_id} cycle {idx}: end {ann.end_s:.3f}s beyond audio ({n_total / PROTOCOL_RATE_HZ:.3f}s), clamped",
                stacklevel=2,
            )
            end = n_total
        if start >= end:
            warnings.warn(f"{recording_id} cycle {idx}: no audio left after clamping, skipped", stacklevel=2)
            continue
        audio = Waveform(fix_length(w.samples[start:end]), PROTOCOL_RATE_HZ)
        cycles.append(RespiratoryCycle(patient_id, recording_id, audio, ann.crackle, ann.wheeze, idx))
    return cycles


def four_class_index(crackle: bool, wheeze: bool) -> int:
    return int(bool(crackle)) + 2 * int(bool(wheeze))


def assign_label(cycle, task) -> Label:
    """``cycle`` may be anything with boolean ``crackle`` and ``wheeze`` attributes."""
    task = Task(task)
    if task is Task.WHEEZE:
        value = int(bool(cycle.wheeze))
    elif task is Task.CRACKLE:
        value = int(bool(cycle.crackle))
    else:
        value = four_class_index(cycle.crackle, cycle.wheeze)
    return Label(task, value)


def binary_from_four_class(value: int, task) -> int:
    task = Task(task)
    if task is Task.WHEEZE:
        return int(value in (2, 3))
    if task is Task.CRACKLE:
        return int(value in (1, 3))
    return value


def class_histogram(cycles) -> dict[str, int]:
    counts = Counter(FOUR_CLASS_NAMES[four_class_index(c.crackle, c.wheeze)] for c in cycles)
    hist = {name: counts.get(name, 0) for name in FOUR_CLASS_NAMES}
    hist["total"] = sum(hist.values())
    return hist


# ---------------------------------------------------------------------------
# Folds
# ---------------------------------------------------------------------------


def patient_folds(patient_ids, k: int = 10, seed: int = 0) -> FoldPlan:
    """Shuffle distinct patients with a seeded RNG and deal them round-robin into k folds."""
    patients = sorted(set(patient_ids))
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(patients) < k:
        raise ValueError(f"{len(patients)} patients cannot fill {k} folds")
    order = np.random.default_rng(seed).permutation(len(patients))
    assignment = {patients[j]: i % k for i, j in enumerate(order)}
    return FoldPlan(k, assignment, seed)


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Recording:
    recording_id: str
    patient_id: str
    wav_path: Path
    annotation_path: Path
    annotations: tuple


def scan_corpus(corpus_dir) -> list[Recording]:
    """Find paired ``<name>.wav`` / ``<name>.txt`` files; unpaired files are ignored with a log line."""
    root = Path(corpus_dir)
    if not root.is_dir():
        raise DataError(f"corpus directory {root} does not exist")
    recordings = []
    for txt in sorted(root.glob("*.txt")):
        wav = txt.with_suffix(".wav")
        if not wav.exists():
            log.info("skipping %s: no matching .wav", txt.name)
            continue
        try:
            anns = tuple(parse_annotations(txt.read_text()))
        except AnnotationParseError as exc:
            raise AnnotationParseError(f"{txt.name}: {exc}", exc.line) from None
        recordings.append(Recording(txt.stem, patient_id_from_recording(txt.stem), wav, txt, anns))
    if not recordings:
        raise DataError(f"no paired .wav/.txt recordings in {root}")
    return recordings


def manifest_rows(recordings, plan: FoldPlan | None = None) -> list[dict]:
    rows = []
    for rec in recordings:
        for idx, ann in enumerate(rec.annotations):
            rows.append(
                {
                    "recording_id": rec.recording_id,
                    "patient_id": rec.patient_id,
                    "cycle_index": idx,
                    "start_s": repr(ann.start_s),
                    "end_s": repr(ann.end_s),
                    "crackle": int(ann.crackle),
                    "wheeze": int(ann.wheeze),
                    "fold": "" if plan is None else plan.fold_of(rec.patient_id),
                }
            )
    return rows


def write_manifest(rows, fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=MANIFEST_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)

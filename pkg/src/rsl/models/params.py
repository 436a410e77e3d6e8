"""Parameter containers, seeded initialisation and the RSLM checkpoint format."""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from rsl._io import atomic_write
from rsl.errors import DataError

_MAGIC = b"RSLM"


@dataclass
class ModelParams:
    """Named float64 arrays plus the config that produced them."""

    kind: str
    config: object
    tensors: dict = field(default_factory=dict)
    seed: int | None = None

    def manifest(self) -> dict:
        return {name: tuple(arr.shape) for name, arr in self.tensors.items()}

    def copy(self) -> "ModelParams":
        return ModelParams(self.kind, self.config, {k: v.copy() for k, v in self.tensors.items()}, self.seed)

    def __getitem__(self, name):
        return self.tensors[name]

    def __setitem__(self, name, value):
        self.tensors[name] = value

    def count(self) -> int:
        return int(sum(a.size for a in self.tensors.values()))


def xavier_bound(shape) -> float:
    """Glorot-uniform bound sqrt(6 / (fan_in + fan_out)); conv kernels count the receptive field."""
    if len(shape) == 2:
        fan_in, fan_out = shape
    elif len(shape) == 4:
        receptive = shape[2] * shape[3]
        fan_in, fan_out = shape[1] * receptive, shape[0] * receptive
    else:
        raise ValueError(f"no fan definition for shape {shape}")
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def draw(layout, seed: int) -> dict:
    """Materialise ``[(name, shape, rule), ...]`` in order from one seeded generator.

    rules: "xavier", "zero", "one", "pos" (normal with std 0.02).
    """
    rng = np.random.default_rng(seed)
    out = {}
    for name, shape, rule in layout:
        if rule == "xavier":
            bound = xavier_bound(shape)
            out[name] = rng.uniform(-bound, bound, size=shape)
        elif rule == "pos":
            out[name] = rng.normal(0.0, 0.02, size=shape)
        elif rule == "zero":
            out[name] = np.zeros(shape)
        elif rule == "one":
            out[name] = np.ones(shape)
        else:
            raise ValueError(f"unknown init rule {rule!r}")
    return out


def save_checkpoint(params: ModelParams, path) -> None:
    """Binary tensor container plus a ``.json`` sidecar with kind, config and seed."""
    chunks = [_MAGIC, struct.pack("<I", len(params.tensors))]
    for name, arr in params.tensors.items():
        raw = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(raw)) + raw)
        chunks.append(struct.pack("<I", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    path = Path(path)
    atomic_write(path, b"".join(chunks))
    sidecar = {"kind": params.kind, "config": asdict(params.config), "seed": params.seed}
    atomic_write(path.with_suffix(path.suffix + ".json"), (json.dumps(sidecar, indent=2, sort_keys=True) + "\n").encode())


def load_checkpoint(path) -> ModelParams:
    from rsl.models import config_from_dict

    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != _MAGIC:
        raise DataError(f"{path}: not an RSLM checkpoint")
    (count,) = struct.unpack_from("<I", blob, 4)
    pos = 8
    tensors = {}
    for _ in range(count):
        (nlen,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        name = blob[pos : pos + nlen].decode("utf-8")
        pos += nlen
        (rank,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        shape = struct.unpack_from(f"<{rank}I", blob, pos)
        pos += 4 * rank
        n = int(np.prod(shape)) if rank else 1
        tensors[name] = np.frombuffer(blob, dtype="<f4", count=n, offset=pos).reshape(shape).astype(np.float64)
        pos += 4 * n
    if pos != len(blob):
        raise DataError(f"{path}: {len(blob) - pos} trailing bytes")
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    return ModelParams(sidecar["kind"], config_from_dict(sidecar["kind"], sidecar["config"]), tensors, sidecar["seed"])

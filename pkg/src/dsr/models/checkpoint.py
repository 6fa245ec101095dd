"""Checkpoint persistence: JSON manifest plus a binary blob of named tensors.

Blob layout per tensor: uint16 name length, utf-8 name, uint8 ndim,
uint32 per-axis extents, float64 data; all little-endian. Files are
written to a temporary name and atomically renamed.
"""

from __future__ import annotations

import json
import os
import struct
from pathlib import Path

import numpy as np

from .params import ModelConfig


def _pack_arrays(arrays: dict[str, np.ndarray]) -> bytes:
    parts = []
    for name, arr in arrays.items():
        nb = name.encode("utf-8")
        arr = np.ascontiguousarray(arr, dtype="<f8")
        parts.append(struct.pack("<H", len(nb)))
        parts.append(nb)
        parts.append(struct.pack("<B", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(arr.tobytes())
    return b"".join(parts)


def _unpack_arrays(blob: bytes) -> dict[str, np.ndarray]:
    arrays = {}
    off = 0
    while off < len(blob):
        (nlen,) = struct.unpack_from("<H", blob, off)
        off += 2
        name = blob[off : off + nlen].decode("utf-8")
        off += nlen
        (ndim,) = struct.unpack_from("<B", blob, off)
        off += 1
        shape = struct.unpack_from(f"<{ndim}I", blob, off)
        off += 4 * ndim
        count = int(np.prod(shape)) if ndim else 1
        arrays[name] = (
            np.frombuffer(blob, dtype="<f8", count=count, offset=off)
            .reshape(shape)
            .copy()
        )
        off += 8 * count
    return arrays


def save_checkpoint(
    path: str | os.PathLike,
    cfg: ModelConfig,
    arrays: dict[str, np.ndarray],
    iteration: int,
    seed: int,
) -> Path:
    """Write `<path>.json` + `<path>.bin`; returns the manifest path."""
    base = Path(path)
    base.parent.mkdir(parents=True, exist_ok=True)
    blob_path = base.with_suffix(".bin")
    tmp = blob_path.with_suffix(".bin.tmp")
    tmp.write_bytes(_pack_arrays(arrays))
    os.replace(tmp, blob_path)
    manifest = {
        "variant": cfg.variant,
        "config": cfg.asdict(),
        "iteration": iteration,
        "seed": seed,
        "blob": blob_path.name,
        "tensors": [{"name": n, "shape": list(a.shape)} for n, a in arrays.items()],
    }
    man_path = base.with_suffix(".json")
    tmp = man_path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, man_path)
    return man_path


def load_checkpoint(path: str | os.PathLike):
    """Returns (cfg, arrays, manifest) for a checkpoint base path."""
    base = Path(path)
    manifest = json.loads(base.with_suffix(".json").read_text())
    blob = (base.parent / manifest["blob"]).read_bytes()
    arrays = _unpack_arrays(blob)
    cfg = ModelConfig.fromdict(manifest["config"])
    return cfg, arrays, manifest
